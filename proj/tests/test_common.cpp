#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "stylelab/common.hpp"
#include "testutil.hpp"

using namespace stylelab;

// ---------------------------------------------------------------------------
// hashing
// ---------------------------------------------------------------------------

TEST_CASE("fnv1a64 matches the published reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("fnv1a64 streaming equals one-shot") {
    Fnv1a64 h;
    h.update("foo");
    h.update("bar");
    CHECK(h.digest() == fnv1a64("foobar"));
}

TEST_CASE("Fnv1a64 u64 and double updates are order sensitive") {
    Fnv1a64 a, b;
    a.update_u64(1);
    a.update_u64(2);
    b.update_u64(2);
    b.update_u64(1);
    CHECK(a.digest() != b.digest());

    Fnv1a64 c, d;
    c.update_double(0.5);
    d.update_double(0.25);
    CHECK(c.digest() != d.digest());
}

TEST_CASE("hex64 round trip") {
    for (uint64_t v : {0ull, 1ull, 0xdeadbeefcafef00dull, ~0ull}) {
        CHECK(parse_hex64(hex64(v)) == v);
        CHECK(hex64(v).size() == 16);
    }
    CHECK_THROWS_AS(parse_hex64("xyz"), data_error);
    CHECK_THROWS_AS(parse_hex64(""), data_error);
}

// ---------------------------------------------------------------------------
// emotions and the lambda grid
// ---------------------------------------------------------------------------

TEST_CASE("emotion names round trip") {
    for (Emotion e : kAllEmotions) {
        CHECK(emotion_from_string(to_string(e)) == e);
    }
    CHECK_THROWS_AS(emotion_from_string("melancholy"), argument_error);
    Emotion out;
    CHECK_FALSE(try_emotion_from_string("melancholy", out));
    CHECK(try_emotion_from_string("fear", out));
    CHECK(out == Emotion::fear);
}

TEST_CASE("lambda grid is the eight ascending design strengths") {
    REQUIRE(kLambdaGrid.size() == 8);
    CHECK(kLambdaGrid.front() == 0.0);
    CHECK(kLambdaGrid.back() == 0.35);
    for (size_t i = 1; i < kLambdaGrid.size(); ++i) {
        CHECK(kLambdaGrid[i] > kLambdaGrid[i - 1]);
        CHECK(kLambdaGrid[i] - kLambdaGrid[i - 1] == doctest::Approx(0.05).epsilon(1e-12));
    }
    CHECK(kLambdaWarnThreshold == 0.35);
}

// ---------------------------------------------------------------------------
// deterministic rng
// ---------------------------------------------------------------------------

TEST_CASE("Rng is reproducible per seed") {
    Rng a(123), b(123), c(124);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        all_equal = all_equal && (x == b.uniform());
        any_diff = any_diff || (x != c.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("Rng normal draws have the right first two moments") {
    Rng r(7);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("Rng below stays in range and covers all values") {
    Rng r(5);
    std::set<size_t> seen;
    for (int i = 0; i < 200; ++i) {
        const size_t v = r.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK(r.below(1) == 0);
}

TEST_CASE("mix64 is deterministic and spreads nearby inputs") {
    CHECK(mix64(42) == mix64(42));
    CHECK(mix64(1) != mix64(2));
    CHECK(mix64(0) != 0);  // the mixer must not fix zero, seeds may be zero
}

// ---------------------------------------------------------------------------
// words and parsing
// ---------------------------------------------------------------------------

TEST_CASE("split_words lowercases maximal ascii letter runs") {
    CHECK(split_words("The cat, sat!") == std::vector<std::string>{"the", "cat", "sat"});
    CHECK(split_words("ab2cd") == std::vector<std::string>{"ab", "cd"});
    CHECK(split_words("") == std::vector<std::string>{});
    CHECK(split_words("123 .,;") == std::vector<std::string>{});
    CHECK(split_words("don't") == std::vector<std::string>{"don", "t"});
}

TEST_CASE("to_lower_ascii touches only ascii letters") {
    CHECK(to_lower_ascii("AbC xYz-9") == "abc xyz-9");
}

TEST_CASE("split keeps empty fields") {
    CHECK(split("a,b,,c", ',') == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(split("", ',') == std::vector<std::string>{""});
    CHECK(split("a,", ',') == std::vector<std::string>{"a", ""});
}

TEST_CASE("trim strips ascii whitespace") {
    CHECK(trim("  a b \t\r\n") == "a b");
    CHECK(trim("") == "");
    CHECK(trim(" \t ") == "");
}

TEST_CASE("strict number parsing") {
    CHECK(parse_double_strict("2.5") == 2.5);
    CHECK(parse_double_strict("-1e-3") == -1e-3);
    CHECK(parse_long_strict("-42") == -42);
    CHECK_THROWS_AS(parse_double_strict(""), data_error);
    CHECK_THROWS_AS(parse_double_strict("1.5x"), data_error);
    CHECK_THROWS_AS(parse_double_strict("nanabc"), data_error);
    CHECK_THROWS_AS(parse_long_strict("12.5"), data_error);
    CHECK_THROWS_AS(parse_long_strict("abc"), data_error);
}

TEST_CASE("format_double round trips representative and random values") {
    for (double v : {0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, 1e-300, 1e300, 0.35, 6.02e23}) {
        CHECK(parse_double_strict(format_double(v)) == v);
    }
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 500; ++i) {
        const double v = dist(gen);
        CHECK(parse_double_strict(format_double(v)) == v);
    }
}

// ---------------------------------------------------------------------------
// escaping and byte codecs
// ---------------------------------------------------------------------------

TEST_CASE("field escaping round trips control characters") {
    const std::string raw = "a\tb\nc\rd\\e";
    const std::string esc = escape_field(raw);
    CHECK(esc == "a\\tb\\nc\\rd\\\\e");
    CHECK(unescape_field(esc) == raw);
    CHECK_THROWS_AS(unescape_field("bad\\"), data_error);
    CHECK_THROWS_AS(unescape_field("bad\\q"), data_error);
}

TEST_CASE("json byte codec round trips every byte value") {
    std::string all;
    for (int b = 0; b < 256; ++b) all.push_back(static_cast<char>(b));
    const std::string text = bytes_to_json_text(all);
    CHECK(json_text_to_bytes(text) == all);
    // ascii stays readable
    CHECK(bytes_to_json_text("plain ascii") == "plain ascii");
    // code points beyond latin-1 cannot come from this encoder
    CHECK_THROWS_AS(json_text_to_bytes("\xe4\xb8\xad"), data_error);
}

// ---------------------------------------------------------------------------
// file io
// ---------------------------------------------------------------------------

TEST_CASE("text file io round trips binary content") {
    testutil::TempDir tmp;
    std::string payload = "line1\nline2\n";
    payload.push_back('\0');
    payload += "\xff\xfe";
    const std::string path = tmp.file("bin.dat");
    write_text_file(path, payload);
    CHECK(read_text_file(path) == payload);
    CHECK_THROWS_AS(read_text_file(tmp.file("missing.dat")), io_error);
}

TEST_CASE("read_lines splits on newlines") {
    testutil::TempDir tmp;
    const std::string path = tmp.file("lines.txt");
    write_text_file(path, "one\ntwo\n\nthree");
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "one");
    CHECK(lines[2] == "");
    CHECK(lines[3] == "three");
}
