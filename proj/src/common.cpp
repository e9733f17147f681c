#include "stylelab/common.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace stylelab {

const char* to_string(Emotion e) {
    switch (e) {
        case Emotion::anger: return "anger";
        case Emotion::disgust: return "disgust";
        case Emotion::fear: return "fear";
        case Emotion::joy: return "joy";
        case Emotion::sadness: return "sadness";
        case Emotion::surprise: return "surprise";
        case Emotion::neutral: return "neutral";
    }
    return "?";
}

bool try_emotion_from_string(std::string_view s, Emotion& out) {
    for (Emotion e : kAllEmotions) {
        if (s == to_string(e)) {
            out = e;
            return true;
        }
    }
    return false;
}

Emotion emotion_from_string(std::string_view s) {
    Emotion e;
    if (!try_emotion_from_string(s, e)) {
        throw argument_error("unknown emotion label: '" + std::string(s) + "'");
    }
    return e;
}

// ---------------------------------------------------------------------------
// FNV-1a
// ---------------------------------------------------------------------------

namespace {
constexpr uint64_t kFnvPrime = 0x100000001b3ull;
}

void Fnv1a64::update(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = state_;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    state_ = h;
}

void Fnv1a64::update_u64(uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    update(bytes, 8);
}

void Fnv1a64::update_double(double v) {
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, 8);
    update_u64(bits);
}

uint64_t fnv1a64(const void* data, size_t n) {
    Fnv1a64 h;
    h.update(data, n);
    return h.digest();
}

uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

uint64_t parse_hex64(std::string_view s) {
    if (s.empty() || s.size() > 16) throw data_error("bad hex64 value: '" + std::string(s) + "'");
    uint64_t v = 0;
    for (char c : s) {
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<uint64_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') v |= static_cast<uint64_t>(c - 'A' + 10);
        else throw data_error("bad hex64 value: '" + std::string(s) + "'");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Rng
// ---------------------------------------------------------------------------

size_t Rng::below(size_t n) {
    // rejection sampling keeps the draw unbiased
    if (n <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
        v = gen_();
    } while (v >= limit);
    return static_cast<size_t>(v % n);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1, u2;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    has_spare_ = true;
    return mag * std::cos(two_pi * u2);
}

uint64_t mix64(uint64_t v) {
    // splitmix64 finalizer
    v += 0x9e3779b97f4a7c15ull;
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
    return v ^ (v >> 31);
}

// ---------------------------------------------------------------------------
// Text utilities
// ---------------------------------------------------------------------------

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : text) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            words.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_double_strict(std::string_view s) {
    s = trim(s);
    if (s.empty()) throw data_error("empty numeric field");
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw data_error("bad numeric field: '" + std::string(s) + "'");
    }
    return v;
}

long parse_long_strict(std::string_view s) {
    s = trim(s);
    if (s.empty()) throw data_error("empty integer field");
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw data_error("bad integer field: '" + std::string(s) + "'");
    }
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string escape_field(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape_field(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (i + 1 >= s.size()) throw data_error("dangling escape in field");
        ++i;
        switch (s[i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            default: throw data_error("unknown escape in field");
        }
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read failed: " + path);
    return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::string content = read_text_file(path);
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= content.size()) {
        size_t pos = content.find('\n', start);
        if (pos == std::string::npos) {
            if (start < content.size()) lines.emplace_back(content.substr(start));
            break;
        }
        std::string line = content.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = pos + 1;
    }
    return lines;
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw io_error("write failed: " + path);
}

std::string bytes_to_json_text(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    for (const char c : bytes) {
        const auto b = static_cast<unsigned char>(c);
        if (b < 0x80) {
            out.push_back(static_cast<char>(b));
        } else {
            out.push_back(static_cast<char>(0xC0 | (b >> 6)));
            out.push_back(static_cast<char>(0x80 | (b & 0x3F)));
        }
    }
    return out;
}

std::string json_text_to_bytes(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        const auto b = static_cast<unsigned char>(text[i]);
        if (b < 0x80) {
            out.push_back(static_cast<char>(b));
            continue;
        }
        // two-byte sequence C2..C3 10xxxxxx covers code points 0x80..0xFF
        if ((b == 0xC2 || b == 0xC3) && i + 1 < text.size()) {
            const auto b2 = static_cast<unsigned char>(text[i + 1]);
            if ((b2 & 0xC0) == 0x80) {
                out.push_back(static_cast<char>(((b & 0x03) << 6) | (b2 & 0x3F)));
                ++i;
                continue;
            }
        }
        throw data_error("text field contains a code point above U+00FF");
    }
    return out;
}

}  // namespace stylelab
