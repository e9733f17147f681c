#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stylelab {

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto exit codes:
//   config_error / argument_error -> 1 (usage)
//   data_error / io_error         -> 2 (bad input data)
//   everything else               -> 3 (internal)
// ---------------------------------------------------------------------------

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// invalid model or run configuration (bad dimensions, unknown options)
struct config_error : error {
    using error::error;
};

// invalid argument to an operation (dimension mismatch, empty input, ...)
struct argument_error : error {
    using error::error;
};

// malformed or inconsistent input data (files, rows, schemas)
struct data_error : error {
    using error::error;
};

// unreadable or unwritable files
struct io_error : data_error {
    using data_error::data_error;
};

// a label required by an operation has no samples / no column
struct missing_label_error : data_error {
    using data_error::data_error;
};

// degenerate statistical input (zero variance, unimputable cell, ...)
struct numeric_error : error {
    using error::error;
};

// ---------------------------------------------------------------------------
// Emotion labels
// ---------------------------------------------------------------------------

// Six basic emotion categories plus neutral. Order is fixed and used as the
// canonical column order everywhere (files, matrices, reports).
enum class Emotion : int {
    anger = 0,
    disgust = 1,
    fear = 2,
    joy = 3,
    sadness = 4,
    surprise = 5,
    neutral = 6,
};

inline constexpr int kEkmanSix = 6;   // steerable targets (neutral excluded)
inline constexpr int kAllLabels = 7;  // Ekman six plus neutral

inline constexpr std::array<Emotion, kEkmanSix> kEkmanEmotions = {
    Emotion::anger,   Emotion::disgust, Emotion::fear,
    Emotion::joy,     Emotion::sadness, Emotion::surprise,
};

inline constexpr std::array<Emotion, kAllLabels> kAllEmotions = {
    Emotion::anger, Emotion::disgust,  Emotion::fear,    Emotion::joy,
    Emotion::sadness, Emotion::surprise, Emotion::neutral,
};

const char* to_string(Emotion e);
bool try_emotion_from_string(std::string_view s, Emotion& out);
Emotion emotion_from_string(std::string_view s);  // throws argument_error

// Steering strength grid of the sweep design: 8 strengths, 0.00 .. 0.35.
inline constexpr std::array<double, 8> kLambdaGrid = {
    0.00, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35,
};

// Strengths above this value are known to degrade coherence; the harness
// warns but does not refuse.
inline constexpr double kLambdaWarnThreshold = 0.35;

// ---------------------------------------------------------------------------
// Hashing (FNV-1a, 64-bit) — content hashes and weight checksums.
// Not cryptographic; used for provenance and change detection only.
// ---------------------------------------------------------------------------

class Fnv1a64 {
  public:
    void update(const void* data, size_t n);
    void update(std::string_view s) { update(s.data(), s.size()); }
    void update_u64(uint64_t v);
    void update_double(double v);
    uint64_t digest() const { return state_; }

  private:
    uint64_t state_ = 0xcbf29ce484222325ull;
};

uint64_t fnv1a64(const void* data, size_t n);
uint64_t fnv1a64(std::string_view s);
std::string hex64(uint64_t v);
uint64_t parse_hex64(std::string_view s);  // throws data_error

// ---------------------------------------------------------------------------
// Deterministic random numbers.
//
// mt19937_64 core with hand-rolled uniform/normal transforms so sampled
// values are identical across standard libraries.
// ---------------------------------------------------------------------------

class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n), n >= 1
    size_t below(size_t n);

    // standard normal via Box-Muller (caches the spare draw)
    double normal();

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// stateless 64-bit mixer, used to derive per-prompt decode seeds
uint64_t mix64(uint64_t v);

// ---------------------------------------------------------------------------
// Words and small text utilities.
//
// A "word" is a maximal run of ASCII letters, lowercased. This definition is
// shared by the lexicon scorer, the text features, and the heuristic judge.
// ---------------------------------------------------------------------------

std::vector<std::string> split_words(std::string_view text);
std::string to_lower_ascii(std::string_view s);

std::vector<std::string> split(std::string_view line, char delim);
std::string_view trim(std::string_view s);

double parse_double_strict(std::string_view s);  // throws data_error
long parse_long_strict(std::string_view s);      // throws data_error

// shortest round-trip decimal form (deterministic across runs)
std::string format_double(double v);

// escaping for text fields in tab-separated result files:
// backslash, tab, newline, carriage return -> \\ \t \n \r
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);  // throws data_error

// Lossless codec for raw byte strings crossing a JSON boundary. Each byte is
// treated as the Unicode code point with the same value (Latin-1), so ASCII
// stays readable and arbitrary model output survives a round trip.
std::string bytes_to_json_text(std::string_view bytes);
std::string json_text_to_bytes(std::string_view text);  // throws data_error

std::string read_text_file(const std::string& path);           // throws io_error
std::vector<std::string> read_lines(const std::string& path);  // throws io_error
void write_text_file(const std::string& path, std::string_view content);

}  // namespace stylelab
