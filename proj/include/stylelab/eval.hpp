#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stylelab/common.hpp"

namespace stylelab {

// six non-negative values indexed by Emotion, normalized to sum to 1
using EmotionScores = std::array<double, kEkmanSix>;

// smoothing constant shared by every scorer normalization
inline constexpr double kScoreEpsilon = 1e-3;

// (raw[e] + eps) / (sum + 6*eps); raw values must be non-negative and finite
EmotionScores normalize_scores(const EmotionScores& raw);

// ---------------------------------------------------------------------------
// text features
// ---------------------------------------------------------------------------

class FunctionWordSet {
  public:
    // one lowercase word per line, '#' comments and blank lines ignored
    static FunctionWordSet load(const std::string& path);

    bool contains(std::string_view word) const;
    size_t size() const { return words_.size(); }

  private:
    std::unordered_set<std::string> words_;
};

struct TextFeatures {
    int byte_count = 0;
    int word_count = 0;
    int unique_word_count = 0;
    double ttr = 0.0;                  // unique / total words, 0 when no words
    double adjacent_repetition = 0.0;  // share of equal adjacent word pairs
    double lexical_density = 0.0;      // non-function words / words, 0 without a word list
    double mean_word_length = 0.0;     // characters per word, 0 when no words
    double entropy_bits = 0.0;         // Shannon entropy of the word frequencies
};

// words are maximal ASCII alphabetic runs, lowercased; pass nullptr to skip
// lexical density
TextFeatures compute_features(std::string_view text, const FunctionWordSet* function_words);

// content words / total words; 0 when the text has no words
double lexical_density(std::string_view text, const FunctionWordSet& function_words);

// mean characters per word; 0 for wordless text
double mean_word_length(std::string_view text);

// -sum p log2 p over word relative frequencies; 0 for a single word type or
// wordless text
double shannon_entropy(std::string_view text);

// ---------------------------------------------------------------------------
// scorer and judge interfaces
// ---------------------------------------------------------------------------

class Scorer {
  public:
    virtual ~Scorer() = default;
    virtual EmotionScores score(const std::string& text) = 0;
    virtual std::string name() const = 0;
};

class Judge {
  public:
    virtual ~Judge() = default;
    // raw confusion score in [1, 10]; 1 = clear, 10 = nonsensical
    virtual double raw_score(const std::string& text) = 0;
    virtual std::string name() const = 0;
};

// Front doors used by the harness: empty text short-circuits to the defined
// fallback (uniform scores / raw 10) without consulting the implementation,
// and *used_fallback reports when that happened.
EmotionScores score_text(Scorer& scorer, const std::string& text,
                         bool* used_fallback = nullptr);
double judge_text(Judge& judge, const std::string& text, bool* used_fallback = nullptr);

// maps a raw judge score to comprehensibility in [0, 1], higher = clearer;
// the raw value is clamped into [1, 10] first
double normalize_judge(double raw);

// ---------------------------------------------------------------------------
// built-in implementations
// ---------------------------------------------------------------------------

// Weighted keyword scorer. Lexicon TSV: word <TAB> emotion <TAB> weight.
// The score for an emotion is the weight sum over the text's words, then
// normalized with kScoreEpsilon smoothing. A text with no lexicon hits
// (including the empty text) comes out uniform.
class LexiconScorer : public Scorer {
  public:
    static LexiconScorer load(const std::string& path);

    EmotionScores score(const std::string& text) override;
    std::string name() const override { return "lexicon"; }

    // diagnostic: how many of the text's words carry lexicon weight
    int hit_count(std::string_view text) const;
    size_t entry_count() const { return entries_.size(); }

  private:
    // word -> per-emotion weights
    std::unordered_map<std::string, EmotionScores> entries_;
};

// Deterministic text-statistics judge. Raw score:
//   clamp(1 + 9 * (0.6 * (1 - ttr) + 0.4 * adjacent_repetition), 1, 10)
// and the empty text is maximally confusing (raw 10).
class HeuristicJudge : public Judge {
  public:
    double raw_score(const std::string& text) override;
    std::string name() const override { return "heuristic"; }

    static double raw_from_features(const TextFeatures& f);
};

}  // namespace stylelab
