#include "stylelab/eval.hpp"

#include <algorithm>
#include <cmath>

namespace stylelab {

EmotionScores normalize_scores(const EmotionScores& raw) {
    double sum = 0.0;
    for (double v : raw) {
        if (!std::isfinite(v) || v < 0.0)
            throw data_error("scorer produced a negative or non-finite value");
        sum += v;
    }
    EmotionScores out{};
    const double denom = sum + kEkmanSix * kScoreEpsilon;
    for (size_t e = 0; e < out.size(); ++e) out[e] = (raw[e] + kScoreEpsilon) / denom;
    return out;
}

// ---------------------------------------------------------------------------
// function words and features
// ---------------------------------------------------------------------------

FunctionWordSet FunctionWordSet::load(const std::string& path) {
    FunctionWordSet set;
    for (const std::string& raw : read_lines(path)) {
        const std::string line(trim(raw));
        if (line.empty() || line[0] == '#') continue;
        set.words_.insert(to_lower_ascii(line));
    }
    if (set.words_.empty()) throw data_error("function word list is empty: " + path);
    return set;
}

bool FunctionWordSet::contains(std::string_view word) const {
    return words_.count(std::string(word)) != 0;
}

TextFeatures compute_features(std::string_view text, const FunctionWordSet* function_words) {
    TextFeatures f;
    f.byte_count = static_cast<int>(text.size());

    const std::vector<std::string> words = split_words(text);
    f.word_count = static_cast<int>(words.size());
    if (words.empty()) return f;

    std::unordered_map<std::string_view, int> freq;
    size_t total_chars = 0;
    for (const std::string& w : words) {
        freq[w] += 1;
        total_chars += w.size();
    }
    f.unique_word_count = static_cast<int>(freq.size());
    f.ttr = static_cast<double>(f.unique_word_count) / f.word_count;
    f.mean_word_length = static_cast<double>(total_chars) / f.word_count;

    if (words.size() >= 2) {
        int repeats = 0;
        for (size_t i = 1; i < words.size(); ++i)
            if (words[i] == words[i - 1]) ++repeats;
        f.adjacent_repetition =
            static_cast<double>(repeats) / static_cast<double>(words.size() - 1);
    }
    if (function_words != nullptr) {
        int content = 0;
        for (const std::string& w : words)
            if (!function_words->contains(w)) ++content;
        f.lexical_density = static_cast<double>(content) / f.word_count;
    }

    const double n = static_cast<double>(words.size());
    double h = 0.0;
    for (const auto& [word, count] : freq) {
        const double p = count / n;
        h -= p * std::log2(p);
    }
    // accumulation order over the hash map is unspecified; a single type is
    // exactly 0 regardless
    f.entropy_bits = std::max(0.0, h);
    return f;
}

double lexical_density(std::string_view text, const FunctionWordSet& function_words) {
    return compute_features(text, &function_words).lexical_density;
}

double mean_word_length(std::string_view text) {
    return compute_features(text, nullptr).mean_word_length;
}

double shannon_entropy(std::string_view text) {
    return compute_features(text, nullptr).entropy_bits;
}

// ---------------------------------------------------------------------------
// judge
// ---------------------------------------------------------------------------

double normalize_judge(double raw) {
    if (!std::isfinite(raw)) throw data_error("judge produced a non-finite raw score");
    const double clamped = std::clamp(raw, 1.0, 10.0);
    return (10.0 - clamped) / 9.0;
}

double HeuristicJudge::raw_from_features(const TextFeatures& f) {
    const double confusion = 0.6 * (1.0 - f.ttr) + 0.4 * f.adjacent_repetition;
    return std::clamp(1.0 + 9.0 * confusion, 1.0, 10.0);
}

double HeuristicJudge::raw_score(const std::string& text) {
    if (text.empty()) return 10.0;
    return raw_from_features(compute_features(text, nullptr));
}

EmotionScores score_text(Scorer& scorer, const std::string& text, bool* used_fallback) {
    if (text.empty()) {
        if (used_fallback != nullptr) *used_fallback = true;
        return normalize_scores(EmotionScores{});
    }
    if (used_fallback != nullptr) *used_fallback = false;
    return scorer.score(text);
}

double judge_text(Judge& judge, const std::string& text, bool* used_fallback) {
    if (text.empty()) {
        if (used_fallback != nullptr) *used_fallback = true;
        return 10.0;
    }
    if (used_fallback != nullptr) *used_fallback = false;
    return judge.raw_score(text);
}

// ---------------------------------------------------------------------------
// lexicon scorer
// ---------------------------------------------------------------------------

LexiconScorer LexiconScorer::load(const std::string& path) {
    LexiconScorer scorer;
    const std::vector<std::string> lines = read_lines(path);
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string line(trim(lines[i]));
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> fields = split(line, '\t');
        if (fields.size() != 3)
            throw data_error("lexicon line must have three tab-separated fields at " +
                             path + ":" + std::to_string(i + 1));
        const std::string word = to_lower_ascii(trim(fields[0]));
        if (word.empty())
            throw data_error("empty lexicon word at " + path + ":" + std::to_string(i + 1));
        Emotion e;
        if (!try_emotion_from_string(trim(fields[1]), e) ||
            static_cast<int>(e) >= kEkmanSix)
            throw data_error("lexicon emotion must be one of the six steerable labels at " +
                             path + ":" + std::to_string(i + 1));
        const double weight = parse_double_strict(trim(fields[2]));
        if (!(weight > 0.0))
            throw data_error("lexicon weight must be positive at " + path + ":" +
                             std::to_string(i + 1));
        scorer.entries_[word][static_cast<size_t>(e)] += weight;
    }
    if (scorer.entries_.empty()) throw data_error("lexicon has no entries: " + path);
    return scorer;
}

EmotionScores LexiconScorer::score(const std::string& text) {
    EmotionScores raw{};
    for (const std::string& w : split_words(text)) {
        const auto it = entries_.find(w);
        if (it == entries_.end()) continue;
        for (size_t e = 0; e < raw.size(); ++e) raw[e] += it->second[e];
    }
    return normalize_scores(raw);
}

int LexiconScorer::hit_count(std::string_view text) const {
    int hits = 0;
    for (const std::string& w : split_words(text))
        if (entries_.count(w) != 0) ++hits;
    return hits;
}

}  // namespace stylelab
