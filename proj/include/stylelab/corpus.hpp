#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylelab/common.hpp"
#include "stylelab/model.hpp"

namespace stylelab {

// ---------------------------------------------------------------------------
// Labeled emotion corpus. The on-disk form is a headerless TSV with two
// fields per line: escaped text, then a comma-separated list of raw
// fine-grained labels. Raw labels are collapsed to the seven coarse labels
// through a mapping table. A multi-label record is kept only when every raw
// label collapses to the same coarse label; otherwise it is dropped as
// ambiguous. Rows with unmapped raw labels are excluded, duplicates
// (same text and coarse label) are dropped, and malformed rows are skipped
// with a per-row error note; only an unreadable file is fatal.
// ---------------------------------------------------------------------------

class EkmanMapping {
  public:
    // TSV: raw_label <TAB> coarse_label, one pair per line, '#' comments allowed
    static EkmanMapping load(const std::string& path);

    // lookup without failure; false when the raw label is not in the table
    bool try_map(const std::string& raw_label, Emotion& out) const;

    // throws missing_label_error for labels absent from the table
    Emotion map(const std::string& raw_label) const;
    bool contains(const std::string& raw_label) const;
    size_t size() const { return table_.size(); }

  private:
    std::unordered_map<std::string, Emotion> table_;
};

struct LabeledText {
    std::string text;
    std::string raw_label;  // original label field, before mapping
    Emotion label = Emotion::neutral;
};

struct CorpusLoadReport {
    int data_lines = 0;  // non-blank lines
    int kept = 0;
    int dropped_ambiguous = 0;
    int dropped_unmapped = 0;
    int dropped_duplicate = 0;
    std::vector<std::string> row_errors;  // malformed rows, skipped
    std::vector<std::string> notes;       // per-row exclusion reports
};

class Corpus {
  public:
    static Corpus load(const std::string& path, const EkmanMapping& mapping,
                       CorpusLoadReport* report = nullptr);

    const std::vector<LabeledText>& items() const { return items_; }
    std::vector<std::string_view> texts_for(Emotion label) const;
    const std::array<int, kAllLabels>& counts() const { return counts_; }
    size_t size() const { return items_.size(); }

    // order-sensitive FNV-1a over (text, label) pairs; identifies the exact
    // corpus a style-vector set was built from
    uint64_t content_hash() const { return hash_; }

  private:
    std::vector<LabeledText> items_;
    std::array<int, kAllLabels> counts_{};
    uint64_t hash_ = 0;
};

// Token budget applied to corpus texts before activation collection.
inline constexpr int kActivationTokenLimit = 300;

// Keeps the first `limit` tokens, removing the suffix; a sequence at or
// under the limit is returned unchanged. limit < 1 throws argument_error.
TokenSequence truncate_tokens(const TokenSequence& seq, int limit = kActivationTokenLimit);

// Deterministic seeded sample without replacement. When fewer than n texts
// carry the label, all of them are returned (corpus order) and *short_sample
// is set. Throws missing_label_error when the label has no texts at all.
std::vector<LabeledText> sample_per_label(const Corpus& corpus, Emotion label, size_t n,
                                          uint64_t seed, bool* short_sample = nullptr);

// Coarse-label counts of the full source dataset the lab corpus is sampled
// from, kept as a fixed reference distribution for documentation and sanity
// checks (see docs/formats.md).
struct ReferenceCount {
    Emotion label;
    int count;
};

inline constexpr std::array<ReferenceCount, kAllLabels> kReferenceCounts = {{
    {Emotion::joy, 19440},
    {Emotion::neutral, 17716},
    {Emotion::surprise, 5839},
    {Emotion::anger, 5682},
    {Emotion::sadness, 3622},
    {Emotion::disgust, 881},
    {Emotion::fear, 814},
}};

// TSV: coarse_label <TAB> count; must cover all seven labels exactly once
std::array<int, kAllLabels> load_reference_counts(const std::string& path);

}  // namespace stylelab
