#include "stylelab/corpus.hpp"

#include <algorithm>
#include <unordered_set>

namespace stylelab {

namespace {

std::string at_line(const std::string& path, size_t line_no) {
    return path + ":" + std::to_string(line_no);
}

}  // namespace

EkmanMapping EkmanMapping::load(const std::string& path) {
    EkmanMapping m;
    const std::vector<std::string> lines = read_lines(path);
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string line(trim(lines[i]));
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> fields = split(line, '\t');
        if (fields.size() != 2)
            throw data_error("mapping line must have two tab-separated fields at " +
                             at_line(path, i + 1));
        const std::string raw(trim(fields[0]));
        const std::string coarse(trim(fields[1]));
        if (raw.empty()) throw data_error("empty raw label at " + at_line(path, i + 1));
        Emotion label;
        if (!try_emotion_from_string(coarse, label))
            throw data_error("unknown coarse label '" + coarse + "' at " + at_line(path, i + 1));
        if (m.table_.count(raw) != 0)
            throw data_error("duplicate raw label '" + raw + "' at " + at_line(path, i + 1));
        m.table_.emplace(raw, label);
    }
    if (m.table_.empty()) throw data_error("mapping file has no entries: " + path);
    return m;
}

bool EkmanMapping::try_map(const std::string& raw_label, Emotion& out) const {
    const auto it = table_.find(raw_label);
    if (it == table_.end()) return false;
    out = it->second;
    return true;
}

Emotion EkmanMapping::map(const std::string& raw_label) const {
    Emotion out;
    if (!try_map(raw_label, out))
        throw missing_label_error("raw label '" + raw_label + "' is not in the mapping table");
    return out;
}

bool EkmanMapping::contains(const std::string& raw_label) const {
    return table_.count(raw_label) != 0;
}

Corpus Corpus::load(const std::string& path, const EkmanMapping& mapping,
                    CorpusLoadReport* report) {
    Corpus corpus;
    CorpusLoadReport rep;
    const std::vector<std::string> lines = read_lines(path);
    std::unordered_set<std::string> seen;  // text \x1f coarse label
    Fnv1a64 hasher;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        ++rep.data_lines;
        const std::string where = at_line(path, i + 1);
        const std::vector<std::string> fields = split(lines[i], '\t');
        if (fields.size() != 2) {
            rep.row_errors.push_back(where + ": expected two tab-separated fields");
            continue;
        }
        std::string text;
        try {
            text = unescape_field(fields[0]);
        } catch (const data_error& e) {
            rep.row_errors.push_back(where + ": " + e.what());
            continue;
        }
        if (text.empty()) {
            rep.row_errors.push_back(where + ": empty text field");
            continue;
        }

        const std::vector<std::string> raw_labels = split(fields[1], ',');
        bool malformed = false;
        bool unmapped = false;
        bool ambiguous = false;
        bool first = true;
        Emotion coarse = Emotion::neutral;
        for (const std::string& r : raw_labels) {
            const std::string raw(trim(r));
            if (raw.empty()) {
                rep.row_errors.push_back(where + ": blank raw label");
                malformed = true;
                break;
            }
            Emotion mapped;
            if (!mapping.try_map(raw, mapped)) {
                rep.notes.push_back(where + ": raw label '" + raw +
                                    "' not in mapping; row excluded");
                unmapped = true;
                break;
            }
            if (first) {
                coarse = mapped;
                first = false;
            } else if (mapped != coarse) {
                ambiguous = true;
            }
        }
        if (malformed) continue;
        if (first && !unmapped) {
            rep.row_errors.push_back(where + ": empty label field");
            continue;
        }
        if (unmapped) {
            ++rep.dropped_unmapped;
            continue;
        }
        if (ambiguous) {
            ++rep.dropped_ambiguous;
            continue;
        }
        const std::string key = text + '\x1f' + to_string(coarse);
        if (!seen.insert(key).second) {
            ++rep.dropped_duplicate;
            continue;
        }
        ++rep.kept;
        corpus.counts_[static_cast<size_t>(coarse)] += 1;
        hasher.update(text);
        hasher.update("\x1f", 1);
        hasher.update(to_string(coarse));
        hasher.update("\x1e", 1);
        corpus.items_.push_back(LabeledText{std::move(text), fields[1], coarse});
    }
    if (corpus.items_.empty()) throw data_error("corpus has no usable records: " + path);
    corpus.hash_ = hasher.digest();
    if (report != nullptr) *report = std::move(rep);
    return corpus;
}

std::vector<std::string_view> Corpus::texts_for(Emotion label) const {
    std::vector<std::string_view> out;
    for (const auto& item : items_)
        if (item.label == label) out.emplace_back(item.text);
    return out;
}

TokenSequence truncate_tokens(const TokenSequence& seq, int limit) {
    if (limit < 1) throw argument_error("token limit must be at least 1");
    if (static_cast<int>(seq.size()) <= limit) return seq;
    TokenSequence out;
    out.tokens.assign(seq.tokens.begin(), seq.tokens.begin() + limit);
    return out;
}

std::vector<LabeledText> sample_per_label(const Corpus& corpus, Emotion label, size_t n,
                                          uint64_t seed, bool* short_sample) {
    if (n < 1) throw argument_error("sample size must be at least 1");
    std::vector<size_t> indices;
    for (size_t i = 0; i < corpus.items().size(); ++i)
        if (corpus.items()[i].label == label) indices.push_back(i);
    if (indices.empty())
        throw missing_label_error(std::string("corpus has no texts labeled '") +
                                  to_string(label) + "'");
    if (short_sample != nullptr) *short_sample = indices.size() < n;
    std::vector<LabeledText> out;
    if (indices.size() <= n) {
        for (size_t idx : indices) out.push_back(corpus.items()[idx]);
        return out;
    }
    Rng rng(seed);
    // partial Fisher-Yates: the first n slots become the sample
    for (size_t i = 0; i < n; ++i) {
        const size_t j = i + rng.below(indices.size() - i);
        std::swap(indices[i], indices[j]);
        out.push_back(corpus.items()[indices[i]]);
    }
    return out;
}

std::array<int, kAllLabels> load_reference_counts(const std::string& path) {
    std::array<int, kAllLabels> counts{};
    std::array<bool, kAllLabels> seen{};
    const std::vector<std::string> lines = read_lines(path);
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string line(trim(lines[i]));
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> fields = split(line, '\t');
        if (fields.size() != 2)
            throw data_error("reference count line must have two fields at " +
                             at_line(path, i + 1));
        Emotion label;
        if (!try_emotion_from_string(trim(fields[0]), label))
            throw data_error("unknown label '" + fields[0] + "' at " + at_line(path, i + 1));
        const size_t idx = static_cast<size_t>(label);
        if (seen[idx])
            throw data_error("duplicate label '" + fields[0] + "' at " + at_line(path, i + 1));
        seen[idx] = true;
        const long v = parse_long_strict(trim(fields[1]));
        if (v < 0) throw data_error("negative count at " + at_line(path, i + 1));
        counts[idx] = static_cast<int>(v);
    }
    for (size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw data_error(std::string("reference counts missing label '") +
                             to_string(static_cast<Emotion>(i)) + "': " + path);
    return counts;
}

}  // namespace stylelab
