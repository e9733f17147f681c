#include "stylelab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

namespace stylelab {

using nlohmann::json;

std::vector<std::string> load_prompts(const std::string& path) {
    std::vector<std::string> prompts;
    for (const std::string& raw : read_lines(path)) {
        const std::string line(trim(raw));
        if (line.empty()) continue;
        prompts.push_back(line);
    }
    if (prompts.empty()) throw data_error("prompt file has no prompts: " + path);
    return prompts;
}

std::string generate_row(const Model& model, const StyleVectorSet* vectors,
                         const std::string& prompt, int prompt_id,
                         std::optional<Emotion> target, double lambda, uint64_t seed,
                         const DecodeParams& decode, std::vector<std::string>* warnings) {
    DecodeParams dp = decode;
    dp.seed = mix64(seed ^ static_cast<uint64_t>(prompt_id));

    InjectionPlan plan;
    const InjectionPlan* plan_ptr = nullptr;
    if (target.has_value() && lambda != 0.0) {
        if (vectors == nullptr)
            throw argument_error("steered generation requires style vectors");
        plan = make_plan(*vectors, *target, lambda);
        plan_ptr = &plan;
    }
    const GenerateOutput out = model.generate(tokenize(prompt), plan_ptr, dp);
    if (warnings != nullptr)
        warnings->insert(warnings->end(), out.warnings.begin(), out.warnings.end());
    return detokenize(out.generated);
}

ResultsFile run_sweep(const Model& model, const StyleVectorSet& vectors,
                      const std::vector<std::string>& prompts, const SweepOptions& options) {
    if (prompts.empty()) throw argument_error("sweep requires at least one prompt");
    check_compatible(vectors, model);
    std::vector<double> lambdas = options.lambdas;
    if (lambdas.empty()) throw argument_error("sweep requires at least one lambda");
    for (double l : lambdas)
        if (!std::isfinite(l)) throw argument_error("sweep lambdas must be finite");
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

    ResultsFile results;
    results.meta.model_checksum = model.weight_checksum();
    results.meta.vectors_hash = vectors.content_hash();
    results.meta.corpus_hash = vectors.corpus_hash;
    results.meta.pooling = vectors.pooling;
    results.meta.seed = options.seed;
    results.meta.decode = options.decode;
    results.meta.prompts = prompts;
    results.meta.lambdas = lambdas;

    const int total = static_cast<int>(prompts.size()) * kEkmanSix *
                      static_cast<int>(lambdas.size());
    int done = 0;
    for (int p = 0; p < static_cast<int>(prompts.size()); ++p) {
        const int prompt_id = p + 1;
        std::string baseline;  // lambda == 0 continuation, shared by all targets
        bool have_baseline = false;
        for (int t = 0; t < kEkmanSix; ++t) {
            const Emotion target = static_cast<Emotion>(t);
            for (double lambda : lambdas) {
                ResultRow row;
                row.prompt_id = prompt_id;
                row.target = target;
                row.lambda = lambda;
                if (lambda == 0.0) {
                    if (!have_baseline) {
                        baseline = generate_row(model, &vectors, prompts[p], prompt_id,
                                                std::nullopt, 0.0, options.seed,
                                                options.decode, nullptr);
                        have_baseline = true;
                    }
                    row.text = baseline;
                } else {
                    row.text = generate_row(model, &vectors, prompts[p], prompt_id, target,
                                            lambda, options.seed, options.decode, nullptr);
                }
                results.rows.push_back(std::move(row));
                ++done;
                if (options.progress) options.progress(done, total);
            }
        }
    }
    return results;
}

void score_results(ResultsFile& results, Scorer& scorer, Judge& judge,
                   const FunctionWordSet* function_words) {
    for (ResultRow& row : results.rows) {
        row.scores = scorer.score(row.text);
        row.judge_raw = judge.raw_score(row.text);
        row.comprehensibility = normalize_judge(row.judge_raw);
        row.features = compute_features(row.text, function_words);
        row.scored = true;
    }
    results.meta.scorer_name = scorer.name();
    results.meta.judge_name = judge.name();
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kResultsFormat = "stylelab-results";
constexpr int kResultsVersion = 1;
}  // namespace

void save_results(const ResultsFile& results, const std::string& path) {
    std::string out;
    json meta;
    meta["format"] = kResultsFormat;
    meta["version"] = kResultsVersion;
    meta["model_checksum"] = hex64(results.meta.model_checksum);
    meta["vectors_hash"] = hex64(results.meta.vectors_hash);
    meta["corpus_hash"] = hex64(results.meta.corpus_hash);
    meta["pooling"] = to_string(results.meta.pooling);
    meta["seed"] = results.meta.seed;
    meta["decode"] = {{"temperature", results.meta.decode.temperature},
                      {"top_k", results.meta.decode.top_k},
                      {"max_new_tokens", results.meta.decode.max_new_tokens}};
    meta["prompts"] = results.meta.prompts;
    meta["lambdas"] = results.meta.lambdas;
    if (!results.meta.scorer_name.empty()) {
        meta["scorer"] = results.meta.scorer_name;
        meta["judge"] = results.meta.judge_name;
    }
    out += meta.dump();
    out.push_back('\n');
    for (const ResultRow& row : results.rows) {
        json r;
        r["prompt_id"] = row.prompt_id;
        r["target"] = to_string(row.target);
        r["lambda"] = row.lambda;
        r["text"] = bytes_to_json_text(row.text);
        if (row.scored) {
            json scores;
            for (int e = 0; e < kEkmanSix; ++e)
                scores[to_string(static_cast<Emotion>(e))] = row.scores[static_cast<size_t>(e)];
            r["scores"] = scores;
            r["judge_raw"] = row.judge_raw;
            r["comprehensibility"] = row.comprehensibility;
            r["features"] = {{"byte_count", row.features.byte_count},
                             {"word_count", row.features.word_count},
                             {"unique_word_count", row.features.unique_word_count},
                             {"ttr", row.features.ttr},
                             {"adjacent_repetition", row.features.adjacent_repetition},
                             {"lexical_density", row.features.lexical_density},
                             {"mean_word_length", row.features.mean_word_length},
                             {"entropy_bits", row.features.entropy_bits}};
        }
        out += r.dump();
        out.push_back('\n');
    }
    write_text_file(path, out);
}

ResultsFile load_results(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw data_error("results file is empty: " + path);
    ResultsFile results;
    try {
        const json meta = json::parse(lines[0]);
        if (meta.at("format").get<std::string>() != kResultsFormat)
            throw data_error("not a results file: " + path);
        if (meta.at("version").get<int>() != kResultsVersion)
            throw data_error("unsupported results version in " + path);
        results.meta.model_checksum = parse_hex64(meta.at("model_checksum").get<std::string>());
        results.meta.vectors_hash = parse_hex64(meta.at("vectors_hash").get<std::string>());
        results.meta.corpus_hash = parse_hex64(meta.at("corpus_hash").get<std::string>());
        results.meta.pooling = pooling_from_string(meta.at("pooling").get<std::string>());
        results.meta.seed = meta.at("seed").get<uint64_t>();
        results.meta.decode.temperature = meta.at("decode").at("temperature").get<double>();
        results.meta.decode.top_k = meta.at("decode").at("top_k").get<int>();
        results.meta.decode.max_new_tokens = meta.at("decode").at("max_new_tokens").get<int>();
        results.meta.prompts = meta.at("prompts").get<std::vector<std::string>>();
        results.meta.lambdas = meta.at("lambdas").get<std::vector<double>>();
        if (meta.contains("scorer")) {
            results.meta.scorer_name = meta.at("scorer").get<std::string>();
            results.meta.judge_name = meta.at("judge").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw data_error("malformed results meta line in " + path + ": " + e.what());
    }
    for (size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        try {
            const json r = json::parse(lines[i]);
            ResultRow row;
            row.prompt_id = r.at("prompt_id").get<int>();
            row.target = emotion_from_string(r.at("target").get<std::string>());
            row.lambda = r.at("lambda").get<double>();
            row.text = json_text_to_bytes(r.at("text").get<std::string>());
            if (r.contains("scores")) {
                for (int e = 0; e < kEkmanSix; ++e)
                    row.scores[static_cast<size_t>(e)] =
                        r.at("scores").at(to_string(static_cast<Emotion>(e))).get<double>();
                row.judge_raw = r.at("judge_raw").get<double>();
                row.comprehensibility = r.at("comprehensibility").get<double>();
                const json& f = r.at("features");
                row.features.byte_count = f.at("byte_count").get<int>();
                row.features.word_count = f.at("word_count").get<int>();
                row.features.unique_word_count = f.at("unique_word_count").get<int>();
                row.features.ttr = f.at("ttr").get<double>();
                row.features.adjacent_repetition = f.at("adjacent_repetition").get<double>();
                row.features.lexical_density = f.at("lexical_density").get<double>();
                row.features.mean_word_length = f.at("mean_word_length").get<double>();
                row.features.entropy_bits = f.at("entropy_bits").get<double>();
                row.scored = true;
            }
            if (row.prompt_id < 1 ||
                row.prompt_id > static_cast<int>(results.meta.prompts.size()))
                throw data_error("row prompt_id " + std::to_string(row.prompt_id) +
                                 " is out of range");
            if (static_cast<int>(row.target) >= kEkmanSix)
                throw data_error("row target must be one of the six emotions");
            results.rows.push_back(std::move(row));
        } catch (const json::exception& e) {
            throw data_error("malformed results row at " + path + ":" +
                             std::to_string(i + 1) + ": " + e.what());
        } catch (const data_error& e) {
            throw data_error(std::string(e.what()) + " at " + path + ":" +
                             std::to_string(i + 1));
        }
    }
    if (results.rows.empty()) throw data_error("results file has no rows: " + path);
    return results;
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

SweepCurves curves_from_results(const ResultsFile& results) {
    SweepCurves curves;
    std::array<std::array<int, kGridSize>, kEkmanSix> counts{};
    std::array<std::array<std::array<double, kGridSize>, kRatingDimCount>, kEkmanSix> sums{};
    std::array<std::array<double, kGridSize>, kEkmanSix> judge_sum{}, ttr_sum{}, dens_sum{},
        mwl_sum{}, ent_sum{};

    for (const ResultRow& row : results.rows) {
        if (!row.scored)
            throw data_error("results are not scored yet; run the score stage first");
        const int li = lambda_grid_index(row.lambda);
        if (li < 0)
            throw data_error("result row lambda " + format_double(row.lambda) +
                             " is not on the default grid");
        const size_t t = static_cast<size_t>(row.target);
        for (int e = 0; e < kEkmanSix; ++e)
            sums[t][static_cast<size_t>(e)][static_cast<size_t>(li)] +=
                row.scores[static_cast<size_t>(e)];
        sums[t][kEkmanSix][static_cast<size_t>(li)] += row.comprehensibility;
        judge_sum[t][static_cast<size_t>(li)] += row.judge_raw;
        ttr_sum[t][static_cast<size_t>(li)] += row.features.ttr;
        dens_sum[t][static_cast<size_t>(li)] += row.features.lexical_density;
        mwl_sum[t][static_cast<size_t>(li)] += row.features.mean_word_length;
        ent_sum[t][static_cast<size_t>(li)] += row.features.entropy_bits;
        counts[t][static_cast<size_t>(li)] += 1;
    }
    for (int t = 0; t < kEkmanSix; ++t)
        for (size_t li = 0; li < kGridSize; ++li) {
            const int c = counts[t][li];
            if (c == 0)
                throw data_error(std::string("no rows for target '") +
                                 to_string(static_cast<Emotion>(t)) + "' at lambda " +
                                 format_double(kLambdaGrid[li]));
            for (int d = 0; d < kRatingDimCount; ++d)
                curves.values[t][static_cast<size_t>(d)][li] =
                    sums[t][static_cast<size_t>(d)][li] / c;
            curves.judge_raw[t][li] = judge_sum[t][li] / c;
            curves.ttr[t][li] = ttr_sum[t][li] / c;
            curves.lexical_density[t][li] = dens_sum[t][li] / c;
            curves.mean_word_length[t][li] = mwl_sum[t][li] / c;
            curves.entropy_bits[t][li] = ent_sum[t][li] / c;
        }
    return curves;
}

// ---------------------------------------------------------------------------
// ratings
// ---------------------------------------------------------------------------

namespace {

// parses one data row; returns false with a message on any rule violation
bool parse_rating_row(const std::vector<std::string>& fields, int prompt_count,
                      RatingRecord& rec, std::string& message) {
    if (fields.size() != 4 + kRatingDimCount) {
        message = "expected " + std::to_string(4 + kRatingDimCount) +
                  " comma-separated fields, got " + std::to_string(fields.size());
        return false;
    }
    rec.participant_id = trim(fields[0]);
    if (rec.participant_id.empty()) {
        message = "empty participant_id";
        return false;
    }
    long pid;
    try {
        pid = parse_long_strict(trim(fields[1]));
    } catch (const data_error&) {
        message = "prompt_id is not an integer";
        return false;
    }
    if (pid < 1 || pid > prompt_count) {
        message = "prompt_id " + std::to_string(pid) + " outside [1, " +
                  std::to_string(prompt_count) + "]";
        return false;
    }
    rec.prompt_id = static_cast<int>(pid);
    Emotion target;
    if (!try_emotion_from_string(trim(fields[2]), target) ||
        static_cast<int>(target) >= kEkmanSix) {
        message = "target_emotion must be one of the six emotions";
        return false;
    }
    rec.target = target;
    double lambda;
    try {
        lambda = parse_double_strict(trim(fields[3]));
    } catch (const data_error&) {
        message = "lambda is not a number";
        return false;
    }
    if (lambda_grid_index(lambda) < 0) {
        message = "lambda " + std::string(trim(fields[3])) + " is not on the grid";
        return false;
    }
    rec.lambda = lambda;
    for (int d = 0; d < kRatingDimCount; ++d) {
        const std::string field(trim(fields[static_cast<size_t>(4 + d)]));
        if (field.empty()) {
            rec.values[static_cast<size_t>(d)] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double v;
        try {
            v = parse_double_strict(field);
        } catch (const data_error&) {
            message = std::string(rating_dim_name(d)) + " is not a number";
            return false;
        }
        if (!(v >= 0.0 && v <= 7.0)) {
            message = std::string(rating_dim_name(d)) + " value " + field + " outside [0, 7]";
            return false;
        }
        rec.values[static_cast<size_t>(d)] = v;
    }
    return true;
}

}  // namespace

std::vector<RatingRecord> ingest_ratings(const std::string& path, int prompt_count,
                                         RatingsLoadReport* report) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw data_error("ratings file is empty: " + path);
    if (trim(lines[0]) != kRatingsHeader)
        throw data_error("ratings header must be exactly '" + std::string(kRatingsHeader) +
                         "': " + path);
    RatingsLoadReport local;
    RatingsLoadReport& rep = report != nullptr ? *report : local;
    rep = RatingsLoadReport{};

    std::vector<RatingRecord> records;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        rep.data_lines += 1;
        RatingRecord rec;
        std::string message;
        if (parse_rating_row(split(trim(lines[i]), ','), prompt_count, rec, message)) {
            records.push_back(std::move(rec));
            rep.kept += 1;
        } else {
            rep.row_errors.push_back(path + ":" + std::to_string(i + 1) + ": " + message);
        }
    }
    if (records.empty()) {
        std::string why = "ratings file has no valid data rows: " + path;
        if (!rep.row_errors.empty()) why += " (first error: " + rep.row_errors.front() + ")";
        throw data_error(why);
    }
    return records;
}

std::vector<std::string> participant_ids(const std::vector<RatingRecord>& records) {
    std::set<std::string> ids;
    for (const auto& r : records) ids.insert(r.participant_id);
    return {ids.begin(), ids.end()};
}

std::vector<std::vector<std::vector<double>>> ratings_to_anova_data(
    const std::vector<RatingRecord>& records, int dim) {
    if (dim < 0 || dim >= kRatingDimCount)
        throw argument_error("rating dimension out of range: " + std::to_string(dim));
    const std::vector<std::string> ids = participant_ids(records);
    std::map<std::string, size_t> id_index;
    for (size_t i = 0; i < ids.size(); ++i) id_index[ids[i]] = i;

    std::vector<std::vector<std::vector<double>>> sums(
        ids.size(), std::vector<std::vector<double>>(kEkmanSix,
                                                     std::vector<double>(kGridSize, 0.0)));
    std::vector<std::vector<std::vector<int>>> counts(
        ids.size(),
        std::vector<std::vector<int>>(kEkmanSix, std::vector<int>(kGridSize, 0)));
    for (const auto& rec : records) {
        const double v = rec.values[static_cast<size_t>(dim)];
        if (std::isnan(v))
            throw argument_error("ratings still contain missing values; impute first");
        const size_t s = id_index[rec.participant_id];
        const size_t t = static_cast<size_t>(rec.target);
        const size_t li = static_cast<size_t>(lambda_grid_index(rec.lambda));
        sums[s][t][li] += v;
        counts[s][t][li] += 1;
    }
    for (size_t s = 0; s < ids.size(); ++s)
        for (int t = 0; t < kEkmanSix; ++t)
            for (size_t li = 0; li < kGridSize; ++li) {
                if (counts[s][t][li] == 0)
                    throw data_error("participant '" + ids[s] + "' has no ratings for (" +
                                     to_string(static_cast<Emotion>(t)) + ", lambda=" +
                                     format_double(kLambdaGrid[li]) + ")");
                sums[s][t][li] /= counts[s][t][li];
            }
    return sums;
}

BlockIccSummary ratings_block_icc(const std::vector<RatingRecord>& records, int dim) {
    if (dim < 0 || dim >= kRatingDimCount)
        throw argument_error("rating dimension out of range: " + std::to_string(dim));
    const std::vector<std::string> ids = participant_ids(records);
    std::map<std::string, size_t> id_index;
    for (size_t i = 0; i < ids.size(); ++i) id_index[ids[i]] = i;

    // block key (prompt, target) -> per (lambda, participant) accumulators
    using Block = std::vector<std::vector<std::pair<double, int>>>;  // [lambda][participant]
    std::map<std::pair<int, int>, Block> blocks;
    for (const auto& rec : records) {
        if (dim < kEkmanSix && static_cast<int>(rec.target) != dim)
            continue;  // an emotion's reliability uses only its own target's texts
        const double v = rec.values[static_cast<size_t>(dim)];
        if (std::isnan(v)) continue;  // unrated cells simply do not contribute
        auto& block = blocks[{rec.prompt_id, static_cast<int>(rec.target)}];
        if (block.empty())
            block.assign(kGridSize, std::vector<std::pair<double, int>>(ids.size(), {0.0, 0}));
        auto& cell =
            block[static_cast<size_t>(lambda_grid_index(rec.lambda))][id_index[rec.participant_id]];
        cell.first += v;
        cell.second += 1;
    }

    BlockIccSummary out;
    double sum_single = 0.0, sum_average = 0.0;
    for (const auto& [key, block] : blocks) {
        // raters usable in this block: rated all eight lambda texts
        std::vector<size_t> raters;
        for (size_t r = 0; r < ids.size(); ++r) {
            bool complete = true;
            for (size_t li = 0; li < kGridSize; ++li)
                if (block[li][r].second == 0) complete = false;
            if (complete) raters.push_back(r);
        }
        if (raters.size() < 2) {
            out.blocks_skipped += 1;
            continue;
        }
        std::vector<std::vector<double>> matrix(kGridSize,
                                                std::vector<double>(raters.size(), 0.0));
        for (size_t li = 0; li < kGridSize; ++li)
            for (size_t r = 0; r < raters.size(); ++r) {
                const auto& cell = block[li][raters[r]];
                matrix[li][r] = cell.first / cell.second;
            }
        try {
            const IccResult single = icc_2_1(matrix);
            const IccResult average = icc_2_k(matrix);
            sum_single += single.value;
            sum_average += average.value;
        } catch (const numeric_error&) {
            out.blocks_skipped += 1;  // degenerate variance in this block
            continue;
        }
        out.blocks_used += 1;
        const int k = static_cast<int>(raters.size());
        out.min_raters = out.blocks_used == 1 ? k : std::min(out.min_raters, k);
        out.max_raters = std::max(out.max_raters, k);
    }
    if (out.blocks_used == 0) {
        out.icc_single = std::numeric_limits<double>::quiet_NaN();
        out.icc_average = std::numeric_limits<double>::quiet_NaN();
    } else {
        out.icc_single = sum_single / out.blocks_used;
        out.icc_average = sum_average / out.blocks_used;
    }
    return out;
}

namespace {

// two-pass mean/SD so summaries are permutation-invariant and stable
struct CellAccumulator {
    std::array<std::vector<double>, kRatingDimCount> samples;

    void add(int dim, double v) { samples[static_cast<size_t>(dim)].push_back(v); }

    void finish(CellSummary& cell) const {
        for (int d = 0; d < kRatingDimCount; ++d) {
            const auto& xs = samples[static_cast<size_t>(d)];
            auto& n = cell.n[static_cast<size_t>(d)];
            n = static_cast<int>(xs.size());
            if (n == 0) {
                cell.mean[static_cast<size_t>(d)] = std::numeric_limits<double>::quiet_NaN();
                cell.sd[static_cast<size_t>(d)] = 0.0;
                continue;
            }
            double m = 0.0;
            for (double v : xs) m += v;
            m /= n;
            cell.mean[static_cast<size_t>(d)] = m;
            if (n < 2) {
                cell.sd[static_cast<size_t>(d)] = 0.0;
                continue;
            }
            double acc = 0.0;
            for (double v : xs) acc += (v - m) * (v - m);
            cell.sd[static_cast<size_t>(d)] = std::sqrt(acc / (n - 1));
        }
    }
};

SummaryTable finish_summary(
    std::array<std::array<CellAccumulator, kGridSize>, kEkmanSix>& acc,
    const std::array<std::array<int, kGridSize>, kEkmanSix>& records) {
    SummaryTable table;
    for (int t = 0; t < kEkmanSix; ++t)
        for (size_t li = 0; li < kGridSize; ++li) {
            CellSummary& cell = table.cells[static_cast<size_t>(t)][li];
            cell.records = records[static_cast<size_t>(t)][li];
            if (cell.records == 0) {
                table.has_empty_cells = true;
                continue;
            }
            acc[static_cast<size_t>(t)][li].finish(cell);
        }
    return table;
}

}  // namespace

SummaryTable summarize(const std::vector<RatingRecord>& records) {
    if (records.empty()) throw argument_error("summarize needs at least one record");
    std::array<std::array<CellAccumulator, kGridSize>, kEkmanSix> acc;
    std::array<std::array<int, kGridSize>, kEkmanSix> counts{};
    for (const auto& rec : records) {
        const size_t t = static_cast<size_t>(rec.target);
        const size_t li = static_cast<size_t>(lambda_grid_index(rec.lambda));
        counts[t][li] += 1;
        for (int d = 0; d < kRatingDimCount; ++d)
            if (rec.has(d)) acc[t][li].add(d, rec.values[static_cast<size_t>(d)]);
    }
    return finish_summary(acc, counts);
}

SummaryTable summarize(const ResultsFile& results) {
    if (results.rows.empty()) throw argument_error("summarize needs at least one row");
    std::array<std::array<CellAccumulator, kGridSize>, kEkmanSix> acc;
    std::array<std::array<int, kGridSize>, kEkmanSix> counts{};
    for (const ResultRow& row : results.rows) {
        if (!row.scored)
            throw data_error("results are not scored yet; run the score stage first");
        const int li = lambda_grid_index(row.lambda);
        if (li < 0)
            throw data_error("result row lambda " + format_double(row.lambda) +
                             " is not on the default grid");
        const size_t t = static_cast<size_t>(row.target);
        counts[t][static_cast<size_t>(li)] += 1;
        for (int e = 0; e < kEkmanSix; ++e)
            acc[t][static_cast<size_t>(li)].add(e, row.scores[static_cast<size_t>(e)]);
        acc[t][static_cast<size_t>(li)].add(kEkmanSix, row.comprehensibility);
    }
    return finish_summary(acc, counts);
}

AlignmentResult align_human_model(const std::array<Curve, kEkmanSix>& human,
                                  const std::array<Curve, kEkmanSix>& model) {
    AlignmentResult out;
    double sum = 0.0;
    bool all = true;
    for (int e = 0; e < kEkmanSix; ++e) {
        EmotionAlignment& a = out.per_emotion[static_cast<size_t>(e)];
        try {
            a.r = pearson(human[static_cast<size_t>(e)], model[static_cast<size_t>(e)]);
            a.defined = true;
            sum += a.r;
        } catch (const numeric_error& err) {
            a.defined = false;
            a.r = std::numeric_limits<double>::quiet_NaN();
            a.error = err.what();
            all = false;
        }
    }
    out.all_defined = all;
    out.mean_r = all ? sum / kEkmanSix : std::numeric_limits<double>::quiet_NaN();
    return out;
}

std::array<std::array<Curve, kRatingDimCount>, kEkmanSix> mean_rating_curves(
    const std::vector<RatingRecord>& records) {
    std::array<std::array<Curve, kRatingDimCount>, kEkmanSix> means{};
    std::array<std::array<std::array<int, kGridSize>, kRatingDimCount>, kEkmanSix> counts{};
    for (const auto& rec : records) {
        const size_t t = static_cast<size_t>(rec.target);
        const size_t li = static_cast<size_t>(lambda_grid_index(rec.lambda));
        for (int d = 0; d < kRatingDimCount; ++d) {
            const double v = rec.values[static_cast<size_t>(d)];
            if (std::isnan(v)) continue;
            means[t][static_cast<size_t>(d)][li] += v;
            counts[t][static_cast<size_t>(d)][li] += 1;
        }
    }
    for (int t = 0; t < kEkmanSix; ++t)
        for (size_t d = 0; d < kRatingDimCount; ++d)
            for (size_t li = 0; li < kGridSize; ++li) {
                if (counts[t][d][li] == 0)
                    throw data_error(std::string("no observed ratings for (") +
                                     to_string(static_cast<Emotion>(t)) + ", " +
                                     rating_dim_name(static_cast<int>(d)) + ", lambda=" +
                                     format_double(kLambdaGrid[li]) + ")");
                means[t][d][li] /= counts[t][d][li];
            }
    return means;
}

}  // namespace stylelab
