#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stylelab/eval.hpp"
#include "stylelab/model.hpp"
#include "stylelab/stats.hpp"
#include "stylelab/steering.hpp"

namespace stylelab {

inline constexpr size_t kGridSize = kLambdaGrid.size();

// ---------------------------------------------------------------------------
// sweep results
// ---------------------------------------------------------------------------

struct ResultRow {
    int prompt_id = 0;  // 1-based index into the prompt list
    Emotion target = Emotion::anger;
    double lambda = 0.0;
    std::string text;  // generated continuation only

    bool scored = false;
    EmotionScores scores{};
    double judge_raw = 0.0;
    double comprehensibility = 0.0;
    TextFeatures features;
};

struct SweepMeta {
    uint64_t model_checksum = 0;
    uint64_t vectors_hash = 0;
    uint64_t corpus_hash = 0;
    PoolingMode pooling = PoolingMode::mean_all_positions;
    uint64_t seed = 0;
    DecodeParams decode;
    std::vector<std::string> prompts;
    std::vector<double> lambdas;
    std::string scorer_name;  // empty until scored
    std::string judge_name;
};

struct ResultsFile {
    SweepMeta meta;
    std::vector<ResultRow> rows;
};

// prompt file: one prompt per non-blank line, order defines prompt ids
std::vector<std::string> load_prompts(const std::string& path);

struct SweepOptions {
    uint64_t seed = 42;
    DecodeParams decode;  // seed field is ignored; per-prompt seeds are derived
    std::vector<double> lambdas{kLambdaGrid.begin(), kLambdaGrid.end()};
    std::function<void(int done, int total)> progress;  // optional
};

// Runs the full grid: every prompt x six targets x lambda grid, rows in
// canonical order (prompt asc, target enum order, lambda asc). The lambda=0
// text is generated once per prompt without a plan and shared by all six
// targets. The decode seed for every generation of prompt p is
// mix64(seed ^ p), so rows differ only through the injected vector.
ResultsFile run_sweep(const Model& model, const StyleVectorSet& vectors,
                      const std::vector<std::string>& prompts, const SweepOptions& options);

// single generation with the same seed derivation as the sweep
std::string generate_row(const Model& model, const StyleVectorSet* vectors,
                         const std::string& prompt, int prompt_id,
                         std::optional<Emotion> target, double lambda, uint64_t seed,
                         const DecodeParams& decode,
                         std::vector<std::string>* warnings = nullptr);

// fills scores, judge values, and features for every row
void score_results(ResultsFile& results, Scorer& scorer, Judge& judge,
                   const FunctionWordSet* function_words);

// JSON-lines serialization: meta object first, one row object per line
void save_results(const ResultsFile& results, const std::string& path);
ResultsFile load_results(const std::string& path);

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

using Curve = std::array<double, kGridSize>;

struct SweepCurves {
    // mean over prompts at each lambda; dim 0..5 = emotion scores,
    // dim 6 = normalized comprehensibility
    std::array<std::array<Curve, kRatingDimCount>, kEkmanSix> values{};
    std::array<Curve, kEkmanSix> judge_raw{};
    std::array<Curve, kEkmanSix> ttr{};
    std::array<Curve, kEkmanSix> lexical_density{};
    std::array<Curve, kEkmanSix> mean_word_length{};
    std::array<Curve, kEkmanSix> entropy_bits{};
};

// requires a fully scored results file on the default lambda grid
SweepCurves curves_from_results(const ResultsFile& results);

// ---------------------------------------------------------------------------
// human ratings
// ---------------------------------------------------------------------------

inline constexpr const char* kRatingsHeader =
    "participant_id,prompt_id,target_emotion,lambda,anger,disgust,fear,joy,sadness,"
    "surprise,comprehensibility";

struct RatingsLoadReport {
    int data_lines = 0;
    int kept = 0;
    std::vector<std::string> row_errors;  // "path:line: message" per rejected row
};

// CSV ingestion. Empty numeric fields become NaN (missing). Values must lie
// in [0, 7], lambdas on the grid, targets among the six emotions, prompt ids
// in [1, prompt_count]. A row that breaks a rule is rejected and recorded in
// the report; loading continues. Missing/garbled header, unreadable file, or
// zero surviving rows are fatal (data_error).
std::vector<RatingRecord> ingest_ratings(const std::string& path, int prompt_count,
                                         RatingsLoadReport* report = nullptr);

// [subject][target][lambda] cell means for one dimension; every subject must
// cover every cell (impute first), subjects ordered by participant id
std::vector<std::vector<std::vector<double>>> ratings_to_anova_data(
    const std::vector<RatingRecord>& records, int dim);

// mean over participants and prompts, [target][dim][lambda]; a cell with no
// observations throws data_error
std::array<std::array<Curve, kRatingDimCount>, kEkmanSix> mean_rating_curves(
    const std::vector<RatingRecord>& records);

std::vector<std::string> participant_ids(const std::vector<RatingRecord>& records);

// ---------------------------------------------------------------------------
// summaries, reliability, and human/model alignment
// ---------------------------------------------------------------------------

struct CellSummary {
    int records = 0;                       // rows/records in the (target, lambda) group
    std::array<int, kRatingDimCount> n{};  // observed values per dimension
    std::array<double, kRatingDimCount> mean{};  // NaN where n == 0
    std::array<double, kRatingDimCount> sd{};    // sample SD; 0 where n < 2
};

struct SummaryTable {
    // [target][lambda index]; a cell with records == 0 is an omitted group
    std::array<std::array<CellSummary, kGridSize>, kEkmanSix> cells{};
    bool has_empty_cells = false;
};

// mean/SD per (target, lambda) cell; dimensions are the six emotion
// intensities plus comprehensibility
SummaryTable summarize(const std::vector<RatingRecord>& records);
SummaryTable summarize(const ResultsFile& results);  // requires scored rows

// Reliability of one rated dimension, computed per (prompt x target) block
// (rows = the 8 lambda texts, columns = raters with all 8 rows) and averaged
// across blocks. Emotion dimensions use only their own target's blocks;
// comprehensibility uses every (prompt x target) block. Blocks with fewer
// than two complete raters or with degenerate variance are skipped.
struct BlockIccSummary {
    double icc_single = 0.0;   // mean ICC(2,1) over used blocks; NaN when none
    double icc_average = 0.0;  // mean ICC(2,k) over used blocks; NaN when none
    int blocks_used = 0;
    int blocks_skipped = 0;
    int min_raters = 0;  // over used blocks
    int max_raters = 0;
};

BlockIccSummary ratings_block_icc(const std::vector<RatingRecord>& records, int dim);

// Per-emotion Pearson r between an 8-point human curve and the matching
// model curve, plus the unweighted mean across the six emotions. A constant
// series makes that emotion's r undefined; the error text is kept and the
// mean is NaN unless all six are defined.
struct EmotionAlignment {
    bool defined = false;
    double r = 0.0;
    std::string error;
};

struct AlignmentResult {
    std::array<EmotionAlignment, kEkmanSix> per_emotion{};
    double mean_r = 0.0;
    bool all_defined = false;
};

AlignmentResult align_human_model(const std::array<Curve, kEkmanSix>& human,
                                  const std::array<Curve, kEkmanSix>& model);

}  // namespace stylelab
