#pragma once

#include <string>
#include <vector>

#include "stylelab/harness.hpp"

namespace stylelab {

// ---------------------------------------------------------------------------
// deterministic SVG figures plus markdown / CSV tables
// ---------------------------------------------------------------------------

class SvgLinePlot {
  public:
    SvgLinePlot(std::string title, std::string x_label, std::string y_label);

    // When sds is non-empty it must match ys; the series is drawn with a
    // shaded band covering ys[i] +/- sds[i].
    void add_series(std::string name, std::vector<double> xs, std::vector<double> ys,
                    std::vector<double> sds = {});
    std::string render() const;  // standalone <svg> document

  private:
    struct Series {
        std::string name;
        std::vector<double> xs, ys, sds;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

// Color-matrix figure: values[r][c] shaded on a linear [vmin, vmax] ramp with
// the numeric value printed in each cell. Throws argument_error on ragged
// rows, label/shape mismatch, or vmax <= vmin.
std::string render_heatmap(const std::string& title,
                           const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels,
                           const std::vector<std::vector<double>>& values,
                           double vmin, double vmax);

// machine-readable tables
std::string summary_csv(const SummaryTable& table);
std::string alignment_csv(const AlignmentResult& alignment);

struct ReportOutput {
    std::vector<std::string> files;  // paths written, in order
    std::vector<std::string> warnings;
};

// Renders score curves (+/- 1 SD over prompts), per-target feature curves
// scaled to their maxima, a target x rated-dimension heatmap at
// heatmap_lambda, CSV tables, and a markdown summary into out_dir (created
// if needed). When ratings are given, adds human-rating curves with SD
// bands, human-vs-model overlays, and the per-emotion correlation table.
// The results file must be scored and on the default lambda grid;
// heatmap_lambda must sit on the grid.
ReportOutput write_report(const ResultsFile& results,
                          const std::vector<RatingRecord>* ratings,
                          const std::string& out_dir, double heatmap_lambda = 0.20);

// text fragments, exposed for tests and the stats command
std::string markdown_sweep_summary(const ResultsFile& results, const SweepCurves& curves);
std::string render_anova_text(const RmAnovaResult& r);
std::string render_icc_text(const IccResult& single, const IccResult& average);
std::string render_block_icc_text(const BlockIccSummary& s);

}  // namespace stylelab
