#include "stylelab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>

namespace stylelab {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

SvgLinePlot::SvgLinePlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgLinePlot::add_series(std::string name, std::vector<double> xs,
                             std::vector<double> ys, std::vector<double> sds) {
    if (xs.size() != ys.size() || xs.empty())
        throw argument_error("plot series needs matching non-empty x and y");
    if (!sds.empty() && sds.size() != ys.size())
        throw argument_error("plot series band must match the y series");
    for (double v : xs)
        if (!std::isfinite(v)) throw argument_error("plot series x values must be finite");
    for (double v : ys)
        if (!std::isfinite(v)) throw argument_error("plot series y values must be finite");
    for (double v : sds)
        if (!std::isfinite(v) || v < 0.0)
            throw argument_error("plot series band values must be finite and non-negative");
    series_.push_back(Series{std::move(name), std::move(xs), std::move(ys), std::move(sds)});
}

std::string SvgLinePlot::render() const {
    if (series_.empty()) throw argument_error("plot has no series");
    constexpr double kW = 720, kH = 480;
    constexpr double kL = 64, kR = 178, kT = 44, kB = 52;
    double xmin = series_[0].xs[0], xmax = xmin;
    double ymin = series_[0].ys[0], ymax = ymin;
    for (const Series& s : series_) {
        for (double v : s.xs) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (size_t i = 0; i < s.ys.size(); ++i) {
            const double sd = s.sds.empty() ? 0.0 : s.sds[i];
            ymin = std::min(ymin, s.ys[i] - sd);
            ymax = std::max(ymax, s.ys[i] + sd);
        }
    }
    if (xmax == xmin) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if (ymax == ymin) {
        ymin -= 1.0;
        ymax += 1.0;
    } else {
        const double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }
    const double plot_w = kW - kL - kR;
    const double plot_h = kH - kT - kB;
    auto px = [&](double x) { return kL + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) { return (kH - kB) - (y - ymin) / (ymax - ymin) * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\">\n";
    svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    svg += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + xml_escape(title_) + "</text>\n";

    // grid and ticks
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + i * (xmax - xmin) / 4.0;
        const double yv = ymin + i * (ymax - ymin) / 4.0;
        const std::string gx = fmt("%.2f", px(xv));
        const std::string gy = fmt("%.2f", py(yv));
        svg += "<line x1=\"" + gx + "\" y1=\"" + fmt("%.2f", kT) + "\" x2=\"" + gx +
               "\" y2=\"" + fmt("%.2f", kH - kB) + "\" stroke=\"#dddddd\"/>\n";
        svg += "<line x1=\"" + fmt("%.2f", kL) + "\" y1=\"" + gy + "\" x2=\"" +
               fmt("%.2f", kW - kR) + "\" y2=\"" + gy + "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + gx + "\" y=\"" + fmt("%.2f", kH - kB + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt("%.4g", xv) + "</text>\n";
        svg += "<text x=\"" + fmt("%.2f", kL - 8) + "\" y=\"" + gy +
               "\" text-anchor=\"end\" dominant-baseline=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"11\">" + fmt("%.4g", yv) +
               "</text>\n";
    }
    // axes
    svg += "<line x1=\"" + fmt("%.2f", kL) + "\" y1=\"" + fmt("%.2f", kT) + "\" x2=\"" +
           fmt("%.2f", kL) + "\" y2=\"" + fmt("%.2f", kH - kB) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt("%.2f", kL) + "\" y1=\"" + fmt("%.2f", kH - kB) +
           "\" x2=\"" + fmt("%.2f", kW - kR) + "\" y2=\"" + fmt("%.2f", kH - kB) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", kL + plot_w / 2) + "\" y=\"" + fmt("%.2f", kH - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           xml_escape(x_label_) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt("%.2f", kT + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + fmt("%.2f", kT + plot_h / 2) + ")\">" +
           xml_escape(y_label_) + "</text>\n";

    // +/- 1 SD bands first so every line stays visible on top of them
    for (size_t si = 0; si < series_.size(); ++si) {
        const Series& s = series_[si];
        if (s.sds.empty()) continue;
        const char* color = kPalette[si % kPaletteSize];
        std::string points;
        for (size_t i = 0; i < s.xs.size(); ++i) {
            if (i > 0) points.push_back(' ');
            points += fmt("%.2f", px(s.xs[i])) + "," + fmt("%.2f", py(s.ys[i] + s.sds[i]));
        }
        for (size_t i = s.xs.size(); i-- > 0;) {
            points.push_back(' ');
            points += fmt("%.2f", px(s.xs[i])) + "," + fmt("%.2f", py(s.ys[i] - s.sds[i]));
        }
        svg += "<polygon fill=\"" + std::string(color) +
               "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"" + points + "\"/>\n";
    }

    // series
    for (size_t si = 0; si < series_.size(); ++si) {
        const Series& s = series_[si];
        const char* color = kPalette[si % kPaletteSize];
        std::string points;
        for (size_t i = 0; i < s.xs.size(); ++i) {
            if (i > 0) points.push_back(' ');
            points += fmt("%.2f", px(s.xs[i])) + "," + fmt("%.2f", py(s.ys[i]));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
        for (size_t i = 0; i < s.xs.size(); ++i)
            svg += "<circle cx=\"" + fmt("%.2f", px(s.xs[i])) + "\" cy=\"" +
                   fmt("%.2f", py(s.ys[i])) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
        // legend entry
        const double ly = kT + 14 + 18 * static_cast<double>(si);
        svg += "<line x1=\"" + fmt("%.2f", kW - kR + 10) + "\" y1=\"" + fmt("%.2f", ly) +
               "\" x2=\"" + fmt("%.2f", kW - kR + 34) + "\" y2=\"" + fmt("%.2f", ly) +
               "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt("%.2f", kW - kR + 40) + "\" y=\"" + fmt("%.2f", ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(s.name) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

// ---------------------------------------------------------------------------
// heatmap
// ---------------------------------------------------------------------------

std::string render_heatmap(const std::string& title,
                           const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels,
                           const std::vector<std::vector<double>>& values,
                           double vmin, double vmax) {
    if (row_labels.empty() || col_labels.empty())
        throw argument_error("heatmap needs at least one row and one column");
    if (values.size() != row_labels.size())
        throw argument_error("heatmap values must have one row per row label");
    for (const auto& row : values)
        if (row.size() != col_labels.size())
            throw argument_error("heatmap rows must match the column labels");
    if (!(vmax > vmin)) throw argument_error("heatmap scale needs vmax > vmin");
    for (const auto& row : values)
        for (double v : row)
            if (!std::isfinite(v)) throw argument_error("heatmap values must be finite");

    constexpr double kCellW = 86, kCellH = 46, kLeft = 132, kTop = 70;
    const double grid_w = kCellW * static_cast<double>(col_labels.size());
    const double grid_h = kCellH * static_cast<double>(row_labels.size());
    const double w = kLeft + grid_w + 24;
    const double h = kTop + grid_h + 28;

    auto ramp = [&](double v) {
        double t = (v - vmin) / (vmax - vmin);
        t = std::clamp(t, 0.0, 1.0);
        // light grey to deep red
        const int r = static_cast<int>(std::lround(247 + t * (178 - 247)));
        const int g = static_cast<int>(std::lround(247 + t * (24 - 247)));
        const int b = static_cast<int>(std::lround(247 + t * (43 - 247)));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", w) +
           "\" height=\"" + fmt("%.0f", h) + "\" viewBox=\"0 0 " + fmt("%.0f", w) + " " +
           fmt("%.0f", h) + "\">\n";
    svg += "<rect width=\"" + fmt("%.0f", w) + "\" height=\"" + fmt("%.0f", h) +
           "\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", w / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + xml_escape(title) + "</text>\n";
    for (size_t c = 0; c < col_labels.size(); ++c)
        svg += "<text x=\"" + fmt("%.1f", kLeft + kCellW * (static_cast<double>(c) + 0.5)) +
               "\" y=\"" + fmt("%.1f", kTop - 10) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               xml_escape(col_labels[c]) + "</text>\n";
    for (size_t r = 0; r < row_labels.size(); ++r)
        svg += "<text x=\"" + fmt("%.1f", kLeft - 10) + "\" y=\"" +
               fmt("%.1f", kTop + kCellH * (static_cast<double>(r) + 0.5) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               xml_escape(row_labels[r]) + "</text>\n";
    for (size_t r = 0; r < row_labels.size(); ++r)
        for (size_t c = 0; c < col_labels.size(); ++c) {
            const double v = values[r][c];
            const double x = kLeft + kCellW * static_cast<double>(c);
            const double y = kTop + kCellH * static_cast<double>(r);
            const double t = std::clamp((v - vmin) / (vmax - vmin), 0.0, 1.0);
            svg += "<rect x=\"" + fmt("%.1f", x) + "\" y=\"" + fmt("%.1f", y) +
                   "\" width=\"" + fmt("%.1f", kCellW) + "\" height=\"" +
                   fmt("%.1f", kCellH) + "\" fill=\"" + ramp(v) +
                   "\" stroke=\"#999999\"/>\n";
            svg += "<text x=\"" + fmt("%.1f", x + kCellW / 2) + "\" y=\"" +
                   fmt("%.1f", y + kCellH / 2 + 4) +
                   "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
                   "fill=\"" + (t > 0.6 ? std::string("white") : std::string("black")) +
                   "\">" + fmt("%.2f", v) + "</text>\n";
        }
    svg += "</svg>\n";
    return svg;
}

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

std::string summary_csv(const SummaryTable& table) {
    std::string csv = "target,lambda,records";
    for (int d = 0; d < kRatingDimCount; ++d) {
        csv += std::string(",") + rating_dim_name(d) + "_mean";
        csv += std::string(",") + rating_dim_name(d) + "_sd";
    }
    csv.push_back('\n');
    for (int t = 0; t < kEkmanSix; ++t)
        for (size_t li = 0; li < kGridSize; ++li) {
            const CellSummary& cell = table.cells[static_cast<size_t>(t)][li];
            if (cell.records == 0) continue;  // omitted empty group
            csv += std::string(to_string(static_cast<Emotion>(t))) + "," +
                   fmt("%.2f", kLambdaGrid[li]) + "," + std::to_string(cell.records);
            for (int d = 0; d < kRatingDimCount; ++d) {
                const size_t ds = static_cast<size_t>(d);
                if (cell.n[ds] == 0) {
                    csv += ",,";  // dimension never observed in this cell
                    continue;
                }
                csv += "," + format_double(cell.mean[ds]);
                csv += "," + format_double(cell.sd[ds]);
            }
            csv.push_back('\n');
        }
    return csv;
}

std::string alignment_csv(const AlignmentResult& alignment) {
    std::string csv = "emotion,r,defined,error\n";
    for (int e = 0; e < kEkmanSix; ++e) {
        const EmotionAlignment& a = alignment.per_emotion[static_cast<size_t>(e)];
        csv += std::string(to_string(static_cast<Emotion>(e))) + ",";
        csv += a.defined ? format_double(a.r) : std::string();
        csv += a.defined ? ",yes," : ",no,";
        csv += escape_field(a.error);
        csv.push_back('\n');
    }
    csv += "mean,";
    csv += alignment.all_defined ? format_double(alignment.mean_r) : std::string();
    csv += alignment.all_defined ? ",yes,\n" : ",no,\n";
    return csv;
}

// ---------------------------------------------------------------------------
// markdown and text tables
// ---------------------------------------------------------------------------

std::string markdown_sweep_summary(const ResultsFile& results, const SweepCurves& curves) {
    std::string md;
    md += "# Sweep summary\n\n";
    md += "- prompts: " + std::to_string(results.meta.prompts.size()) + "\n";
    md += "- rows: " + std::to_string(results.rows.size()) + "\n";
    md += "- model checksum: `" + hex64(results.meta.model_checksum) + "`\n";
    md += "- vectors hash: `" + hex64(results.meta.vectors_hash) + "`\n";
    md += "- seed: " + std::to_string(results.meta.seed) + "\n";
    if (!results.meta.scorer_name.empty())
        md += "- scorer: " + results.meta.scorer_name + ", judge: " +
              results.meta.judge_name + "\n";
    md += "\n## Mean curves by target\n";
    for (int t = 0; t < kEkmanSix; ++t) {
        md += std::string("\n### ") + to_string(static_cast<Emotion>(t)) + "\n\n";
        md += "| lambda |";
        for (int d = 0; d < kEkmanSix; ++d)
            md += std::string(" ") + to_string(static_cast<Emotion>(d)) + " |";
        md += " compr | judge raw | ttr | density | word len | entropy |\n";
        md += "|---|";
        for (int d = 0; d < kEkmanSix + 6; ++d) md += "---|";
        md += "\n";
        for (size_t li = 0; li < kGridSize; ++li) {
            md += "| " + fmt("%.2f", kLambdaGrid[li]) + " |";
            for (int d = 0; d < kEkmanSix; ++d)
                md += " " + fmt("%.4f", curves.values[static_cast<size_t>(t)]
                                               [static_cast<size_t>(d)][li]) + " |";
            md += " " + fmt("%.4f", curves.values[static_cast<size_t>(t)][kEkmanSix][li]) + " |";
            md += " " + fmt("%.3f", curves.judge_raw[static_cast<size_t>(t)][li]) + " |";
            md += " " + fmt("%.3f", curves.ttr[static_cast<size_t>(t)][li]) + " |";
            md += " " + fmt("%.3f", curves.lexical_density[static_cast<size_t>(t)][li]) + " |";
            md += " " + fmt("%.3f", curves.mean_word_length[static_cast<size_t>(t)][li]) + " |";
            md += " " + fmt("%.3f", curves.entropy_bits[static_cast<size_t>(t)][li]) + " |\n";
        }
    }
    return md;
}

std::string render_anova_text(const RmAnovaResult& r) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "subjects=%d, %s levels=%d, %s levels=%d, grand mean=%.4f\n",
                  r.n_subjects, r.a.name.c_str(), r.levels_a, r.b.name.c_str(), r.levels_b,
                  r.grand_mean);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-18s %12s %8s %12s %10s %12s %8s %8s %12s %10s %12s\n",
                  "effect", "SS", "df", "F", "p", "partial_eta2", "GG_eps", "GG_df",
                  "GG_p", "Mauchly_W", "Mauchly_p");
    out += buf;
    for (const AnovaEffect* e : {&r.a, &r.b, &r.ab}) {
        std::string w = fmt("%.4f", e->mauchly.w);
        std::string wp = fmt("%.4g", e->mauchly.p);
        if (e->mauchly.degenerate) {
            w += "*";  // singular transformed covariance, W forced to 0
            wp = "n/a";
        }
        std::snprintf(buf, sizeof buf,
                      "%-18s %12.4f %8.4g %12.4f %10.4g %12.4f %8.4f %8.3f %12.4g %10s %12s\n",
                      e->name.c_str(), e->ss, e->df, e->f, e->p, e->partial_eta_sq,
                      e->epsilon, e->df_gg, e->p_gg, w.c_str(), wp.c_str());
        out += buf;
    }
    if (r.a.mauchly.degenerate || r.b.mauchly.degenerate || r.ab.mauchly.degenerate)
        out += "* singular transformed covariance; Mauchly W reported as 0\n";
    return out;
}

std::string render_icc_text(const IccResult& single, const IccResult& average) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "ICC(2,1)=%.4f (%s)  ICC(2,k)=%.4f (%s)  [n=%d items, k=%d raters]",
                  single.value, icc_band(single.value), average.value,
                  icc_band(average.value), single.n, single.k);
    return buf;
}

std::string render_block_icc_text(const BlockIccSummary& s) {
    if (s.blocks_used == 0) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "ICC n/a  [0 usable blocks, %d skipped]",
                      s.blocks_skipped);
        return buf;
    }
    char buf[256];
    std::string raters = s.min_raters == s.max_raters
                             ? std::to_string(s.min_raters)
                             : std::to_string(s.min_raters) + "-" + std::to_string(s.max_raters);
    std::snprintf(buf, sizeof buf,
                  "ICC(2,1)=%.4f (%s)  ICC(2,k)=%.4f (%s)  [%d blocks, %d skipped, k=%s raters]",
                  s.icc_single, icc_band(s.icc_single), s.icc_average,
                  icc_band(s.icc_average), s.blocks_used, s.blocks_skipped, raters.c_str());
    return buf;
}

// ---------------------------------------------------------------------------
// full report
// ---------------------------------------------------------------------------

namespace {

void write_file(ReportOutput& out, const std::string& path, const std::string& content) {
    write_text_file(path, content);
    out.files.push_back(path);
}

std::vector<double> grid_xs() {
    return {kLambdaGrid.begin(), kLambdaGrid.end()};
}

std::vector<double> to_vec(const Curve& c) { return {c.begin(), c.end()}; }

}  // namespace

ReportOutput write_report(const ResultsFile& results,
                          const std::vector<RatingRecord>* ratings,
                          const std::string& out_dir, double heatmap_lambda) {
    const int heat_li = lambda_grid_index(heatmap_lambda);
    if (heat_li < 0)
        throw argument_error("heatmap lambda " + format_double(heatmap_lambda) +
                             " is not on the lambda grid");
    const SweepCurves curves = curves_from_results(results);
    const SummaryTable model_summary = summarize(results);
    std::filesystem::create_directories(out_dir);
    ReportOutput out;
    const std::vector<double> xs = grid_xs();

    // normalizes for the scaled figures; an all-zero series stays as-is
    auto scaled = [&out](const Curve& c, const std::string& what) {
        bool flagged = false;
        std::vector<double> v = normalize_by_max(to_vec(c), &flagged);
        if (flagged)
            out.warnings.push_back(what + " has no positive values; left unscaled");
        return v;
    };

    // per-target scorer curves; the target's own series carries a +/- 1 SD
    // band over prompts
    for (int t = 0; t < kEkmanSix; ++t) {
        const size_t ts = static_cast<size_t>(t);
        const char* tname = to_string(static_cast<Emotion>(t));
        SvgLinePlot plot(std::string("mean scorer output, target = ") + tname, "lambda",
                         "mean score");
        for (int d = 0; d < kEkmanSix; ++d) {
            const auto& c = curves.values[ts][static_cast<size_t>(d)];
            std::vector<double> sds;
            if (d == t) {
                sds.resize(kGridSize);
                for (size_t li = 0; li < kGridSize; ++li)
                    sds[li] = model_summary.cells[ts][li].sd[ts];
            }
            plot.add_series(to_string(static_cast<Emotion>(d)), xs, to_vec(c),
                            std::move(sds));
        }
        write_file(out, out_dir + "/scores_" + tname + ".svg", plot.render());
    }

    {
        SvgLinePlot plot("mean comprehensibility by target", "lambda",
                         "comprehensibility (0-1)");
        for (int t = 0; t < kEkmanSix; ++t)
            plot.add_series(to_string(static_cast<Emotion>(t)), xs,
                            to_vec(curves.values[static_cast<size_t>(t)][kEkmanSix]));
        write_file(out, out_dir + "/comprehensibility.svg", plot.render());
    }

    // per-target feature curves, each series scaled to its own maximum
    std::optional<std::array<std::array<Curve, kRatingDimCount>, kEkmanSix>> human;
    if (ratings != nullptr) human = mean_rating_curves(*ratings);
    for (int t = 0; t < kEkmanSix; ++t) {
        const size_t ts = static_cast<size_t>(t);
        const char* tname = to_string(static_cast<Emotion>(t));
        SvgLinePlot plot(std::string("features (scaled to series max), target = ") + tname,
                         "lambda", "value / series max");
        const std::string prefix = std::string(tname) + " ";
        plot.add_series("lexical density", xs,
                        scaled(curves.lexical_density[ts], prefix + "lexical density"));
        plot.add_series("mean word length", xs,
                        scaled(curves.mean_word_length[ts], prefix + "mean word length"));
        plot.add_series("entropy", xs, scaled(curves.entropy_bits[ts], prefix + "entropy"));
        plot.add_series("model comprehensibility", xs,
                        scaled(curves.values[ts][kEkmanSix],
                               prefix + "model comprehensibility"));
        if (human.has_value())
            plot.add_series("human comprehensibility", xs,
                            scaled((*human)[ts][kEkmanSix],
                                   prefix + "human comprehensibility"));
        write_file(out, out_dir + "/features_" + tname + ".svg", plot.render());
    }

    // heatmap: rows = steering target, columns = rated dimension
    {
        std::vector<std::string> labels;
        for (int e = 0; e < kEkmanSix; ++e) labels.push_back(to_string(static_cast<Emotion>(e)));
        std::vector<std::vector<double>> cellv(kEkmanSix, std::vector<double>(kEkmanSix, 0.0));
        double vmax = 1.0;
        std::string source = "scorer";
        if (human.has_value()) {
            for (int t = 0; t < kEkmanSix; ++t)
                for (int d = 0; d < kEkmanSix; ++d)
                    cellv[static_cast<size_t>(t)][static_cast<size_t>(d)] =
                        (*human)[static_cast<size_t>(t)][static_cast<size_t>(d)]
                                [static_cast<size_t>(heat_li)];
            vmax = 7.0;
            source = "mean human rating";
        } else {
            for (int t = 0; t < kEkmanSix; ++t)
                for (int d = 0; d < kEkmanSix; ++d)
                    cellv[static_cast<size_t>(t)][static_cast<size_t>(d)] =
                        curves.values[static_cast<size_t>(t)][static_cast<size_t>(d)]
                                     [static_cast<size_t>(heat_li)];
        }
        write_file(out, out_dir + "/heatmap.svg",
                   render_heatmap(source + " at lambda = " + fmt("%.2f", heatmap_lambda),
                                  labels, labels, cellv, 0.0, vmax));
    }

    write_file(out, out_dir + "/model_summary.csv", summary_csv(model_summary));
    if (model_summary.has_empty_cells)
        out.warnings.push_back("model summary has empty (target, lambda) groups; omitted");

    std::string md = markdown_sweep_summary(results, curves);

    if (ratings != nullptr) {
        const SummaryTable rating_summary = summarize(*ratings);
        write_file(out, out_dir + "/ratings_summary.csv", summary_csv(rating_summary));
        if (rating_summary.has_empty_cells)
            out.warnings.push_back("ratings summary has empty (target, lambda) groups; omitted");

        for (int t = 0; t < kEkmanSix; ++t) {
            const size_t ts = static_cast<size_t>(t);
            const char* tname = to_string(static_cast<Emotion>(t));

            // all seven rated dimensions, mean only
            SvgLinePlot all_dims(std::string("mean human ratings, target = ") + tname,
                                 "lambda", "mean rating (0-7)");
            for (int d = 0; d < kRatingDimCount; ++d)
                all_dims.add_series(rating_dim_name(d), xs,
                                    to_vec((*human)[ts][static_cast<size_t>(d)]));
            write_file(out, out_dir + "/ratings_" + tname + ".svg", all_dims.render());

            // target intensity and comprehensibility with +/- 1 SD bands
            SvgLinePlot banded(std::string("perceived intensity, target = ") + tname,
                               "lambda", "mean rating (0-7)");
            std::vector<double> m_int(kGridSize), sd_int(kGridSize);
            std::vector<double> m_com(kGridSize), sd_com(kGridSize);
            for (size_t li = 0; li < kGridSize; ++li) {
                const CellSummary& cell = rating_summary.cells[ts][li];
                m_int[li] = cell.mean[ts];
                sd_int[li] = cell.sd[ts];
                m_com[li] = cell.mean[kEkmanSix];
                sd_com[li] = cell.sd[kEkmanSix];
            }
            banded.add_series(std::string(tname) + " intensity", xs, m_int, sd_int);
            banded.add_series("comprehensibility", xs, m_com, sd_com);
            write_file(out, out_dir + "/intensity_" + tname + ".svg", banded.render());
        }

        // human vs scorer alignment across the lambda grid
        std::array<Curve, kEkmanSix> human_diag, model_diag;
        for (int e = 0; e < kEkmanSix; ++e) {
            const size_t es = static_cast<size_t>(e);
            human_diag[es] = (*human)[es][es];
            model_diag[es] = curves.values[es][es];
        }
        const AlignmentResult alignment = align_human_model(human_diag, model_diag);
        write_file(out, out_dir + "/correlations.csv", alignment_csv(alignment));

        md += "\n## Human vs scorer correlation\n\n";
        md += "Pearson r between the 8-point human and scorer curves of each "
              "target's own intensity.\n\n";
        md += "| target | r (target intensity) | r (comprehensibility) |\n";
        md += "|---|---|---|\n";
        auto safe_pearson = [](const std::vector<double>& a, const std::vector<double>& b) {
            try {
                return pearson(a, b);
            } catch (const numeric_error&) {
                return std::numeric_limits<double>::quiet_NaN();
            }
        };
        auto r_cell = [](double r) {
            return std::isnan(r) ? std::string("n/a") : fmt("%.4f", r);
        };
        for (int t = 0; t < kEkmanSix; ++t) {
            const size_t ts = static_cast<size_t>(t);
            const char* tname = to_string(static_cast<Emotion>(t));
            const EmotionAlignment& a = alignment.per_emotion[ts];
            const double r_compr = safe_pearson(to_vec((*human)[ts][kEkmanSix]),
                                                to_vec(curves.values[ts][kEkmanSix]));
            md += std::string("| ") + tname + " | " +
                  (a.defined ? fmt("%.4f", a.r) : std::string("n/a")) + " | " +
                  r_cell(r_compr) + " |\n";

            SvgLinePlot overlay(std::string("human vs scorer (scaled), target = ") + tname,
                                "lambda", "value / series max");
            const std::string prefix = std::string(tname) + " overlay ";
            overlay.add_series("scorer " + std::string(tname), xs,
                               scaled(curves.values[ts][ts], prefix + "scorer intensity"));
            overlay.add_series("human " + std::string(tname), xs,
                               scaled((*human)[ts][ts], prefix + "human intensity"));
            overlay.add_series("scorer comprehensibility", xs,
                               scaled(curves.values[ts][kEkmanSix],
                                      prefix + "scorer comprehensibility"));
            overlay.add_series("human comprehensibility", xs,
                               scaled((*human)[ts][kEkmanSix],
                                      prefix + "human comprehensibility"));
            write_file(out, out_dir + "/overlay_" + tname + ".svg", overlay.render());
        }
        md += std::string("\nmean r across emotions: ") +
              (alignment.all_defined ? fmt("%.4f", alignment.mean_r) : std::string("n/a")) +
              "\n";
    }


    write_file(out, out_dir + "/summary.md", md);
    return out;
}

}  // namespace stylelab
