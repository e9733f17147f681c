#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "stylelab/common.hpp"

namespace stylelab {

// ---------------------------------------------------------------------------
// small dense matrix, sufficient for contrast and covariance work
// ---------------------------------------------------------------------------

class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    Matrix transpose() const;
    Matrix operator*(const Matrix& rhs) const;
    double trace() const;
    double determinant() const;  // LU with partial pivoting; 0 when singular

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// orthonormal Helmert contrasts: (k-1) x k, rows orthonormal, each row
// orthogonal to the all-ones vector
Matrix helmert_contrasts(int k);

// Kronecker product, used to build interaction contrasts
Matrix kronecker(const Matrix& a, const Matrix& b);

// sample covariance (divisor n-1) of row vectors: data is [n][d]
Matrix covariance_of_rows(const std::vector<std::vector<double>>& data);

// ---------------------------------------------------------------------------
// correlation
// ---------------------------------------------------------------------------

// Pearson product-moment correlation; throws argument_error on size mismatch
// or n < 3, numeric_error when either series has zero variance
double pearson(std::span<const double> x, std::span<const double> y);

// Spearman rank correlation with average ranks for ties
double spearman(std::span<const double> x, std::span<const double> y);

// Scales a series by its maximum so the largest element becomes 1. A series
// with no positive value is returned unchanged and *flagged is set.
std::vector<double> normalize_by_max(std::span<const double> series,
                                     bool* flagged = nullptr);

// ---------------------------------------------------------------------------
// intraclass correlation, two-way random effects, absolute agreement
// ---------------------------------------------------------------------------

struct IccResult {
    double value = 0.0;
    double msr = 0.0;  // mean square for rows (targets)
    double msc = 0.0;  // mean square for columns (raters)
    double mse = 0.0;  // residual mean square
    int n = 0;         // targets
    int k = 0;         // raters
};

// data is [n targets][k raters], n >= 2, k >= 2, fully observed
IccResult icc_2_1(const std::vector<std::vector<double>>& data);  // single rater
IccResult icc_2_k(const std::vector<std::vector<double>>& data);  // mean of k raters

// reliability band: "poor" < 0.5 <= "moderate" < 0.75 <= "good" < 0.9 <= "excellent"
const char* icc_band(double value);

// ---------------------------------------------------------------------------
// sphericity diagnostics and two-way repeated-measures ANOVA
// ---------------------------------------------------------------------------

// Greenhouse-Geisser epsilon from a k x k covariance matrix of the k
// within-subject condition scores, clamped to [1/(k-1), 1]. Throws
// argument_error when the matrix is not square, not symmetric, or k < 2.
double gg_epsilon(const Matrix& covariance);

struct MauchlyResult {
    double w = 1.0;
    double chi_squared = 0.0;
    double df = 0.0;
    double p = 1.0;
    // Singular transformed covariance (or too few subjects to estimate it):
    // w is forced to 0 and this flag is set.
    bool degenerate = false;
};

// Mauchly's sphericity statistic from a k x k condition covariance matrix and
// the subject count behind it. The covariance is mapped through orthonormal
// Helmert contrasts; W = det(T) / (tr(T)/p)^p with p = k-1, plus the
// chi-square approximation. Input validation mirrors gg_epsilon.
MauchlyResult mauchly_w(const Matrix& covariance, int n_subjects);

struct AnovaEffect {
    std::string name;
    double ss = 0.0, df = 0.0, ms = 0.0;
    double ss_error = 0.0, df_error = 0.0, ms_error = 0.0;
    double f = 0.0;
    double p = 0.0;
    double partial_eta_sq = 0.0;
    double epsilon = 1.0;  // Greenhouse-Geisser
    double df_gg = 0.0, df_error_gg = 0.0;
    double p_gg = 0.0;
    MauchlyResult mauchly;
};

struct RmAnovaResult {
    int n_subjects = 0;
    int levels_a = 0;
    int levels_b = 0;
    double grand_mean = 0.0;
    double ss_subjects = 0.0;
    double ss_total = 0.0;
    AnovaEffect a, b, ab;
};

// data is [subject][levelA][levelB], one observation per cell, >= 2 subjects
// and >= 2 levels per factor, no missing values
RmAnovaResult rm_anova_two_way(const std::vector<std::vector<std::vector<double>>>& data,
                               const std::string& name_a = "A",
                               const std::string& name_b = "B");

// ---------------------------------------------------------------------------
// ratings records, imputation, prescreen
// ---------------------------------------------------------------------------

inline constexpr int kRatingDimCount = 7;  // six emotions + comprehensibility

// dimension order: anger, disgust, fear, joy, sadness, surprise, comprehensibility
const char* rating_dim_name(int dim);

struct RatingRecord {
    std::string participant_id;
    int prompt_id = 0;
    Emotion target = Emotion::anger;
    double lambda = 0.0;
    // NaN marks a missing value
    std::array<double, kRatingDimCount> values{};

    bool has(int dim) const;
};

// index into kLambdaGrid with 1e-9 tolerance, -1 when off grid
int lambda_grid_index(double lambda);

struct ImputationSummary {
    int missing_before = 0;
    int imputed = 0;
};

// Replaces each missing value with the mean of the observed values sharing
// the same (target emotion, lambda, dimension) cell. Throws data_error when
// a cell has no observed values at all.
ImputationSummary impute_missing(std::vector<RatingRecord>& records);

struct PrescreenItem {
    Emotion true_label = Emotion::anger;
    std::array<double, kEkmanSix> intensities{};
};

// an item is answered correctly when the true emotion is rated within 0.5
// of the highest-rated emotion
bool prescreen_item_correct(const PrescreenItem& item);

// participants see exactly five prescreen texts and pass with >= 3 correct
bool prescreen_pass(const std::vector<PrescreenItem>& items);

}  // namespace stylelab
