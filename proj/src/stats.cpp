#include "stylelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stylelab/distributions.hpp"

namespace stylelab {

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_)
        throw argument_error("matrix product shape mismatch: " + std::to_string(cols_) +
                             " vs " + std::to_string(rhs.rows_));
    Matrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const double a = at(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < rhs.cols_; ++j) out.at(i, j) += a * rhs.at(k, j);
        }
    return out;
}

double Matrix::trace() const {
    if (rows_ != cols_) throw argument_error("trace requires a square matrix");
    double t = 0.0;
    for (int i = 0; i < rows_; ++i) t += at(i, i);
    return t;
}

double Matrix::determinant() const {
    if (rows_ != cols_) throw argument_error("determinant requires a square matrix");
    const int n = rows_;
    Matrix lu(*this);
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(lu.at(r, col)) > std::fabs(lu.at(pivot, col))) pivot = r;
        if (lu.at(pivot, col) == 0.0) return 0.0;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(lu.at(pivot, c), lu.at(col, c));
            det = -det;
        }
        det *= lu.at(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double factor = lu.at(r, col) / lu.at(col, col);
            for (int c = col; c < n; ++c) lu.at(r, c) -= factor * lu.at(col, c);
        }
    }
    return det;
}

Matrix helmert_contrasts(int k) {
    if (k < 2) throw argument_error("Helmert contrasts require k >= 2");
    Matrix c(k - 1, k);
    for (int i = 1; i < k; ++i) {
        const double norm = std::sqrt(static_cast<double>(i) * (i + 1));
        for (int j = 0; j < i; ++j) c.at(i - 1, j) = 1.0 / norm;
        c.at(i - 1, i) = -static_cast<double>(i) / norm;
    }
    return c;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const double av = a.at(i, j);
            for (int r = 0; r < b.rows(); ++r)
                for (int c = 0; c < b.cols(); ++c)
                    out.at(i * b.rows() + r, j * b.cols() + c) = av * b.at(r, c);
        }
    return out;
}

Matrix covariance_of_rows(const std::vector<std::vector<double>>& data) {
    const int n = static_cast<int>(data.size());
    if (n < 2) throw argument_error("covariance requires at least two rows");
    const int d = static_cast<int>(data[0].size());
    for (const auto& row : data)
        if (static_cast<int>(row.size()) != d)
            throw argument_error("covariance rows must have equal length");
    std::vector<double> mean(d, 0.0);
    for (const auto& row : data)
        for (int j = 0; j < d; ++j) mean[j] += row[j];
    for (double& m : mean) m /= n;
    Matrix cov(d, d);
    for (const auto& row : data)
        for (int i = 0; i < d; ++i) {
            const double di = row[i] - mean[i];
            for (int j = 0; j < d; ++j) cov.at(i, j) += di * (row[j] - mean[j]);
        }
    const double inv = 1.0 / (n - 1);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) cov.at(i, j) *= inv;
    return cov;
}

// ---------------------------------------------------------------------------
// correlation
// ---------------------------------------------------------------------------

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw argument_error("pearson requires equal-length series");
    const size_t n = x.size();
    if (n < 3) throw argument_error("pearson requires at least three points");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw numeric_error("pearson is undefined for a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
    const size_t n = x.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&x](size_t a, size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw argument_error("spearman requires equal-length series");
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

std::vector<double> normalize_by_max(std::span<const double> series, bool* flagged) {
    if (series.empty()) throw argument_error("cannot normalize an empty series");
    if (flagged) *flagged = false;
    double mx = series[0];
    for (double v : series) mx = std::max(mx, v);
    std::vector<double> out(series.begin(), series.end());
    if (!(mx > 0.0)) {
        // no positive value: leave the series untouched but tell the caller
        if (flagged) *flagged = true;
        return out;
    }
    for (double& v : out) v /= mx;
    return out;
}

// ---------------------------------------------------------------------------
// ICC
// ---------------------------------------------------------------------------

namespace {

void icc_mean_squares(const std::vector<std::vector<double>>& data, IccResult& out) {
    const int n = static_cast<int>(data.size());
    if (n < 2) throw argument_error("ICC requires at least two targets");
    const int k = static_cast<int>(data[0].size());
    if (k < 2) throw argument_error("ICC requires at least two raters");
    for (const auto& row : data) {
        if (static_cast<int>(row.size()) != k)
            throw argument_error("ICC matrix must be rectangular");
        for (double v : row)
            if (!std::isfinite(v)) throw argument_error("ICC matrix must be fully observed");
    }
    double gm = 0.0;
    std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) {
            row_mean[i] += data[i][j];
            col_mean[j] += data[i][j];
            gm += data[i][j];
        }
    for (double& r : row_mean) r /= k;
    for (double& c : col_mean) c /= n;
    gm /= static_cast<double>(n) * k;

    double ssr = 0.0, ssc = 0.0, sse = 0.0;
    for (int i = 0; i < n; ++i) ssr += (row_mean[i] - gm) * (row_mean[i] - gm);
    ssr *= k;
    for (int j = 0; j < k; ++j) ssc += (col_mean[j] - gm) * (col_mean[j] - gm);
    ssc *= n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) {
            const double e = data[i][j] - row_mean[i] - col_mean[j] + gm;
            sse += e * e;
        }
    out.n = n;
    out.k = k;
    out.msr = ssr / (n - 1);
    out.msc = ssc / (k - 1);
    out.mse = sse / (static_cast<double>(n - 1) * (k - 1));
}

}  // namespace

IccResult icc_2_1(const std::vector<std::vector<double>>& data) {
    IccResult r;
    icc_mean_squares(data, r);
    const double denom =
        r.msr + (r.k - 1) * r.mse + static_cast<double>(r.k) * (r.msc - r.mse) / r.n;
    if (denom == 0.0) throw numeric_error("ICC(2,1) denominator is zero");
    r.value = (r.msr - r.mse) / denom;
    return r;
}

IccResult icc_2_k(const std::vector<std::vector<double>>& data) {
    IccResult r;
    icc_mean_squares(data, r);
    const double denom = r.msr + (r.msc - r.mse) / r.n;
    if (denom == 0.0) throw numeric_error("ICC(2,k) denominator is zero");
    r.value = (r.msr - r.mse) / denom;
    return r;
}

const char* icc_band(double value) {
    if (value < 0.5) return "poor";
    if (value < 0.75) return "moderate";
    if (value < 0.9) return "good";
    return "excellent";
}

// ---------------------------------------------------------------------------
// repeated-measures ANOVA
// ---------------------------------------------------------------------------

namespace {

double clamp_epsilon(double eps, int df) {
    return std::clamp(eps, 1.0 / df, 1.0);
}

void check_covariance_input(const Matrix& cov, const char* op) {
    if (cov.rows() != cov.cols())
        throw argument_error(std::string(op) + " requires a square covariance matrix");
    if (cov.rows() < 2)
        throw argument_error(std::string(op) + " requires at least two conditions");
    for (int i = 0; i < cov.rows(); ++i)
        for (int j = i + 1; j < cov.cols(); ++j) {
            const double a = cov.at(i, j), b = cov.at(j, i);
            const double tol = 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
            if (std::fabs(a - b) > tol)
                throw argument_error(std::string(op) + " requires a symmetric covariance matrix");
        }
}

// epsilon from contrast-projected scores; d = number of contrasts
double gg_epsilon_scores(const std::vector<std::vector<double>>& scores, int d) {
    const Matrix t = covariance_of_rows(scores);
    const double tr = t.trace();
    const double tr2 = (t * t).trace();
    if (tr2 <= 0.0) return 1.0;
    return clamp_epsilon(tr * tr / (d * tr2), d);
}

// Mauchly from the already contrast-transformed p x p covariance
MauchlyResult mauchly_from_transformed(const Matrix& t, int n_subjects) {
    MauchlyResult r;
    const int p = t.rows();
    if (p == 1) {
        // two levels: a single contrast is spherical by definition
        return r;
    }
    r.df = p * (p + 1) / 2.0 - 1.0;
    const double det = t.determinant();
    const double tr = t.trace();
    if (n_subjects - 1 < p || det <= 0.0 || tr <= 0.0) {
        // the transformed covariance is singular (or cannot be full rank
        // with this few subjects): report W = 0 and flag it
        r.degenerate = true;
        r.w = 0.0;
        r.chi_squared = std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.w = std::min(det / std::pow(tr / p, p), 1.0);
    const double dd = 1.0 - (2.0 * p * p + p + 2.0) / (6.0 * p * (n_subjects - 1.0));
    r.chi_squared = std::max(0.0, -(n_subjects - 1.0) * dd * std::log(r.w));
    r.p = chi_squared_survival(r.chi_squared, r.df);
    return r;
}

}  // namespace

double gg_epsilon(const Matrix& covariance) {
    check_covariance_input(covariance, "gg_epsilon");
    const int k = covariance.rows();
    // centering projector: eps = tr(PSP)^2 / ((k-1) tr((PSP)^2))
    Matrix p = Matrix::identity(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) p.at(i, j) -= 1.0 / k;
    const Matrix m = p * covariance * p;
    const double tr = m.trace();
    const double tr2 = (m * m).trace();
    if (tr2 <= 0.0) return 1.0;  // spherical or degenerate
    return clamp_epsilon(tr * tr / ((k - 1) * tr2), k - 1);
}

MauchlyResult mauchly_w(const Matrix& covariance, int n_subjects) {
    check_covariance_input(covariance, "mauchly_w");
    if (n_subjects < 2) throw argument_error("mauchly_w requires at least two subjects");
    const Matrix c = helmert_contrasts(covariance.rows());
    return mauchly_from_transformed(c * covariance * c.transpose(), n_subjects);
}

namespace {

void fill_effect_tests(AnovaEffect& e) {
    if (e.ms_error <= 0.0)
        throw numeric_error("ANOVA error mean square for " + e.name +
                            " is zero; the design is degenerate");
    e.ms = e.ss / e.df;
    e.f = e.ms / e.ms_error;
    e.p = f_survival(e.f, e.df, e.df_error);
    e.partial_eta_sq = e.ss / (e.ss + e.ss_error);
    e.df_gg = e.df * e.epsilon;
    e.df_error_gg = e.df_error * e.epsilon;
    e.p_gg = f_survival(e.f, e.df_gg, e.df_error_gg);
}

}  // namespace

RmAnovaResult rm_anova_two_way(const std::vector<std::vector<std::vector<double>>>& data,
                               const std::string& name_a, const std::string& name_b) {
    const int s = static_cast<int>(data.size());
    if (s < 2) throw argument_error("RM-ANOVA requires at least two subjects");
    const int a = static_cast<int>(data[0].size());
    if (a < 2) throw argument_error("RM-ANOVA requires at least two levels of factor A");
    const int b = static_cast<int>(data[0][0].size());
    if (b < 2) throw argument_error("RM-ANOVA requires at least two levels of factor B");
    for (const auto& subject : data) {
        if (static_cast<int>(subject.size()) != a)
            throw argument_error("RM-ANOVA subjects must share the factor A levels");
        for (const auto& row : subject) {
            if (static_cast<int>(row.size()) != b)
                throw argument_error("RM-ANOVA subjects must share the factor B levels");
            for (double v : row)
                if (!std::isfinite(v))
                    throw argument_error("RM-ANOVA input has missing values; impute first");
        }
    }

    // cell and marginal means
    double gm = 0.0;
    std::vector<double> m_s(s, 0.0), m_a(a, 0.0), m_b(b, 0.0);
    std::vector<std::vector<double>> m_ab(a, std::vector<double>(b, 0.0));
    std::vector<std::vector<double>> m_sa(s, std::vector<double>(a, 0.0));
    std::vector<std::vector<double>> m_sb(s, std::vector<double>(b, 0.0));
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < a; ++j)
            for (int l = 0; l < b; ++l) {
                const double v = data[i][j][l];
                gm += v;
                m_s[i] += v;
                m_a[j] += v;
                m_b[l] += v;
                m_ab[j][l] += v;
                m_sa[i][j] += v;
                m_sb[i][l] += v;
            }
    const double cells = static_cast<double>(s) * a * b;
    gm /= cells;
    for (double& v : m_s) v /= static_cast<double>(a) * b;
    for (double& v : m_a) v /= static_cast<double>(s) * b;
    for (double& v : m_b) v /= static_cast<double>(s) * a;
    for (auto& row : m_ab)
        for (double& v : row) v /= static_cast<double>(s);
    for (auto& row : m_sa)
        for (double& v : row) v /= static_cast<double>(b);
    for (auto& row : m_sb)
        for (double& v : row) v /= static_cast<double>(a);

    RmAnovaResult res;
    res.n_subjects = s;
    res.levels_a = a;
    res.levels_b = b;
    res.grand_mean = gm;
    res.a.name = name_a;
    res.b.name = name_b;
    res.ab.name = name_a + " x " + name_b;

    double ss_subj = 0.0, ss_a = 0.0, ss_b = 0.0, ss_ab = 0.0;
    double ss_as = 0.0, ss_bs = 0.0, ss_abs = 0.0, ss_total = 0.0;
    for (int i = 0; i < s; ++i) ss_subj += (m_s[i] - gm) * (m_s[i] - gm);
    ss_subj *= static_cast<double>(a) * b;
    for (int j = 0; j < a; ++j) ss_a += (m_a[j] - gm) * (m_a[j] - gm);
    ss_a *= static_cast<double>(s) * b;
    for (int l = 0; l < b; ++l) ss_b += (m_b[l] - gm) * (m_b[l] - gm);
    ss_b *= static_cast<double>(s) * a;
    for (int j = 0; j < a; ++j)
        for (int l = 0; l < b; ++l) {
            const double d = m_ab[j][l] - m_a[j] - m_b[l] + gm;
            ss_ab += d * d;
        }
    ss_ab *= static_cast<double>(s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < a; ++j) {
            const double d = m_sa[i][j] - m_s[i] - m_a[j] + gm;
            ss_as += d * d;
        }
    ss_as *= static_cast<double>(b);
    for (int i = 0; i < s; ++i)
        for (int l = 0; l < b; ++l) {
            const double d = m_sb[i][l] - m_s[i] - m_b[l] + gm;
            ss_bs += d * d;
        }
    ss_bs *= static_cast<double>(a);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < a; ++j)
            for (int l = 0; l < b; ++l) {
                const double x = data[i][j][l];
                const double d =
                    x - m_ab[j][l] - m_sa[i][j] - m_sb[i][l] + m_a[j] + m_b[l] + m_s[i] - gm;
                ss_abs += d * d;
                ss_total += (x - gm) * (x - gm);
            }

    res.ss_subjects = ss_subj;
    res.ss_total = ss_total;

    res.a.ss = ss_a;
    res.a.df = a - 1;
    res.a.ss_error = ss_as;
    res.a.df_error = static_cast<double>(a - 1) * (s - 1);
    res.a.ms_error = ss_as / res.a.df_error;

    res.b.ss = ss_b;
    res.b.df = b - 1;
    res.b.ss_error = ss_bs;
    res.b.df_error = static_cast<double>(b - 1) * (s - 1);
    res.b.ms_error = ss_bs / res.b.df_error;

    res.ab.ss = ss_ab;
    res.ab.df = static_cast<double>(a - 1) * (b - 1);
    res.ab.ss_error = ss_abs;
    res.ab.df_error = static_cast<double>(a - 1) * (b - 1) * (s - 1);
    res.ab.ms_error = ss_abs / res.ab.df_error;

    // sphericity: epsilon and Mauchly per effect
    const Matrix cov_a = covariance_of_rows(m_sa);
    const Matrix cov_b = covariance_of_rows(m_sb);
    res.a.epsilon = gg_epsilon(cov_a);
    res.b.epsilon = gg_epsilon(cov_b);

    const Matrix ca = helmert_contrasts(a);
    const Matrix cb = helmert_contrasts(b);
    const int d_ab = (a - 1) * (b - 1);
    std::vector<std::vector<double>> z(s, std::vector<double>(d_ab, 0.0));
    for (int i = 0; i < s; ++i) {
        Matrix ds(a, b);
        for (int j = 0; j < a; ++j)
            for (int l = 0; l < b; ++l) ds.at(j, l) = data[i][j][l];
        const Matrix zi = ca * ds * cb.transpose();  // (a-1) x (b-1)
        for (int j = 0; j < a - 1; ++j)
            for (int l = 0; l < b - 1; ++l) z[i][j * (b - 1) + l] = zi.at(j, l);
    }
    res.ab.epsilon = gg_epsilon_scores(z, d_ab);

    res.a.mauchly = mauchly_from_transformed(ca * cov_a * ca.transpose(), s);
    res.b.mauchly = mauchly_from_transformed(cb * cov_b * cb.transpose(), s);
    res.ab.mauchly = mauchly_from_transformed(covariance_of_rows(z), s);

    fill_effect_tests(res.a);
    fill_effect_tests(res.b);
    fill_effect_tests(res.ab);
    return res;
}

// ---------------------------------------------------------------------------
// ratings, imputation, prescreen
// ---------------------------------------------------------------------------

const char* rating_dim_name(int dim) {
    if (dim >= 0 && dim < kEkmanSix) return to_string(static_cast<Emotion>(dim));
    if (dim == kEkmanSix) return "comprehensibility";
    throw argument_error("rating dimension index out of range: " + std::to_string(dim));
}

bool RatingRecord::has(int dim) const { return !std::isnan(values[static_cast<size_t>(dim)]); }

int lambda_grid_index(double lambda) {
    for (size_t i = 0; i < kLambdaGrid.size(); ++i)
        if (std::fabs(lambda - kLambdaGrid[i]) <= 1e-9) return static_cast<int>(i);
    return -1;
}

ImputationSummary impute_missing(std::vector<RatingRecord>& records) {
    // cell key: (target, lambda index, dimension)
    constexpr int kGrid = 8;
    const int n_targets = kEkmanSix;
    std::vector<double> sum(static_cast<size_t>(n_targets) * kGrid * kRatingDimCount, 0.0);
    std::vector<int> count(sum.size(), 0);
    auto cell = [&](const RatingRecord& rec, int dim) {
        const int li = lambda_grid_index(rec.lambda);
        if (li < 0)
            throw data_error("rating lambda " + format_double(rec.lambda) +
                             " is not on the lambda grid");
        const int t = static_cast<int>(rec.target);
        if (t < 0 || t >= n_targets)
            throw data_error("ratings may only target one of the six emotions");
        return (static_cast<size_t>(t) * kGrid + li) * kRatingDimCount + dim;
    };

    ImputationSummary summary;
    for (const auto& rec : records)
        for (int dim = 0; dim < kRatingDimCount; ++dim) {
            const size_t key = cell(rec, dim);
            if (rec.has(dim)) {
                sum[key] += rec.values[static_cast<size_t>(dim)];
                count[key] += 1;
            } else {
                ++summary.missing_before;
            }
        }
    for (auto& rec : records)
        for (int dim = 0; dim < kRatingDimCount; ++dim) {
            if (rec.has(dim)) continue;
            const size_t key = cell(rec, dim);
            if (count[key] == 0)
                throw data_error(std::string("cannot impute: cell (") +
                                 to_string(rec.target) + ", lambda=" +
                                 format_double(rec.lambda) + ", " + rating_dim_name(dim) +
                                 ") has no observed values");
            rec.values[static_cast<size_t>(dim)] = sum[key] / count[key];
            ++summary.imputed;
        }
    return summary;
}

bool prescreen_item_correct(const PrescreenItem& item) {
    const int t = static_cast<int>(item.true_label);
    if (t < 0 || t >= kEkmanSix)
        throw argument_error("prescreen true label must be one of the six emotions");
    double mx = item.intensities[0];
    for (double v : item.intensities) mx = std::max(mx, v);
    // small slack keeps the 0.5-band decision stable under float noise
    return item.intensities[static_cast<size_t>(t)] >= mx - 0.5 - 1e-9;
}

bool prescreen_pass(const std::vector<PrescreenItem>& items) {
    if (items.size() != 5)
        throw argument_error("prescreen requires exactly five items, got " +
                             std::to_string(items.size()));
    int correct = 0;
    for (const auto& item : items)
        if (prescreen_item_correct(item)) ++correct;
    return correct >= 3;
}

}  // namespace stylelab
