#pragma once

// Independent reference implementations used only by the tests. Everything
// here is deliberately straight-line and shares no helper code with the
// library: sums are accumulated directly from definitions, contrast bases
// are built by Gram-Schmidt over difference vectors (not Helmert), epsilon
// uses the textbook deviation form (not the projector form), and the special
// functions use their own series / continued-fraction evaluations.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "stylelab/model.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// special functions
// ---------------------------------------------------------------------------

inline double ln_gamma(double x) { return std::lgamma(x); }

// continued fraction for the incomplete beta (modified Lentz)
inline double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h;
}

inline double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * std::log(x) +
                 b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

inline double lower_gamma_series(double s, double x) {
    double term = 1.0 / s, sum = term, ap = s;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + s * std::log(x) - ln_gamma(s));
}

inline double upper_gamma_cf(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + s * std::log(x) - ln_gamma(s));
}

inline double reg_lower_gamma(double s, double x) {
    if (x <= 0.0) return 0.0;
    if (x < s + 1.0) return lower_gamma_series(s, x);
    return 1.0 - upper_gamma_cf(s, x);
}

inline double reg_upper_gamma(double s, double x) {
    if (x <= 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - lower_gamma_series(s, x);
    return upper_gamma_cf(s, x);
}

inline double chi2_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return reg_upper_gamma(df / 2.0, x / 2.0);
}

inline double f_sf(double x, double d1, double d2) {
    if (x <= 0.0) return 1.0;
    return reg_inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x));
}

// ---------------------------------------------------------------------------
// correlation
// ---------------------------------------------------------------------------

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double pearson_ref(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = mean_of(x), my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline std::vector<double> ranks_ref(const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t t = i; t <= j; ++t) r[order[t]] = avg;
        i = j + 1;
    }
    return r;
}

inline double spearman_ref(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson_ref(ranks_ref(x), ranks_ref(y));
}

// ---------------------------------------------------------------------------
// intraclass correlation (two-way random, absolute agreement)
// ---------------------------------------------------------------------------

struct IccRef {
    double msr = 0.0, msc = 0.0, mse = 0.0;
    double icc21 = 0.0, icc2k = 0.0;
};

inline IccRef icc_ref(const std::vector<std::vector<double>>& data) {
    const int n = static_cast<int>(data.size());
    const int k = static_cast<int>(data[0].size());
    double gm = 0.0;
    for (const auto& row : data)
        for (double v : row) gm += v;
    gm /= static_cast<double>(n) * k;
    double ssr = 0.0, ssc = 0.0, sst = 0.0;
    for (int i = 0; i < n; ++i) {
        double m = 0.0;
        for (double v : data[i]) m += v;
        m /= k;
        ssr += (m - gm) * (m - gm);
    }
    ssr *= k;
    for (int j = 0; j < k; ++j) {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m += data[i][j];
        m /= n;
        ssc += (m - gm) * (m - gm);
    }
    ssc *= n;
    for (const auto& row : data)
        for (double v : row) sst += (v - gm) * (v - gm);
    const double sse = sst - ssr - ssc;
    IccRef r;
    r.msr = ssr / (n - 1);
    r.msc = ssc / (k - 1);
    r.mse = sse / (static_cast<double>(n - 1) * (k - 1));
    r.icc21 = (r.msr - r.mse) /
              (r.msr + (k - 1) * r.mse + static_cast<double>(k) * (r.msc - r.mse) / n);
    r.icc2k = (r.msr - r.mse) / (r.msr + (r.msc - r.mse) / n);
    return r;
}

// ---------------------------------------------------------------------------
// covariance, epsilon, Mauchly
// ---------------------------------------------------------------------------

inline std::vector<std::vector<double>> cov_rows_ref(
    const std::vector<std::vector<double>>& rows) {
    const size_t n = rows.size(), d = rows[0].size();
    std::vector<double> mu(d, 0.0);
    for (const auto& r : rows)
        for (size_t j = 0; j < d; ++j) mu[j] += r[j];
    for (double& v : mu) v /= static_cast<double>(n);
    std::vector<std::vector<double>> c(d, std::vector<double>(d, 0.0));
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (const auto& r : rows) s += (r[i] - mu[i]) * (r[j] - mu[j]);
            c[i][j] = s / static_cast<double>(n - 1);
        }
    return c;
}

// textbook deviation form of the Greenhouse-Geisser estimate
inline double gg_eps_ref(const std::vector<std::vector<double>>& s) {
    const int k = static_cast<int>(s.size());
    double grand = 0.0, diag = 0.0;
    std::vector<double> rowm(k, 0.0);
    for (int i = 0; i < k; ++i) {
        diag += s[i][i];
        for (int j = 0; j < k; ++j) {
            grand += s[i][j];
            rowm[i] += s[i][j];
        }
        rowm[i] /= k;
    }
    grand /= static_cast<double>(k) * k;
    diag /= k;
    double sq = 0.0, rowsq = 0.0;
    for (int i = 0; i < k; ++i) {
        rowsq += rowm[i] * rowm[i];
        for (int j = 0; j < k; ++j) sq += s[i][j] * s[i][j];
    }
    const double num = static_cast<double>(k) * k * (diag - grand) * (diag - grand);
    const double den =
        (k - 1) * (sq - 2.0 * k * rowsq + static_cast<double>(k) * k * grand * grand);
    if (den <= 0.0) return 1.0;
    return std::clamp(num / den, 1.0 / (k - 1), 1.0);
}

// orthonormal basis of the complement of the ones vector, built from
// adjacent-difference vectors with twice-repeated modified Gram-Schmidt
inline std::vector<std::vector<double>> diff_contrasts_ref(int k) {
    std::vector<std::vector<double>> basis;
    for (int i = 0; i + 1 < k; ++i) {
        std::vector<double> v(k, 0.0);
        v[i] = 1.0;
        v[i + 1] = -1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) {
                double d = 0.0;
                for (int j = 0; j < k; ++j) d += v[j] * u[j];
                for (int j = 0; j < k; ++j) v[j] -= d * u[j];
            }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (double& x : v) x /= nrm;
        basis.push_back(v);
    }
    return basis;
}

inline std::vector<std::vector<double>> matmul_ref(
    const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    const size_t n = a.size(), m = b[0].size(), inner = b.size();
    std::vector<std::vector<double>> out(n, std::vector<double>(m, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (size_t t = 0; t < inner; ++t) s += a[i][t] * b[t][j];
            out[i][j] = s;
        }
    return out;
}

inline std::vector<std::vector<double>> transpose_ref(
    const std::vector<std::vector<double>>& a) {
    std::vector<std::vector<double>> out(a[0].size(), std::vector<double>(a.size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[0].size(); ++j) out[j][i] = a[i][j];
    return out;
}

inline double det_ref(std::vector<std::vector<double>> a) {
    const int n = static_cast<int>(a.size());
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (std::fabs(a[piv][c]) == 0.0) return 0.0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int cc = c; cc < n; ++cc) a[r][cc] -= f * a[c][cc];
        }
    }
    return det;
}

struct MauchlyRef {
    double w = 1.0, chi = 0.0, df = 0.0, p = 1.0;
};

// from an already contrast-transformed p x p covariance
inline MauchlyRef mauchly_from_t_ref(const std::vector<std::vector<double>>& t, int n) {
    MauchlyRef r;
    const int p = static_cast<int>(t.size());
    if (p == 1) return r;
    double tr = 0.0;
    for (int i = 0; i < p; ++i) tr += t[i][i];
    r.w = std::min(det_ref(t) / std::pow(tr / p, p), 1.0);
    r.df = p * (p + 1) / 2.0 - 1.0;
    const double dd = 1.0 - (2.0 * p * p + p + 2.0) / (6.0 * p * (n - 1.0));
    r.chi = std::max(0.0, -(n - 1.0) * dd * std::log(r.w));
    r.p = chi2_sf(r.chi, r.df);
    return r;
}

inline MauchlyRef mauchly_ref(const std::vector<std::vector<double>>& s, int n) {
    const auto c = diff_contrasts_ref(static_cast<int>(s.size()));
    return mauchly_from_t_ref(matmul_ref(matmul_ref(c, s), transpose_ref(c)), n);
}

// ---------------------------------------------------------------------------
// two-way repeated-measures ANOVA, brute force from cell means
// ---------------------------------------------------------------------------

struct AnovaEffectRef {
    double ss = 0.0, df = 0.0, ss_err = 0.0, df_err = 0.0;
    double f = 0.0, p = 0.0, eta = 0.0;
    double eps = 1.0, p_gg = 0.0;
    MauchlyRef mauchly;
    bool mauchly_estimable = true;  // false when n - 1 < contrast count
};

struct AnovaRef {
    double grand_mean = 0.0, ss_subjects = 0.0, ss_total = 0.0;
    AnovaEffectRef a, b, ab;
};

inline AnovaRef anova_ref(const std::vector<std::vector<std::vector<double>>>& data) {
    const int s = static_cast<int>(data.size());
    const int a = static_cast<int>(data[0].size());
    const int b = static_cast<int>(data[0][0].size());
    const double cells = static_cast<double>(s) * a * b;

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
    gm /= cells;
    for (double& v : m_s) v /= static_cast<double>(a) * b;
    for (double& v : m_a) v /= static_cast<double>(s) * b;
    for (double& v : m_b) v /= static_cast<double>(s) * a;
    for (auto& row : m_ab)
        for (double& v : row) v /= s;
    for (auto& row : m_sa)
        for (double& v : row) v /= b;
    for (auto& row : m_sb)
        for (double& v : row) v /= a;

    AnovaRef res;
    res.grand_mean = gm;
    for (int i = 0; i < s; ++i) res.ss_subjects += (m_s[i] - gm) * (m_s[i] - gm);
    res.ss_subjects *= static_cast<double>(a) * b;

    double ss_a = 0.0, ss_b = 0.0, ss_ab = 0.0, ss_as = 0.0, ss_bs = 0.0, ss_abs = 0.0;
    for (int j = 0; j < a; ++j) ss_a += (m_a[j] - gm) * (m_a[j] - gm);
    ss_a *= static_cast<double>(s) * b;
    for (int l = 0; l < b; ++l) ss_b += (m_b[l] - gm) * (m_b[l] - gm);
    ss_b *= static_cast<double>(s) * a;
    for (int j = 0; j < a; ++j)
        for (int l = 0; l < b; ++l) {
            const double d = m_ab[j][l] - m_a[j] - m_b[l] + gm;
            ss_ab += d * d;
        }
    ss_ab *= s;
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < a; ++j) {
            const double d = m_sa[i][j] - m_s[i] - m_a[j] + gm;
            ss_as += d * d;
        }
    ss_as *= b;
    for (int i = 0; i < s; ++i)
        for (int l = 0; l < b; ++l) {
            const double d = m_sb[i][l] - m_s[i] - m_b[l] + gm;
            ss_bs += d * d;
        }
    ss_bs *= a;
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < a; ++j)
            for (int l = 0; l < b; ++l) {
                const double x = data[i][j][l];
                const double d = x - m_ab[j][l] - m_sa[i][j] - m_sb[i][l] + m_a[j] +
                                 m_b[l] + m_s[i] - gm;
                ss_abs += d * d;
                res.ss_total += (x - gm) * (x - gm);
            }

    auto fill = [&](AnovaEffectRef& e, double ss, double df, double ss_err, double df_err,
                    double eps, const MauchlyRef& m, bool estimable) {
        e.ss = ss;
        e.df = df;
        e.ss_err = ss_err;
        e.df_err = df_err;
        e.f = (ss / df) / (ss_err / df_err);
        e.p = f_sf(e.f, df, df_err);
        e.eta = ss / (ss + ss_err);
        e.eps = eps;
        e.p_gg = f_sf(e.f, df * eps, df_err * eps);
        e.mauchly = m;
        e.mauchly_estimable = estimable;
    };

    const auto cov_a = cov_rows_ref(m_sa);
    const auto cov_b = cov_rows_ref(m_sb);
    fill(res.a, ss_a, a - 1.0, ss_as, (a - 1.0) * (s - 1.0), gg_eps_ref(cov_a),
         mauchly_ref(cov_a, s), s - 1 >= a - 1);
    fill(res.b, ss_b, b - 1.0, ss_bs, (b - 1.0) * (s - 1.0), gg_eps_ref(cov_b),
         mauchly_ref(cov_b, s), s - 1 >= b - 1);

    // interaction: project each subject's a x b table through difference
    // contrasts on both factors; epsilon and W are invariant to the
    // particular orthonormal contrast basis
    const auto ca = diff_contrasts_ref(a);
    const auto cb = diff_contrasts_ref(b);
    const int d_ab = (a - 1) * (b - 1);
    std::vector<std::vector<double>> z(s, std::vector<double>(d_ab, 0.0));
    for (int i = 0; i < s; ++i) {
        const auto zi = matmul_ref(matmul_ref(ca, data[i]), transpose_ref(cb));
        for (int j = 0; j < a - 1; ++j)
            for (int l = 0; l < b - 1; ++l) z[i][j * (b - 1) + l] = zi[j][l];
    }
    const auto tz = cov_rows_ref(z);
    double tr = 0.0, tr2 = 0.0;
    for (int i = 0; i < d_ab; ++i) {
        tr += tz[i][i];
        for (int j = 0; j < d_ab; ++j) tr2 += tz[i][j] * tz[j][i];
    }
    double eps_ab = 1.0;
    if (tr2 > 0.0) eps_ab = std::clamp(tr * tr / (d_ab * tr2), 1.0 / d_ab, 1.0);
    fill(res.ab, ss_ab, d_ab, ss_abs, static_cast<double>(d_ab) * (s - 1.0), eps_ab,
         mauchly_from_t_ref(tz, s), s - 1 >= d_ab);
    return res;
}

// ---------------------------------------------------------------------------
// Eq. 1 difference of means
// ---------------------------------------------------------------------------

inline std::vector<std::vector<double>> style_vector_ref(
    const std::vector<std::vector<double>>& target_mean,
    const std::vector<std::vector<double>>& contrast_sum_of_means, double contrast_count) {
    std::vector<std::vector<double>> v(target_mean.size());
    for (size_t layer = 0; layer < target_mean.size(); ++layer) {
        v[layer].resize(target_mean[layer].size());
        for (size_t j = 0; j < target_mean[layer].size(); ++j)
            v[layer][j] =
                target_mean[layer][j] - contrast_sum_of_means[layer][j] / contrast_count;
    }
    return v;
}

// ---------------------------------------------------------------------------
// transformer forward pass, layer at a time (no cache, no incremental state)
// ---------------------------------------------------------------------------

struct ForwardRef {
    // residual[layer][position][dim], captured after the block's residual
    // adds and any injection
    std::vector<std::vector<std::vector<double>>> residual;
    std::vector<std::vector<double>> logits;  // [position][vocab]
};

inline std::vector<double> layer_norm_ref(const std::vector<double>& x,
                                          const std::vector<double>& gamma,
                                          const std::vector<double>& beta) {
    const size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + 1e-5);
    std::vector<double> out(n);
    for (size_t j = 0; j < n; ++j) out[j] = (x[j] - mean) * inv * gamma[j] + beta[j];
    return out;
}

inline double gelu_ref(double x) {
    return 0.5 * x * (1.0 + std::tanh(std::sqrt(2.0 / M_PI) * (x + 0.044715 * x * x * x)));
}

inline ForwardRef forward_ref(const stylelab::Model& model, const std::vector<int>& tokens,
                              const std::vector<std::vector<double>>* inject = nullptr,
                              double lambda = 0.0,
                              const std::vector<int>* layer_mask = nullptr) {
    const auto& cfg = model.config();
    const int h = cfg.hidden_dim;
    const int heads = cfg.num_heads;
    const int hd = h / heads;
    const size_t t_len = tokens.size();

    // embeddings plus sinusoidal positions, amplitude 0.05
    std::vector<std::vector<double>> x(t_len, std::vector<double>(h));
    for (size_t p = 0; p < t_len; ++p)
        for (int j = 0; j < h; ++j) {
            const double freq = std::pow(10000.0, -2.0 * (j / 2) / h);
            const double angle = static_cast<double>(p) * freq;
            const double pe = 0.05 * ((j % 2 == 0) ? std::sin(angle) : std::cos(angle));
            x[p][j] = model.embedding()[static_cast<size_t>(tokens[p]) * h + j] + pe;
        }

    ForwardRef out;
    out.residual.resize(cfg.num_layers);
    auto matvec = [](const std::vector<double>& w, const std::vector<double>& in, int rows,
                     int cols, const std::vector<double>* bias) {
        std::vector<double> r(rows);
        for (int i = 0; i < rows; ++i) {
            double acc = bias ? (*bias)[i] : 0.0;
            for (int j = 0; j < cols; ++j) acc += w[static_cast<size_t>(i) * cols + j] * in[j];
            r[i] = acc;
        }
        return r;
    };

    for (int layer = 0; layer < cfg.num_layers; ++layer) {
        const auto& w = model.layers()[layer];
        std::vector<std::vector<double>> q(t_len), k(t_len), v(t_len);
        for (size_t p = 0; p < t_len; ++p) {
            const auto n1 = layer_norm_ref(x[p], w.ln1_gamma, w.ln1_beta);
            q[p] = matvec(w.wq, n1, h, h, nullptr);
            k[p] = matvec(w.wk, n1, h, h, nullptr);
            v[p] = matvec(w.wv, n1, h, h, nullptr);
        }
        for (size_t p = 0; p < t_len; ++p) {
            std::vector<double> ctx(h, 0.0);
            for (int head = 0; head < heads; ++head) {
                const int off = head * hd;
                std::vector<double> sc(p + 1);
                double maxs = -std::numeric_limits<double>::infinity();
                for (size_t t = 0; t <= p; ++t) {
                    double s = 0.0;
                    for (int j = 0; j < hd; ++j) s += q[p][off + j] * k[t][off + j];
                    sc[t] = s / std::sqrt(static_cast<double>(hd));
                    maxs = std::max(maxs, sc[t]);
                }
                double denom = 0.0;
                for (size_t t = 0; t <= p; ++t) {
                    sc[t] = std::exp(sc[t] - maxs);
                    denom += sc[t];
                }
                for (size_t t = 0; t <= p; ++t)
                    for (int j = 0; j < hd; ++j)
                        ctx[off + j] += sc[t] / denom * v[t][off + j];
            }
            const auto proj = matvec(w.wo, ctx, h, h, nullptr);
            for (int j = 0; j < h; ++j) x[p][j] += proj[j];

            const auto n2 = layer_norm_ref(x[p], w.ln2_gamma, w.ln2_beta);
            auto hidden = matvec(w.w1, n2, 4 * h, h, &w.b1);
            for (double& m : hidden) m = gelu_ref(m);
            const auto down = matvec(w.w2, hidden, h, 4 * h, &w.b2);
            for (int j = 0; j < h; ++j) x[p][j] += down[j];

            bool apply = inject != nullptr && lambda != 0.0;
            if (apply && layer_mask != nullptr && !layer_mask->empty())
                apply = std::find(layer_mask->begin(), layer_mask->end(), layer) !=
                        layer_mask->end();
            if (apply)
                for (int j = 0; j < h; ++j) x[p][j] += lambda * (*inject)[layer][j];
        }
        out.residual[layer] = x;
    }

    out.logits.resize(t_len);
    for (size_t p = 0; p < t_len; ++p) {
        const auto fin = layer_norm_ref(x[p], model.final_gamma(), model.final_beta());
        out.logits[p].resize(cfg.vocab_size);
        for (int tok = 0; tok < cfg.vocab_size; ++tok) {
            double acc = 0.0;
            for (int j = 0; j < h; ++j)
                acc += fin[j] * model.embedding()[static_cast<size_t>(tok) * h + j];
            out.logits[p][tok] = acc;
        }
    }
    return out;
}

inline std::vector<std::vector<double>> pooled_mean_ref(const ForwardRef& f) {
    std::vector<std::vector<double>> out(f.residual.size());
    for (size_t layer = 0; layer < f.residual.size(); ++layer) {
        const auto& pos = f.residual[layer];
        out[layer].assign(pos[0].size(), 0.0);
        for (const auto& xp : pos)
            for (size_t j = 0; j < xp.size(); ++j) out[layer][j] += xp[j];
        for (double& v : out[layer]) v /= static_cast<double>(pos.size());
    }
    return out;
}

}  // namespace oracle
