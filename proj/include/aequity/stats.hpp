#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "aequity/common.hpp"

namespace aequity {

namespace detail {

/// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * detail::beta_cf(a, b, x) / a;
    }
    return 1.0 - bt * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Student-t survival function P(T > t) for df > 0.
inline double student_t_sf(double t, double df) {
    if (!std::isfinite(t)) return t > 0 ? 0.0 : 1.0;
    const double x = df / (df + t * t);
    const double half_tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, x);
    return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

/// F survival function P(F > f) for d1, d2 > 0.
inline double f_sf(double f, double d1, double d2) {
    if (f <= 0.0) return 1.0;
    if (!std::isfinite(f)) return 0.0;
    return reg_inc_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

inline double sample_mean(std::span<const double> xs) {
    double s = 0.0;
    for (double v : xs) s += v;
    return s / static_cast<double>(xs.size());
}

/// Unbiased (n-1) sample variance.
inline double sample_var(std::span<const double> xs) {
    const double m = sample_mean(xs);
    double s = 0.0;
    for (double v : xs) s += (v - m) * (v - m);
    return s / static_cast<double>(xs.size() - 1);
}

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;  // two-sided
    bool degenerate = false;
};

/// Welch unpaired t-test with Welch-Satterthwaite degrees of freedom.
/// Two zero-variance samples: p = 1 if the means agree, p = 0 (flagged
/// degenerate) otherwise.
inline TTestResult welch_t_test(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() < 2 || ys.size() < 2) throw StatError("welch_t_test: need >= 2 values per sample");
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    const double mx = sample_mean(xs);
    const double my = sample_mean(ys);
    const double vx = sample_var(xs);
    const double vy = sample_var(ys);

    TTestResult r;
    const double se2 = vx / nx + vy / ny;
    if (se2 <= 0.0) {
        r.degenerate = true;
        r.df = nx + ny - 2.0;
        if (mx == my) {
            r.t = 0.0;
            r.p = 1.0;
        } else {
            r.t = mx > my ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
            r.p = 0.0;
        }
        return r;
    }
    r.t = (mx - my) / std::sqrt(se2);
    const double num = se2 * se2;
    const double den = (vx / nx) * (vx / nx) / (nx - 1.0) + (vy / ny) * (vy / ny) / (ny - 1.0);
    r.df = num / den;
    r.p = 2.0 * student_t_sf(std::abs(r.t), r.df);
    r.p = std::min(1.0, std::max(0.0, r.p));
    return r;
}

struct AnovaResult {
    double f = 0.0;
    double p = 1.0;
    bool degenerate = false;
};

/// One-way ANOVA over >= 2 groups, each with >= 2 values.
inline AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw StatError("one_way_anova: need >= 2 groups");
    std::size_t total_n = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw StatError("one_way_anova: each group needs >= 2 values");
        total_n += g.size();
        for (double v : g) grand_sum += v;
    }
    const double grand_mean = grand_sum / static_cast<double>(total_n);

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        const double m = sample_mean(g);
        ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
        for (double v : g) ss_within += (v - m) * (v - m);
    }
    const double df_between = static_cast<double>(groups.size() - 1);
    const double df_within = static_cast<double>(total_n - groups.size());

    AnovaResult r;
    if (ss_within <= 0.0) {
        r.degenerate = true;
        if (ss_between <= 0.0) {
            r.f = 0.0;
            r.p = 1.0;
        } else {
            r.f = std::numeric_limits<double>::infinity();
            r.p = 0.0;
        }
        return r;
    }
    r.f = (ss_between / df_between) / (ss_within / df_within);
    r.p = f_sf(r.f, df_between, df_within);
    return r;
}

/// Linear-interpolation quantile (the "type 7" rule) on a sorted sample.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 0) throw StatError("quantile: empty sample");
    if (n == 1) return sorted[0];
    const double h = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/// Empirical percentile interval (2.5/97.5 at the default level).
inline std::pair<double, double> percentile_ci(std::span<const double> samples, double level = 0.95) {
    if (samples.size() < 2) throw StatError("percentile_ci: need >= 2 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double tail = 0.5 * (1.0 - level);
    return {quantile_sorted(sorted, tail), quantile_sorted(sorted, 1.0 - tail)};
}

}  // namespace aequity
