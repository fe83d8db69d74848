// Independent test oracles: finite differences, brute-force pairwise AUROC,
// and quadrature-based t / F tail probabilities. These deliberately avoid the
// implementation paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "aequity/nn.hpp"

namespace oracle {

/// Central finite differences of the batch loss w.r.t. every parameter.
inline aequity::Gradients finite_difference_grads(const aequity::NetworkParams& params,
                                                  const aequity::Matrix& x,
                                                  const aequity::Matrix& y,
                                                  aequity::LossKind kind, double h = 1e-4) {
    aequity::NetworkParams p = params;
    aequity::Gradients g;
    auto loss_at = [&]() {
        const aequity::Matrix out = aequity::forward(p, x);
        return aequity::compute_loss(kind, out, y);
    };
    for (std::size_t l = 0; l < p.n_layers(); ++l) {
        aequity::Matrix dw(p.weights[l].rows, p.weights[l].cols);
        for (std::size_t i = 0; i < p.weights[l].size(); ++i) {
            const double orig = p.weights[l].data[i];
            p.weights[l].data[i] = orig + h;
            const double lp = loss_at();
            p.weights[l].data[i] = orig - h;
            const double lm = loss_at();
            p.weights[l].data[i] = orig;
            dw.data[i] = (lp - lm) / (2.0 * h);
        }
        g.weights.push_back(std::move(dw));
        std::vector<double> db(p.biases[l].size(), 0.0);
        for (std::size_t i = 0; i < p.biases[l].size(); ++i) {
            const double orig = p.biases[l][i];
            p.biases[l][i] = orig + h;
            const double lp = loss_at();
            p.biases[l][i] = orig - h;
            const double lm = loss_at();
            p.biases[l][i] = orig;
            db[i] = (lp - lm) / (2.0 * h);
        }
        g.biases.push_back(std::move(db));
    }
    return g;
}

/// Max relative error between analytic and finite-difference gradients.
/// The 1e-3 denominator floor keeps near-zero coordinates from amplifying
/// quadrature noise.
inline double max_grad_rel_error(const aequity::Gradients& analytic,
                                 const aequity::Gradients& numeric) {
    double worst = 0.0;
    auto compare = [&](double a, double b) {
        const double rel = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
        worst = std::max(worst, rel);
    };
    for (std::size_t l = 0; l < analytic.weights.size(); ++l) {
        for (std::size_t i = 0; i < analytic.weights[l].size(); ++i) {
            compare(analytic.weights[l].data[i], numeric.weights[l].data[i]);
        }
        for (std::size_t i = 0; i < analytic.biases[l].size(); ++i) {
            compare(analytic.biases[l][i], numeric.biases[l][i]);
        }
    }
    return worst;
}

/// Exhaustive pairwise AUROC: fraction of (positive, negative) pairs with
/// score_pos > score_neg, ties 0.5.
inline double brute_auroc(std::span<const double> scores, std::span<const double> labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1.0) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0.0) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

/// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps, int depth = 24) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double x0, double x2, double f0, double f1, double f2, double whole, double tol,
            int d) -> double {
        const double x1l = 0.5 * (x0 + 0.5 * (x0 + x2));
        const double x1r = 0.5 * (0.5 * (x0 + x2) + x2);
        const double fl = f(x1l), fr = f(x1r);
        const double xc = 0.5 * (x0 + x2);
        const double left = (xc - x0) / 6.0 * (f0 + 4.0 * fl + f1);
        const double right = (x2 - xc) / 6.0 * (f1 + 4.0 * fr + f2);
        if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
            return left + right + (left + right - whole) / 15.0;
        }
        return rec(x0, xc, f0, fl, f1, left, 0.5 * tol, d - 1) +
               rec(xc, x2, f1, fr, f2, right, 0.5 * tol, d - 1);
    };
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    return rec(a, b, fa, fc, fb, whole, eps, depth);
}

/// P(T > t) for Student-t via numeric integration of the density
/// (substitution x = t + s/(1-s) maps the tail onto [0,1)).
inline double t_sf_quadrature(double t, double df) {
    const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                            0.5 * std::log(df * std::acos(-1.0));
    auto pdf = [&](double x) {
        return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(x * x / df));
    };
    if (t < 0.0) return 1.0 - t_sf_quadrature(-t, df);
    auto integrand = [&](double s) {
        const double denom = 1.0 - s;
        const double x = t + s / denom;
        return pdf(x) / (denom * denom);
    };
    return adaptive_simpson(integrand, 0.0, 1.0 - 1e-12, 1e-12);
}

/// P(F > f) via numeric integration of the F density.
inline double f_sf_quadrature(double f_value, double d1, double d2) {
    const double log_norm = std::lgamma(0.5 * (d1 + d2)) - std::lgamma(0.5 * d1) -
                            std::lgamma(0.5 * d2) + 0.5 * d1 * std::log(d1 / d2);
    auto pdf = [&](double x) {
        if (x <= 0.0) return 0.0;
        return std::exp(log_norm + (0.5 * d1 - 1.0) * std::log(x) -
                        0.5 * (d1 + d2) * std::log1p(d1 * x / d2));
    };
    auto integrand = [&](double s) {
        const double denom = 1.0 - s;
        const double x = f_value + s / denom;
        return pdf(x) / (denom * denom);
    };
    return adaptive_simpson(integrand, 0.0, 1.0 - 1e-12, 1e-12);
}

}  // namespace oracle
