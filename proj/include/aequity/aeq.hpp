#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aequity/curves.hpp"
#include "aequity/stats.hpp"

namespace aequity {

/// Per-(group, label) sample-size-to-learn estimate in log2 units, with its
/// bootstrap distribution. Values always sit at interior grid points.
struct AeqEstimate {
    std::string group;
    std::string label;
    std::vector<double> per_bootstrap;  // each = log2 of an interior grid size
    double mean = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};
    std::size_t bootstraps = 0;
    bool flat = false;  // every bootstrap curve was flat (range <= 1e-3)
    double grid_log2_min = 0.0;
    double grid_log2_max = 0.0;

    bool same_grid(const AeqEstimate& other) const {
        return grid_log2_min == other.grid_log2_min && grid_log2_max == other.grid_log2_max;
    }
};

/// A loss row with range below this is treated as flat (standardized data
/// puts untrained reconstruction loss near 1, so this is far below signal).
inline constexpr double kFlatCurveTolerance = 1e-3;

/// AEq per bootstrap: the grid point minimizing the discrete second
/// difference D[i] = L[i-1] - 2 L[i] + L[i+1] of the loss over the uniform
/// log2(n) axis, ties broken toward the smallest n. Aggregates the bootstrap
/// distribution into a mean and 95% percentile interval.
inline AeqEstimate aeq_from_curve(const LearningCurve& curve) {
    const std::size_t m = curve.grid.sizes.size();
    if (m < 4) throw ConfigError("aeq_from_curve: grid needs >= 4 sizes");
    if (curve.losses.empty()) throw DataError("aeq_from_curve: no bootstrap rows");

    AeqEstimate est;
    est.group = curve.group;
    est.label = curve.label;
    est.bootstraps = curve.losses.size();
    est.grid_log2_min = curve.grid.log2_at(0);
    est.grid_log2_max = curve.grid.log2_at(m - 1);

    std::size_t flat_rows = 0;
    for (const auto& row : curve.losses) {
        const auto [lo_it, hi_it] = std::minmax_element(row.begin(), row.end());
        if (*hi_it - *lo_it <= kFlatCurveTolerance) ++flat_rows;

        std::size_t best = 1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < m; ++i) {
            const double d = row[i - 1] - 2.0 * row[i] + row[i + 1];
            if (d < best_d) {  // strict: first minimum wins, i.e. smallest n
                best_d = d;
                best = i;
            }
        }
        est.per_bootstrap.push_back(curve.grid.log2_at(best));
    }
    est.flat = flat_rows == curve.losses.size();

    est.mean = sample_mean(est.per_bootstrap);
    if (est.per_bootstrap.size() >= 2) {
        est.ci95 = percentile_ci(est.per_bootstrap);
    } else {
        est.ci95 = {est.mean, est.mean};
    }
    return est;
}

/// Difference between two AEq estimates: mean difference, percentile-bootstrap
/// CI of the difference, and a Welch test on the two bootstrap samples.
struct DiffResult {
    double difference = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
    bool degenerate = false;
};

inline DiffResult aeq_difference(const AeqEstimate& a, const AeqEstimate& b,
                                 std::size_t resamples = 1000, std::uint64_t seed = 0x5EED) {
    if (a.per_bootstrap.size() < 2 || b.per_bootstrap.size() < 2) {
        throw StatError("aeq_difference: need >= 2 bootstrap values per estimate");
    }
    DiffResult r;
    r.difference = a.mean - b.mean;

    Rng rng(mix_seed(seed, 0xD1FF));
    std::vector<double> resampled(resamples);
    for (std::size_t k = 0; k < resamples; ++k) {
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < a.per_bootstrap.size(); ++i) {
            ma += a.per_bootstrap[rng.below(a.per_bootstrap.size())];
        }
        for (std::size_t i = 0; i < b.per_bootstrap.size(); ++i) {
            mb += b.per_bootstrap[rng.below(b.per_bootstrap.size())];
        }
        resampled[k] = ma / static_cast<double>(a.per_bootstrap.size()) -
                       mb / static_cast<double>(b.per_bootstrap.size());
    }
    r.ci95 = percentile_ci(resampled);

    const TTestResult tt = welch_t_test(a.per_bootstrap, b.per_bootstrap);
    r.t = tt.t;
    r.df = tt.df;
    r.p = tt.p;
    r.degenerate = tt.degenerate;
    return r;
}

/// Per-(group, label) AEq over a dataset: filter to label-positive rows of
/// the group, run the bootstrapped curve, apply the curvature rule.
inline AeqEstimate compute_aeq(const FeatureDataset& ds, const std::string& group,
                               const std::string& outcome_col, const SampleGrid& grid,
                               const CurveConfig& cfg) {
    const DatasetView view = filter_view(ds, group, outcome_col);
    if (view.empty()) {
        throw DataError("compute_aeq: no rows for group '" + group + "', label '" + outcome_col + "'");
    }
    return aeq_from_curve(learning_curve(view, grid, cfg));
}

/// Joint AEq: balanced merge of the per-group label-positive views, then the
/// same curve machinery.
inline AeqEstimate compute_joint_aeq(const FeatureDataset& ds,
                                     const std::vector<std::string>& groups,
                                     const std::string& outcome_col, const SampleGrid& grid,
                                     const CurveConfig& cfg, std::uint64_t merge_seed) {
    std::vector<DatasetView> views;
    std::size_t total = 0;
    for (const auto& g : groups) {
        views.push_back(filter_view(ds, g, outcome_col));
        total += views.back().size();
    }
    const std::size_t n_total = (total / views.size()) * views.size();
    DatasetView joint = balanced_merge(views, n_total, merge_seed);
    joint.label = outcome_col;
    AeqEstimate est = aeq_from_curve(learning_curve(joint, grid, cfg));
    est.group = "joint";
    return est;
}

}  // namespace aequity
