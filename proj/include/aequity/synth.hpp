#pragma once

#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "aequity/common.hpp"
#include "aequity/dataset.hpp"
#include "aequity/rng.hpp"

namespace aequity {

enum class BiasKind { Sampling, Complexity, Label };

inline const char* to_string(BiasKind k) {
    switch (k) {
        case BiasKind::Sampling: return "sampling";
        case BiasKind::Complexity: return "complexity";
        case BiasKind::Label: return "label";
    }
    return "?";
}

/// Parameters for the planted-bias generators.
///
/// Cluster means are dense +-amplitude sign patterns over all features, so
/// the class structure carries most of the per-feature variance and the
/// learning onset of a small autoencoder is sharp within a 16..1024 grid.
/// Pattern means sit >= 4 sigma apart (unit-variance noise).
struct SynthSpec {
    std::size_t n_per_group = 1000;  // per-group size before skew
    std::size_t n_features = 20;
    BiasKind kind = BiasKind::Sampling;
    double skew_ratio = 9.0;          // sampling: majority:minority
    std::size_t extra_components = 4;  // complexity: minority components per label
    double flip_rate = 0.3;           // label: minority flip probability
    std::uint64_t seed = 1;

    std::string majority_group = "A";
    std::string minority_group = "B";

    double pattern_amplitude = default_pattern_amplitude();  // per-feature magnitude of cluster means

    static double default_pattern_amplitude() {
        if (const char* e = std::getenv("AEQ_CAL_AMP")) return std::atof(e);
        return 1.2;
    }

    /// Outcome columns to emit as (name, minority flip rate). Empty means the
    /// kind's default: a single clean "outcome", plus "outcome_clean" for the
    /// label kind.
    std::vector<std::pair<std::string, double>> outcome_columns;

    void validate() const {
        if (n_per_group < 8) throw ConfigError("synth: n_per_group must be >= 8");
        if (n_features < 8) throw ConfigError("synth: n_features must be >= 8");
        if (!(skew_ratio >= 1.0)) throw ConfigError("synth: skew_ratio must be >= 1");
        if (extra_components < 1) throw ConfigError("synth: extra_components must be >= 1");
        if (!(flip_rate >= 0.0 && flip_rate < 1.0)) throw ConfigError("synth: flip_rate must be in [0,1)");
        if (!(pattern_amplitude > 0.0)) throw ConfigError("synth: pattern_amplitude must be positive");
    }
};

namespace detail {

struct GroupLayout {
    std::size_t majority_rows = 0;
    std::size_t minority_rows = 0;
};

inline GroupLayout skewed_layout(const SynthSpec& spec) {
    const double total = 2.0 * static_cast<double>(spec.n_per_group);
    GroupLayout layout;
    layout.majority_rows =
        static_cast<std::size_t>(std::llround(total * spec.skew_ratio / (spec.skew_ratio + 1.0)));
    layout.minority_rows = static_cast<std::size_t>(total) - layout.majority_rows;
    if (layout.minority_rows < 4) throw ConfigError("synth: skew leaves the minority group too small");
    return layout;
}

/// Balanced random sign pattern: exactly half the entries +1 (d even), so
/// every pattern is exactly orthogonal to the all-ones pattern.
inline std::vector<double> sign_pattern(std::size_t d, Rng& rng) {
    std::vector<double> h(d, -1.0);
    for (std::size_t i = 0; i < d / 2; ++i) h[i] = 1.0;
    for (std::size_t i = d; i > 1; --i) std::swap(h[i - 1], h[rng.below(i)]);
    return h;
}

struct RowPlan {
    std::string group;
    std::string patient_id;
    double clean_label = 0.0;
    bool minority = false;
};

/// positive_per_10: positives per 10 rows (exact class prevalence).
inline std::vector<RowPlan> layout_rows(const SynthSpec& spec, std::size_t majority_rows,
                                        std::size_t minority_rows, std::size_t positive_per_10 = 5) {
    std::vector<RowPlan> plan;
    plan.reserve(majority_rows + minority_rows);
    std::size_t pid = 0;
    auto add_group = [&](const std::string& name, std::size_t count, bool minority) {
        for (std::size_t i = 0; i < count; ++i, ++pid) {
            RowPlan row;
            row.group = name;
            row.patient_id = "p" + std::to_string(pid);
            row.clean_label = i % 10 < positive_per_10 ? 1.0 : 0.0;
            row.minority = minority;
            plan.push_back(std::move(row));
        }
    };
    add_group(spec.majority_group, majority_rows, false);
    add_group(spec.minority_group, minority_rows, true);
    return plan;
}

inline FeatureDataset build_dataset(const SynthSpec& spec, const std::vector<RowPlan>& plan,
                                    const std::function<void(const RowPlan&, std::size_t row_index,
                                                             Rng&, double*)>& fill_features) {
    FeatureDataset ds;
    ds.features = Matrix(plan.size(), spec.n_features);
    for (std::size_t c = 0; c < spec.n_features; ++c) ds.feature_names.push_back("f" + std::to_string(c));

    std::vector<std::pair<std::string, double>> columns = spec.outcome_columns;
    if (columns.empty()) {
        columns.emplace_back("outcome", spec.kind == BiasKind::Label ? spec.flip_rate : 0.0);
        if (spec.kind == BiasKind::Label) columns.emplace_back("outcome_clean", 0.0);
    }
    for (const auto& [name, _] : columns) ds.outcomes[name] = {};

    for (std::size_t r = 0; r < plan.size(); ++r) {
        const RowPlan& row = plan[r];
        ds.groups.push_back(row.group);
        ds.patient_ids.push_back(row.patient_id);
        const std::uint64_t row_seed = mix_seed(spec.seed, r);
        Rng feature_rng(mix_seed(row_seed, 1));
        fill_features(row, r, feature_rng, ds.features.row(r));
        for (std::size_t ci = 0; ci < columns.size(); ++ci) {
            double label = row.clean_label;
            const double rate = columns[ci].second;
            if (row.minority && rate > 0.0) {
                Rng flip_rng(mix_seed(row_seed, 0xF11A + ci));
                if (flip_rng.uniform() < rate) label = 1.0 - label;
            }
            ds.outcomes[columns[ci].first].push_back(label);
        }
    }
    return ds;
}

}  // namespace detail

/// Sampling bias: one group dramatically under-represented. Positives share
/// the class component across groups, but scarce collection leaves the
/// under-sampled group's positives with extra unstructured acquisition noise,
/// so its estimate reads high while the balanced merge sits back down at the
/// well-sampled group's level (the sampling signature: joint at or below the
/// over-sampled group). The under-sampled group's negatives project like
/// positives onto the shared axis and separate only along a group-specific
/// pattern, which is what a majority-trained model never learns.
/// skew_ratio == 1 collapses to two exchangeable groups.
inline FeatureDataset gen_sampling_bias(const SynthSpec& spec) {
    SynthSpec s = spec;
    s.kind = BiasKind::Sampling;
    s.validate();
    const auto layout = detail::skewed_layout(s);
    const auto plan = detail::layout_rows(s, layout.majority_rows, layout.minority_rows);
    const double amp = s.pattern_amplitude;
    const bool neutral = s.skew_ratio == 1.0;
    const std::size_t d = s.n_features;

    Rng pattern_rng(mix_seed(s.seed, 0x4AD));
    const std::vector<double> w_sep = detail::sign_pattern(d, pattern_rng);

    return detail::build_dataset(s, plan, [&, amp, d, neutral](const detail::RowPlan& row,
                                                               std::size_t, Rng& rng, double* x) {
        for (std::size_t c = 0; c < d; ++c) x[c] = rng.normal();
        if (row.clean_label == 1.0) {
            for (std::size_t c = 0; c < d; ++c) x[c] += amp;  // shared positive component
        } else if (!row.minority || neutral) {
            for (std::size_t c = 0; c < d; ++c) x[c] -= amp;
        } else {
            // same all-ones projection as the positives (balanced pattern sums
            // to zero), separable from them only along the pattern itself
            for (std::size_t c = 0; c < d; ++c) x[c] += amp - 1.2 * amp * w_sep[c];
        }
    });
}

/// Complexity bias: equal group sizes, but the minority presents each class
/// as extra_components well-separated components whose class label is the
/// parity of a sign-pattern code (a sample-hungry nonlinear boundary), while
/// the majority has one component per class. extra_components == 1 collapses
/// to the symmetric case.
inline FeatureDataset gen_complexity_bias(const SynthSpec& spec) {
    SynthSpec s = spec;
    s.kind = BiasKind::Complexity;
    s.validate();
    const auto plan = detail::layout_rows(s, s.n_per_group, s.n_per_group);
    const double amp = s.pattern_amplitude;
    const std::size_t d = s.n_features;
    const std::size_t k = s.extra_components;

    // component code: m balanced sign patterns; corner bits pick the signs,
    // class = parity of the bits. The constellation is centered (no mean
    // travel) and its between-component variance is kept near the noise
    // level, so resolving it is a genuinely slow discovery problem compared
    // with the majority's mean offset.
    std::size_t m = 1;
    while ((std::size_t{1} << (m - 1)) < k) ++m;
    Rng pattern_rng(mix_seed(s.seed, 0xC0DE));
    std::vector<std::vector<double>> patterns;
    for (std::size_t i = 0; i < m; ++i) patterns.push_back(detail::sign_pattern(d, pattern_rng));

    std::vector<std::vector<std::vector<double>>> centers(2);  // [class][component][feature]
    const double scale = 2.4 / std::sqrt(static_cast<double>(m));
    for (std::size_t corner = 0; corner < (std::size_t{1} << m); ++corner) {
        std::vector<double> center(d, 0.0);
        std::size_t parity = 0;
        for (std::size_t bit = 0; bit < m; ++bit) {
            const double sign = (corner >> bit) & 1 ? 1.0 : -1.0;
            parity ^= (corner >> bit) & 1;
            for (std::size_t c = 0; c < d; ++c) center[c] += sign * scale * patterns[bit][c];
        }
        auto& dst = centers[parity];
        if (dst.size() < k) dst.push_back(std::move(center));
    }

    return detail::build_dataset(s, plan, [&, amp, d, k](const detail::RowPlan& row,
                                                         std::size_t row_index, Rng& rng, double* x) {
        for (std::size_t c = 0; c < d; ++c) x[c] = rng.normal();
        const std::size_t cls = row.clean_label == 1.0 ? 1 : 0;
        if (!row.minority || k == 1) {
            const double shift = cls == 1 ? amp : -amp;
            for (std::size_t c = 0; c < d; ++c) x[c] += shift;
            return;
        }
        Rng blob_rng(mix_seed(mix_seed(s.seed, row_index), 2));
        const auto& center = centers[cls][blob_rng.below(centers[cls].size())];
        for (std::size_t c = 0; c < d; ++c) x[c] += center[c];
    });
}

/// Label bias: identical feature distributions in both groups; the minority's
/// observed labels are flipped independently at flip_rate, and clean labels
/// are retained in "outcome_clean" (or per the configured outcome columns).
/// The positive class is one compact component while the negative class is a
/// wide four-component constellation, so mislabeled-in negatives turn the
/// minority's observed-positive view into a resolution-bound mixture. With
/// positive prevalence 0.3 and flip_rate 0.3 that view is about half
/// mislabeled negatives.
inline FeatureDataset gen_label_bias(const SynthSpec& spec) {
    SynthSpec s = spec;
    s.kind = BiasKind::Label;
    s.validate();
    const auto plan = detail::layout_rows(s, s.n_per_group, s.n_per_group, 3);
    const double amp = s.pattern_amplitude;  // class offset; the mixed view is
                             // resolution-bound through the wide negative constellation
    const std::size_t d = s.n_features;

    // negative-class constellation: corners of two balanced patterns around
    // -amp*(1,..,1), near the noise level so the contaminated view resolves
    // slowly
    Rng pattern_rng(mix_seed(s.seed, 0x1AB));
    const std::vector<double> w1 = detail::sign_pattern(d, pattern_rng);
    const std::vector<double> w2 = detail::sign_pattern(d, pattern_rng);

    return detail::build_dataset(
        s, plan, [&, amp, d](const detail::RowPlan& row, std::size_t row_index, Rng& rng, double* x) {
            if (row.clean_label == 1.0) {
                for (std::size_t c = 0; c < d; ++c) x[c] = rng.normal() + amp;
                return;
            }
            Rng comp_rng(mix_seed(mix_seed(s.seed, row_index), 3));
            const std::size_t corner = comp_rng.below(4);
            const double s1 = corner & 1 ? 1.0 : -1.0;
            const double s2 = corner & 2 ? 1.0 : -1.0;
            for (std::size_t c = 0; c < d; ++c) {
                x[c] = rng.normal() - amp + 2.4 * (s1 * w1[c] + s2 * w2[c]) / std::sqrt(2.0);
            }
        });
}

inline FeatureDataset generate(const SynthSpec& spec) {
    switch (spec.kind) {
        case BiasKind::Sampling: return gen_sampling_bias(spec);
        case BiasKind::Complexity: return gen_complexity_bias(spec);
        case BiasKind::Label: return gen_label_bias(spec);
    }
    throw ConfigError("generate: unknown bias kind");
}

}  // namespace aequity
