#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aequity/common.hpp"
#include "aequity/dataset.hpp"
#include "aequity/metrics_basic.hpp"
#include "aequity/nn.hpp"
#include "aequity/rng.hpp"
#include "aequity/stats.hpp"

namespace aequity {

/// Threshold-based rates. precision/fdr are absent when no positives were
/// predicted.
struct ConfusionMetrics {
    double tpr = 0.0;
    double tnr = 0.0;
    double fpr = 0.0;
    double fnr = 0.0;
    std::optional<double> precision;
    std::optional<double> fdr;
    double predicted_prevalence = 0.0;
    bool no_predicted_positives = false;
    bool class_missing = false;  // rates for the absent class are 0-count identities
};

inline ConfusionMetrics confusion_metrics(std::span<const double> scores,
                                          std::span<const double> labels, double threshold) {
    if (scores.size() != labels.size()) throw DataError("confusion_metrics: size mismatch");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("confusion_metrics: threshold must be in (0,1)");
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        const bool pos = labels[i] == 1.0;
        if (pos && pred) ++tp;
        else if (pos) ++fn;
        else if (pred) ++fp;
        else ++tn;
    }
    ConfusionMetrics m;
    const std::size_t n_pos = tp + fn;
    const std::size_t n_neg = tn + fp;
    m.class_missing = n_pos == 0 || n_neg == 0;
    m.tpr = n_pos ? static_cast<double>(tp) / n_pos : 0.0;
    m.fnr = n_pos ? static_cast<double>(fn) / n_pos : 1.0;
    m.tnr = n_neg ? static_cast<double>(tn) / n_neg : 0.0;
    m.fpr = n_neg ? static_cast<double>(fp) / n_neg : 1.0;
    const std::size_t predicted = tp + fp;
    if (predicted > 0) {
        m.precision = static_cast<double>(tp) / predicted;
        m.fdr = 1.0 - *m.precision;
    } else {
        m.no_predicted_positives = true;
    }
    m.predicted_prevalence =
        scores.empty() ? 0.0 : static_cast<double>(predicted) / static_cast<double>(scores.size());
    return m;
}

struct GroupMetrics {
    std::size_t n_rows = 0;
    std::optional<double> auroc;  // absent when the group has a single class
    std::pair<double, double> auroc_ci{0.0, 0.0};
    ConfusionMetrics confusion;
};

/// Per-group AUROC and confusion metrics on a shared test view, with
/// bootstrap CIs, plus reference-minus-protected gaps.
struct FairnessReport {
    std::string label;
    std::string reference_group;
    std::string protected_group;
    std::map<std::string, GroupMetrics> per_group;
    std::map<std::string, double> gaps;  // metric name -> reference - protected
    std::vector<std::size_t> test_rows;  // row ids of the evaluation partition

    std::optional<double> auroc_gap() const {
        const auto it = gaps.find("auroc");
        if (it == gaps.end()) return std::nullopt;
        return it->second;
    }
};

/// Evaluate a trained scorer on a test view, split by group.
inline FairnessReport fairness_report(const NetworkParams& model, const DatasetView& test_view,
                                      const std::string& outcome_col,
                                      const std::string& reference_group,
                                      const std::string& protected_group, double threshold,
                                      std::size_t ci_bootstraps = 50, std::uint64_t seed = 17) {
    FairnessReport report;
    report.label = outcome_col;
    report.reference_group = reference_group;
    report.protected_group = protected_group;
    report.test_rows = test_view.rows;

    const Matrix x = gather_features(test_view);
    const Matrix y = gather_outcome(test_view, outcome_col);
    const Matrix s = forward(model, x);

    std::map<std::string, std::vector<std::size_t>> group_rows;
    for (std::size_t r = 0; r < test_view.rows.size(); ++r) {
        group_rows[test_view.ds->groups[test_view.rows[r]]].push_back(r);
    }

    for (const auto& [group, rows] : group_rows) {
        GroupMetrics gm;
        gm.n_rows = rows.size();
        std::vector<double> scores, labels;
        scores.reserve(rows.size());
        labels.reserve(rows.size());
        for (std::size_t r : rows) {
            scores.push_back(s(r, 0));
            labels.push_back(y(r, 0));
        }
        gm.confusion = confusion_metrics(scores, labels, threshold);
        try {
            gm.auroc = auroc(scores, labels);
            // percentile CI over row resamples; single-class resamples skipped
            std::vector<double> boot;
            Rng rng(mix_seed(seed, avalanche64(std::hash<std::string>{}(group))));
            for (std::size_t b = 0; b < ci_bootstraps; ++b) {
                std::vector<double> bs(rows.size()), bl(rows.size());
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const std::size_t j = rng.below(rows.size());
                    bs[i] = scores[j];
                    bl[i] = labels[j];
                }
                try {
                    boot.push_back(auroc(bs, bl));
                } catch (const StatError&) {
                }
            }
            gm.auroc_ci = boot.size() >= 2 ? percentile_ci(boot)
                                           : std::make_pair(*gm.auroc, *gm.auroc);
        } catch (const StatError&) {
            gm.auroc.reset();  // propagate as null
        }
        report.per_group[group] = gm;
    }

    const auto ref = report.per_group.find(reference_group);
    const auto prot = report.per_group.find(protected_group);
    if (ref != report.per_group.end() && prot != report.per_group.end()) {
        if (ref->second.auroc && prot->second.auroc) {
            report.gaps["auroc"] = *ref->second.auroc - *prot->second.auroc;
        }
        const ConfusionMetrics& a = ref->second.confusion;
        const ConfusionMetrics& b = prot->second.confusion;
        report.gaps["tpr"] = a.tpr - b.tpr;
        report.gaps["tnr"] = a.tnr - b.tnr;
        report.gaps["fpr"] = a.fpr - b.fpr;
        report.gaps["fnr"] = a.fnr - b.fnr;
        if (a.precision && b.precision) {
            report.gaps["precision"] = *a.precision - *b.precision;
            report.gaps["fdr"] = *a.fdr - *b.fdr;
        }
        report.gaps["predicted_prevalence"] = a.predicted_prevalence - b.predicted_prevalence;
    }
    return report;
}

/// Shrinkage of the reference-minus-protected AUROC gap between two runs.
struct BiasReduction {
    double bias_pre = 0.0;
    double bias_post = 0.0;
    double absolute = 0.0;
    std::optional<double> percent;  // absent when bias_pre == 0
};

inline BiasReduction bias_reduction(double bias_pre, double bias_post) {
    BiasReduction r;
    r.bias_pre = bias_pre;
    r.bias_post = bias_post;
    r.absolute = bias_pre - bias_post;
    if (bias_pre != 0.0) r.percent = 100.0 * r.absolute / bias_pre;
    return r;
}

inline BiasReduction bias_reduction(const FairnessReport& pre, const FairnessReport& post) {
    if (pre.reference_group != post.reference_group || pre.protected_group != post.protected_group) {
        throw ConfigError("bias_reduction: reports disagree on reference/protected groups");
    }
    const auto gp = pre.auroc_gap();
    const auto gq = post.auroc_gap();
    if (!gp || !gq) throw StatError("bias_reduction: AUROC gap unavailable in a report");
    return bias_reduction(*gp, *gq);
}

}  // namespace aequity
