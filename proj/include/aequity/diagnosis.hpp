#pragma once

#include <cmath>
#include <map>
#include <string>

#include "aequity/aeq.hpp"

namespace aequity {

enum class BiasType { Sampling, Complexity, LabelFlag, Indeterminate, None };

enum class CurationAction { GroupBalance, Prioritize, ReselectOutcome, None };

inline const char* to_string(BiasType t) {
    switch (t) {
        case BiasType::Sampling: return "sampling";
        case BiasType::Complexity: return "complexity";
        case BiasType::LabelFlag: return "label_flag";
        case BiasType::Indeterminate: return "indeterminate";
        case BiasType::None: return "none";
    }
    return "?";
}

inline const char* to_string(CurationAction a) {
    switch (a) {
        case CurationAction::GroupBalance: return "group_balance";
        case CurationAction::Prioritize: return "prioritize";
        case CurationAction::ReselectOutcome: return "reselect_outcome";
        case CurationAction::None: return "none";
    }
    return "?";
}

struct Recommendation {
    CurationAction action = CurationAction::None;
    std::string group;  // target group for prioritize
};

/// Per-label classification of the dataset bias, with the statistical
/// evidence that produced it.
struct BiasDiagnosis {
    std::string label;
    std::map<std::string, AeqEstimate> group_estimates;
    AeqEstimate joint;
    BiasType bias_type = BiasType::Indeterminate;
    Recommendation recommendation;
    DiffResult gap;           // first group minus second group, as passed
    DiffResult joint_vs_lo;   // joint minus lower-mean group
    DiffResult joint_vs_hi;   // joint minus higher-mean group
    bool label_advisory = false;  // A-B gap significant, independent of type
    std::string lo_group, hi_group;
};

/// Ordered decision rules over the two group estimates and their joint:
///   1. sampling    — joint mean at or below the lower group mean, or joint
///                    indistinguishable from the lower group while clearly
///                    below the higher one;
///   2. complexity  — joint mean above the higher group mean, or joint
///                    closer to the higher group while clearly above the
///                    lower one;
///   3. label flag  — neither rule fired but the group gap is significant;
///   4. none        — nothing significant anywhere;
///   5. indeterminate otherwise.
/// The mitigation target for complexity is the configured protected group,
/// not the higher-AEq group: which population to prioritize is policy input,
/// the metric only types the bias.
inline BiasDiagnosis classify_bias(const AeqEstimate& est_a, const AeqEstimate& est_b,
                                   const AeqEstimate& est_joint, const std::string& protected_group,
                                   double alpha) {
    if (!est_a.same_grid(est_b) || !est_a.same_grid(est_joint)) {
        throw ConfigError("classify_bias: estimates computed on mismatched grids");
    }
    if (est_a.bootstraps != est_b.bootstraps || est_a.bootstraps != est_joint.bootstraps) {
        throw ConfigError("classify_bias: estimates have mismatched bootstrap counts");
    }

    BiasDiagnosis d;
    d.label = est_a.label;
    d.group_estimates[est_a.group] = est_a;
    d.group_estimates[est_b.group] = est_b;
    d.joint = est_joint;

    const AeqEstimate& lo = est_a.mean <= est_b.mean ? est_a : est_b;
    const AeqEstimate& hi = est_a.mean <= est_b.mean ? est_b : est_a;
    d.lo_group = lo.group;
    d.hi_group = hi.group;

    d.gap = aeq_difference(est_a, est_b);
    d.joint_vs_lo = aeq_difference(est_joint, lo);
    d.joint_vs_hi = aeq_difference(est_joint, hi);
    d.label_advisory = d.gap.p < alpha;

    const double mj = est_joint.mean;
    const bool sampling = mj <= lo.mean ||
                          (d.joint_vs_lo.p >= alpha && d.joint_vs_hi.p < alpha && mj < hi.mean);
    const bool complexity =
        mj > hi.mean || (std::abs(mj - hi.mean) < std::abs(mj - lo.mean) && d.joint_vs_lo.p < alpha);

    if (sampling) {
        d.bias_type = BiasType::Sampling;
        d.recommendation = {CurationAction::GroupBalance, ""};
    } else if (complexity) {
        d.bias_type = BiasType::Complexity;
        d.recommendation = {CurationAction::Prioritize, protected_group};
    } else if (d.label_advisory) {
        d.bias_type = BiasType::LabelFlag;
        d.recommendation = {CurationAction::ReselectOutcome, ""};
    } else if (d.joint_vs_lo.p >= alpha && d.joint_vs_hi.p >= alpha) {
        d.bias_type = BiasType::None;
        d.recommendation = {CurationAction::None, ""};
    } else {
        d.bias_type = BiasType::Indeterminate;
        d.recommendation = {CurationAction::None, ""};
    }
    return d;
}

struct OutcomeSelection {
    std::map<std::string, DiffResult> gaps;
    std::string selected;
    std::string reason;
    bool warning = false;  // every candidate's gap is significant
};

/// Pick the outcome with the smallest absolute group gap. If its CI contains
/// zero it is an unbiased candidate; otherwise it is merely the least biased
/// and the selection carries a warning.
inline OutcomeSelection select_outcome(const std::map<std::string, DiffResult>& gaps, double alpha) {
    if (gaps.empty()) throw ConfigError("select_outcome: no candidates");
    OutcomeSelection sel;
    sel.gaps = gaps;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [name, diff] : gaps) {
        if (std::abs(diff.difference) < best) {
            best = std::abs(diff.difference);
            sel.selected = name;
        }
    }
    const DiffResult& chosen = gaps.at(sel.selected);
    const bool ci_includes_zero = chosen.ci95.first <= 0.0 && chosen.ci95.second >= 0.0;
    if (ci_includes_zero || chosen.p >= alpha) {
        sel.reason = "unbiased candidate found";
    } else {
        sel.reason = "least-biased candidate, all significant";
        sel.warning = true;
    }
    return sel;
}

}  // namespace aequity
