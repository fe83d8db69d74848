#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "aequity/dataset.hpp"
#include "aequity/diagnosis.hpp"
#include "aequity/metrics.hpp"
#include "aequity/nn.hpp"

namespace aequity {

enum class CurationStrategy { Naive, GroupBalance, Prioritize };

inline const char* to_string(CurationStrategy s) {
    switch (s) {
        case CurationStrategy::Naive: return "naive";
        case CurationStrategy::GroupBalance: return "group_balance";
        case CurationStrategy::Prioritize: return "prioritize";
    }
    return "?";
}

/// How to fill a training budget from the ambient pool.
struct CurationPlan {
    CurationStrategy strategy = CurationStrategy::Naive;
    std::string prioritize_group;  // Prioritize only
    std::size_t budget = 0;
    // filled in by curate():
    std::map<std::string, std::size_t> realized_counts;
    bool with_replacement = false;
};

/// Execute a curation plan against a training pool.
///   naive          — uniform draw of budget rows (keeps the ambient mix);
///   group_balance  — equal per-group counts;
///   prioritize(g)  — balanced seed of min(budget/4, smallest group pool)
///                    rows, remainder filled from g.
/// Draws exceeding a pool fall back to replacement and are flagged.
inline DatasetView curate(const DatasetView& pool, CurationPlan& plan, std::uint64_t seed) {
    if (pool.empty()) throw DataError("curate: empty pool");
    if (plan.budget == 0) throw ConfigError("curate: zero budget");

    std::map<std::string, DatasetView> by_group;
    for (std::size_t r : pool.rows) {
        const std::string& g = pool.ds->groups[r];
        auto [it, inserted] = by_group.try_emplace(g);
        if (inserted) {
            it->second.ds = pool.ds;
            it->second.group = g;
        }
        it->second.rows.push_back(r);
    }
    if (plan.strategy == CurationStrategy::Prioritize && !by_group.count(plan.prioritize_group)) {
        throw DataError("curate: pool has no rows for prioritized group '" + plan.prioritize_group + "'");
    }

    DatasetView out;
    out.ds = pool.ds;
    plan.realized_counts.clear();
    plan.with_replacement = false;

    auto draw = [&](const DatasetView& src, std::size_t n, std::uint64_t tag) {
        const bool need_replacement = n > src.size();
        plan.with_replacement = plan.with_replacement || need_replacement;
        const DatasetView part = subsample(src, n, mix_seed(seed, tag), need_replacement);
        out.rows.insert(out.rows.end(), part.rows.begin(), part.rows.end());
        out.with_replacement = out.with_replacement || part.with_replacement;
    };

    switch (plan.strategy) {
        case CurationStrategy::Naive:
            draw(pool, plan.budget, 0xA11);
            break;
        case CurationStrategy::GroupBalance: {
            const std::size_t quota = plan.budget / by_group.size();
            std::size_t tag = 0;
            for (const auto& [g, view] : by_group) draw(view, quota, 0xB0B + tag++);
            break;
        }
        case CurationStrategy::Prioritize: {
            std::size_t min_pool = SIZE_MAX;
            for (const auto& [g, view] : by_group) min_pool = std::min(min_pool, view.size());
            std::size_t seed_total = std::min(plan.budget / 4, min_pool);
            seed_total -= seed_total % by_group.size();
            const std::size_t quota = seed_total / by_group.size();
            std::size_t tag = 0;
            for (const auto& [g, view] : by_group) {
                if (quota > 0) draw(view, quota, 0xC0C + tag);
                ++tag;
            }
            draw(by_group.at(plan.prioritize_group), plan.budget - quota * by_group.size(), 0xF111);
            break;
        }
    }
    for (std::size_t r : out.rows) plan.realized_counts[pool.ds->groups[r]] += 1;
    return out;
}

inline std::vector<std::size_t> classifier_dims(std::size_t input) { return {input, 64, 32, 1}; }

inline std::vector<Activation> classifier_activations() {
    return {Activation::Relu, Activation::Relu, Activation::Sigmoid};
}

inline TrainConfig classifier_train_config() {
    TrainConfig cfg;
    cfg.loss_kind = LossKind::BinaryCrossEntropy;
    cfg.max_epochs = 30;
    return cfg;
}

/// Train the downstream classifier on a curated view, early-stopped on
/// validation AUROC.
inline NetworkParams train_classifier(const DatasetView& train_view, const DatasetView& val_view,
                                      const std::string& outcome_col, const TrainConfig& cfg,
                                      std::uint64_t seed) {
    const Matrix x = gather_features(train_view);
    const Matrix y = gather_outcome(train_view, outcome_col);
    const Matrix vx = gather_features(val_view);
    const Matrix vy = gather_outcome(val_view, outcome_col);
    NetworkParams net =
        init_network(classifier_dims(x.cols), classifier_activations(), mix_seed(seed, 0xC1A55));
    return train(std::move(net), x, y, &vx, &vy, cfg, mix_seed(seed, 0x0D0E)).params;
}

struct MitigationArm {
    CurationPlan plan;
    FairnessReport report;
};

struct MitigationResult {
    std::map<std::string, MitigationArm> arms;            // "naive", "balanced", "prioritize"
    std::map<std::string, BiasReduction> reductions;      // arm -> reduction vs naive
    std::string recommended_arm;                          // empty when no actionable rec
    std::vector<std::size_t> test_rows;                   // shared evaluation partition
    std::string note;
};

/// Run the naive arm, the balanced-ERM benchmark arm, and (when the diagnosis
/// prescribes prioritization) the prioritize arm on a shared patient-level
/// 60-20-20 split; all arms are evaluated on the identical test partition.
inline MitigationResult run_mitigation(const FeatureDataset& ds, const BiasDiagnosis& diagnosis,
                                       const std::string& outcome_col,
                                       const std::string& reference_group,
                                       const std::string& protected_group, std::size_t budget,
                                       const TrainConfig& train_cfg, double threshold,
                                       std::uint64_t seed) {
    const auto parts = split_by_patient(ds, {0.6, 0.2, 0.2}, mix_seed(seed, 0x5CA1E));
    const DatasetView& train_pool = parts[0];
    const DatasetView& val_view = parts[1];
    const DatasetView& test_view = parts[2];
    if (budget == 0) budget = train_pool.size();

    MitigationResult result;
    result.test_rows = test_view.rows;

    auto run_arm = [&](const std::string& name, CurationStrategy strategy,
                       const std::string& prio_group, std::uint64_t arm_tag) {
        MitigationArm arm;
        arm.plan.strategy = strategy;
        arm.plan.prioritize_group = prio_group;
        arm.plan.budget = budget;
        const DatasetView curated = curate(train_pool, arm.plan, mix_seed(seed, arm_tag));
        const NetworkParams model =
            train_classifier(curated, val_view, outcome_col, train_cfg, mix_seed(seed, arm_tag + 1));
        arm.report = fairness_report(model, test_view, outcome_col, reference_group, protected_group,
                                     threshold, 50, mix_seed(seed, arm_tag + 2));
        result.arms[name] = std::move(arm);
    };

    run_arm("naive", CurationStrategy::Naive, "", 0x1000);
    run_arm("balanced", CurationStrategy::GroupBalance, "", 0x2000);

    switch (diagnosis.recommendation.action) {
        case CurationAction::GroupBalance:
            result.recommended_arm = "balanced";
            break;
        case CurationAction::Prioritize:
            run_arm("prioritize", CurationStrategy::Prioritize, diagnosis.recommendation.group, 0x3000);
            result.recommended_arm = "prioritize";
            break;
        case CurationAction::ReselectOutcome:
            result.note = "diagnosis recommends outcome reselection; no curation arm applies";
            break;
        case CurationAction::None:
            result.note = "no actionable recommendation; ran naive and balanced arms only";
            break;
    }

    const FairnessReport& naive = result.arms.at("naive").report;
    for (const auto& [name, arm] : result.arms) {
        if (name == "naive") continue;
        if (naive.auroc_gap() && arm.report.auroc_gap()) {
            result.reductions[name] = bias_reduction(naive, arm.report);
        }
    }
    return result;
}

}  // namespace aequity
