#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "aequity/aeq.hpp"
#include "aequity/curves.hpp"
#include "aequity/dataset.hpp"
#include "aequity/diagnosis.hpp"
#include "aequity/metrics.hpp"
#include "aequity/mitigation.hpp"
#include "aequity/synth.hpp"

namespace aequity {

inline constexpr const char* kVersion = "0.1.0";

/// Stable 64-bit string hash (FNV-1a); std::hash is not portable enough for
/// seed derivation.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Number of rows in the balanced audit subset AEq is computed from.
inline constexpr std::size_t kAuditSubsetSize = 1024;

struct RunArtifacts {
    std::string root_dir;
    std::string aeq_table_path;
    std::string diagnosis_path;
    std::string curves_path;
    std::string fairness_path;      // mitigate only
    std::string fairness_json_path; // mitigate only
    std::string manifest_path;
    int exit_code = 0;
};

struct LabelDiagnosis {
    std::string label;
    std::string reference;  // compared against the protected group
    BiasDiagnosis diagnosis;
};

struct MeasureResult {
    RunConfig cfg;
    std::vector<std::string> groups;
    std::string protected_group;
    std::string reference_group;  // largest non-protected group
    std::vector<std::string> labels;
    std::map<std::string, std::string> primary_label;  // outcome -> audited label
    std::vector<AeqEstimate> estimates;
    std::vector<LearningCurve> curves;
    std::vector<LabelDiagnosis> diagnoses;
    std::map<std::string, DiffResult> outcome_gaps;  // protected minus reference, primary label
    std::optional<OutcomeSelection> selection;
    bool audit_with_replacement = false;
    int exit_code = 0;
};

namespace detail {

inline DatasetView filter_rows(const DatasetView& base, const std::string& group,
                               const std::string& outcome_col) {
    DatasetView v;
    v.ds = base.ds;
    v.group = group;
    v.label = outcome_col;
    v.with_replacement = base.with_replacement;
    const auto it = base.ds->outcomes.find(outcome_col);
    if (it == base.ds->outcomes.end()) throw DataError("unknown outcome column: " + outcome_col);
    for (std::size_t r : base.rows) {
        if (base.ds->groups[r] == group && it->second[r] == 1.0) v.rows.push_back(r);
    }
    return v;
}

inline bool is_binary_column(const std::vector<double>& col) {
    for (double v : col) {
        if (v != 0.0 && v != 1.0) return false;
    }
    return true;
}

}  // namespace detail

/// Expand continuous outcome columns into high/low risk labels at the 50th
/// percentile ("<col>:high", "<col>:low"); binary columns audit as-is.
/// Returns the audited label list and the primary label per outcome.
inline std::pair<std::vector<std::string>, std::map<std::string, std::string>> prepare_labels(
    FeatureDataset& ds, const std::vector<std::string>& outcome_cols) {
    std::vector<std::string> labels;
    std::map<std::string, std::string> primary;
    for (const auto& col : outcome_cols) {
        const auto& values = ds.outcomes.at(col);
        if (detail::is_binary_column(values)) {
            labels.push_back(col);
            primary[col] = col;
        } else {
            const RiskStrata strata = risk_stratify(values, 50.0);
            std::vector<double> low(strata.labels.size());
            for (std::size_t i = 0; i < low.size(); ++i) low[i] = 1.0 - strata.labels[i];
            ds.outcomes[col + ":high"] = strata.labels;
            ds.outcomes[col + ":low"] = low;
            labels.push_back(col + ":high");
            labels.push_back(col + ":low");
            primary[col] = col + ":high";
        }
    }
    return {labels, primary};
}

/// The measure pipeline: load, standardize, draw the balanced audit subset,
/// compute per-group/joint AEq per label, run the gap tests and bias
/// classification, and pick the least-biased outcome.
inline MeasureResult run_measure_on(FeatureDataset ds, const RunConfig& cfg, std::size_t threads) {
    MeasureResult result;
    result.cfg = cfg;

    if (!ds.standardized) ds = standardize(std::move(ds));

    result.groups = ds.distinct_groups();
    if (result.groups.size() < 2) throw DataError("measure: need at least 2 groups");

    // protected group defaults to the smallest (most under-represented) group
    if (!cfg.protected_group.empty()) {
        if (!std::count(result.groups.begin(), result.groups.end(), cfg.protected_group)) {
            throw ConfigError("protected_group '" + cfg.protected_group + "' not present in data");
        }
        result.protected_group = cfg.protected_group;
    } else {
        std::size_t best = SIZE_MAX;
        for (const auto& g : result.groups) {
            const std::size_t n = ds.group_count(g);
            if (n < best) {
                best = n;
                result.protected_group = g;
            }
        }
    }
    {
        std::size_t best = 0;
        for (const auto& g : result.groups) {
            if (g == result.protected_group) continue;
            const std::size_t n = ds.group_count(g);
            if (n > best) {
                best = n;
                result.reference_group = g;
            }
        }
    }

    auto [labels, primary] = prepare_labels(ds, cfg.outcome_cols);
    result.labels = labels;
    result.primary_label = primary;

    const SampleGrid grid = make_grid(cfg.min_sample_size, cfg.max_sample_size);

    // balanced audit subset over groups
    std::vector<DatasetView> group_views;
    for (const auto& g : result.groups) {
        DatasetView v;
        v.ds = &ds;
        v.group = g;
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            if (ds.groups[r] == g) v.rows.push_back(r);
        }
        group_views.push_back(std::move(v));
    }
    const DatasetView audit = balanced_merge(group_views, kAuditSubsetSize,
                                             mix_seed(cfg.seed_u64(), fnv1a64("audit")));
    result.audit_with_replacement = audit.with_replacement;

    std::vector<std::string> other_groups;
    for (const auto& g : result.groups) {
        if (g != result.protected_group) other_groups.push_back(g);
    }

    for (const auto& label : result.labels) {
        CurveConfig ccfg;
        ccfg.bootstraps = cfg.bootstraps;
        ccfg.threads = threads;
        // one seed per label, shared by every group and the joint, so each
        // bootstrap index compares like against like
        ccfg.start_seed = mix_seed(cfg.seed_u64(), fnv1a64(label));

        // per-group views trimmed to a common size so the joint is an exact
        // balanced merge of the same row arrays (its bootstrap cells then
        // share the groups' sampling streams)
        std::map<std::string, DatasetView> views;
        std::size_t common = SIZE_MAX;
        for (const auto& g : result.groups) {
            DatasetView view = detail::filter_rows(audit, g, label);
            if (view.size() < grid.min_n()) {
                throw DataError("measure: audit view for group '" + g + "', label '" + label +
                                "' has " + std::to_string(view.size()) +
                                " rows, below the minimum grid size " + std::to_string(grid.min_n()) +
                                "; lower min_sample_size");
            }
            common = std::min(common, view.size());
            views[g] = std::move(view);
        }
        std::map<std::string, AeqEstimate> ests;
        for (const auto& g : result.groups) {
            DatasetView view = subsample(views.at(g), common,
                                         mix_seed(ccfg.start_seed, fnv1a64("trim:" + g)), false);
            LearningCurve curve = learning_curve(view, grid, ccfg);
            AeqEstimate est = aeq_from_curve(curve);
            result.curves.push_back(std::move(curve));
            result.estimates.push_back(est);
            views[g] = std::move(view);
            ests[g] = std::move(est);
        }

        for (const auto& ref : other_groups) {
            DatasetView joint;
            joint.ds = views.at(ref).ds;
            joint.label = label;
            joint.group = other_groups.size() == 1 ? "joint" : "joint(" + ref + "," +
                                                                   result.protected_group + ")";
            joint.rows = views.at(ref).rows;
            const auto& prot_rows = views.at(result.protected_group).rows;
            joint.rows.insert(joint.rows.end(), prot_rows.begin(), prot_rows.end());
            joint.balanced_halves = common;
            joint.with_replacement = views.at(ref).with_replacement ||
                                     views.at(result.protected_group).with_replacement;
            LearningCurve curve = learning_curve(joint, grid, ccfg);
            AeqEstimate joint_est = aeq_from_curve(curve);
            joint_est.group = joint.group;
            result.curves.push_back(std::move(curve));
            result.estimates.push_back(joint_est);

            LabelDiagnosis ld;
            ld.label = label;
            ld.reference = ref;
            ld.diagnosis = classify_bias(ests.at(ref), ests.at(result.protected_group), joint_est,
                                         result.protected_group, cfg.alpha);
            result.diagnoses.push_back(std::move(ld));
        }
    }

    // outcome-level gaps (protected minus reference on the primary label)
    for (const auto& col : cfg.outcome_cols) {
        const std::string& label = result.primary_label.at(col);
        const AeqEstimate* prot = nullptr;
        const AeqEstimate* ref = nullptr;
        for (const auto& e : result.estimates) {
            if (e.label != label) continue;
            if (e.group == result.protected_group) prot = &e;
            if (e.group == result.reference_group) ref = &e;
        }
        if (prot && ref) result.outcome_gaps[col] = aeq_difference(*prot, *ref);
    }
    if (!result.outcome_gaps.empty()) {
        result.selection = select_outcome(result.outcome_gaps, cfg.alpha);
    }

    bool actionable = false;
    for (const auto& ld : result.diagnoses) {
        const BiasType t = ld.diagnosis.bias_type;
        if (t != BiasType::Indeterminate && t != BiasType::None) actionable = true;
    }
    result.exit_code = actionable ? 0 : 2;
    return result;
}

inline MeasureResult run_measure(const RunConfig& cfg, std::size_t threads) {
    return run_measure_on(load_table(cfg), cfg, threads);
}

// ---------------------------------------------------------------------------
// artifact writers

namespace detail {

inline std::string flags_cell(const std::vector<std::string>& flags) {
    if (flags.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i) out += ";";
        out += flags[i];
    }
    return out;
}

inline nlohmann::json diff_to_json(const DiffResult& d) {
    return {{"difference", d.difference},
            {"ci95", {d.ci95.first, d.ci95.second}},
            {"t", std::isfinite(d.t) ? d.t : (d.t > 0 ? 1e308 : -1e308)},
            {"df", d.df},
            {"p", d.p},
            {"degenerate", d.degenerate}};
}

inline nlohmann::json estimate_to_json(const AeqEstimate& e) {
    return {{"group", e.group},
            {"mean", e.mean},
            {"ci95", {e.ci95.first, e.ci95.second}},
            {"bootstraps", e.bootstraps},
            {"flat", e.flat}};
}

}  // namespace detail

inline void write_aeq_table(const std::string& path, const MeasureResult& m) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write aeq table: " + path);
    f << "label\tgroup\taeq_mean\tci_lo\tci_hi\tn_bootstraps\tflags\n";
    for (const auto& e : m.estimates) {
        std::vector<std::string> flags;
        if (e.flat) flags.push_back("flat_curve");
        f << e.label << '\t' << e.group << '\t' << format_double(e.mean) << '\t'
          << format_double(e.ci95.first) << '\t' << format_double(e.ci95.second) << '\t'
          << e.bootstraps << '\t' << detail::flags_cell(flags) << '\n';
    }
}

inline nlohmann::json diagnosis_to_json(const MeasureResult& m) {
    nlohmann::json diagnoses = nlohmann::json::array();
    for (const auto& ld : m.diagnoses) {
        const BiasDiagnosis& d = ld.diagnosis;
        nlohmann::json groups;
        for (const auto& [g, est] : d.group_estimates) groups[g] = detail::estimate_to_json(est);
        nlohmann::json rec = {{"action", to_string(d.recommendation.action)}};
        if (!d.recommendation.group.empty()) rec["group"] = d.recommendation.group;
        diagnoses.push_back({{"label", ld.label},
                             {"reference_group", ld.reference},
                             {"protected_group", m.protected_group},
                             {"bias_type", to_string(d.bias_type)},
                             {"recommendation", rec},
                             {"label_advisory", d.label_advisory},
                             {"groups", groups},
                             {"joint", detail::estimate_to_json(d.joint)},
                             {"evidence",
                              {{"gap", detail::diff_to_json(d.gap)},
                               {"joint_vs_lo", detail::diff_to_json(d.joint_vs_lo)},
                               {"joint_vs_hi", detail::diff_to_json(d.joint_vs_hi)},
                               {"lo_group", d.lo_group},
                               {"hi_group", d.hi_group}}}});
    }

    nlohmann::json out = {{"version", kVersion},
                          {"protected_group", m.protected_group},
                          {"reference_group", m.reference_group},
                          {"groups", m.groups},
                          {"diagnoses", diagnoses},
                          {"exit_code", m.exit_code}};
    if (m.selection) {
        nlohmann::json gaps;
        for (const auto& [name, diff] : m.selection->gaps) gaps[name] = detail::diff_to_json(diff);
        out["outcome_selection"] = {{"selected", m.selection->selected},
                                    {"reason", m.selection->reason},
                                    {"warning", m.selection->warning},
                                    {"gaps", gaps}};
    }
    return out;
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
    auto join = [](const std::vector<std::string>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ",";
            out += v[i];
        }
        return out;
    };
    return {{"data_path", cfg.data_path},
            {"demographics_col", join(cfg.demographics_cols)},
            {"outcome_cols", join(cfg.outcome_cols)},
            {"exclude_cols", join(cfg.exclude_cols)},
            {"patient_id_col", cfg.patient_id_col},
            {"out_data", cfg.out_data},
            {"bootstraps", cfg.bootstraps},
            {"start_seed", cfg.start_seed},
            {"input_dim", cfg.input_dim},
            {"max_sample_size", cfg.max_sample_size},
            {"min_sample_size", cfg.min_sample_size},
            {"root_dir", cfg.root_dir},
            {"protected_group", cfg.protected_group},
            {"alpha", cfg.alpha},
            {"threshold", cfg.threshold},
            {"impute_missing", cfg.impute_missing}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.data_path = j.at("data_path").get<std::string>();
    cfg.demographics_cols = split_list(j.at("demographics_col").get<std::string>());
    cfg.outcome_cols = split_list(j.at("outcome_cols").get<std::string>());
    cfg.exclude_cols = split_list(j.value("exclude_cols", std::string{}));
    cfg.patient_id_col = j.value("patient_id_col", std::string{});
    cfg.out_data = j.value("out_data", std::string{});
    cfg.bootstraps = j.at("bootstraps").get<std::size_t>();
    cfg.start_seed = j.at("start_seed").get<std::int64_t>();
    cfg.input_dim = j.at("input_dim").get<std::size_t>();
    cfg.max_sample_size = j.at("max_sample_size").get<std::size_t>();
    cfg.min_sample_size = j.value("min_sample_size", std::size_t{16});
    cfg.root_dir = j.at("root_dir").get<std::string>();
    cfg.protected_group = j.value("protected_group", std::string{});
    cfg.alpha = j.value("alpha", 0.05);
    cfg.threshold = j.value("threshold", 0.5);
    cfg.impute_missing = j.value("impute_missing", false);
    if (cfg.out_data.empty()) cfg.out_data = cfg.root_dir + "/data.tsv";
    cfg.validate();
    return cfg;
}

inline void write_manifest(const std::string& path, const std::string& command, const RunConfig& cfg,
                           std::size_t budget, double elapsed_seconds,
                           const std::vector<std::string>& artifact_files) {
    nlohmann::json j = {{"version", kVersion},
                        {"command", command},
                        {"config", config_to_json(cfg)},
                        {"budget", budget},
                        {"elapsed_seconds", elapsed_seconds},
                        {"artifacts", artifact_files}};
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write manifest: " + path);
    f << j.dump(2) << '\n';
}

/// measure subcommand: writes aeq_table.tsv, curves.csv, diagnosis.json and
/// manifest.json under root_dir. Exit code 0 on actionable findings, 2 when
/// every diagnosis is indeterminate/none.
inline RunArtifacts cmd_measure(const RunConfig& cfg, std::size_t threads,
                                MeasureResult* out_result = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    MeasureResult m = run_measure(cfg, threads);

    std::filesystem::create_directories(cfg.root_dir);
    RunArtifacts art;
    art.root_dir = cfg.root_dir;
    art.aeq_table_path = cfg.root_dir + "/aeq_table.tsv";
    art.curves_path = cfg.root_dir + "/curves.csv";
    art.diagnosis_path = cfg.root_dir + "/diagnosis.json";
    art.manifest_path = cfg.root_dir + "/manifest.json";
    art.exit_code = m.exit_code;

    write_aeq_table(art.aeq_table_path, m);
    write_curves_csv(art.curves_path, m.curves);
    {
        std::ofstream f(art.diagnosis_path, std::ios::binary);
        f << diagnosis_to_json(m).dump(2) << '\n';
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(art.manifest_path, "measure", cfg, 0, elapsed,
                   {art.aeq_table_path, art.curves_path, art.diagnosis_path});
    if (out_result) *out_result = std::move(m);
    return art;
}

inline void write_fairness_tsv(const std::string& path,
                               const std::map<std::string, MitigationArm>& arms,
                               const std::map<std::string, BiasReduction>& reductions) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write fairness table: " + path);
    f << "arm\tgroup\tmetric\tvalue\n";
    auto row = [&](const std::string& arm, const std::string& group, const std::string& metric,
                   double value) { f << arm << '\t' << group << '\t' << metric << '\t'
                                     << format_double(value) << '\n'; };
    for (const auto& [arm_name, arm] : arms) {
        for (const auto& [group, gm] : arm.report.per_group) {
            row(arm_name, group, "n", static_cast<double>(gm.n_rows));
            if (gm.auroc) {
                row(arm_name, group, "auroc", *gm.auroc);
                row(arm_name, group, "auroc_ci_lo", gm.auroc_ci.first);
                row(arm_name, group, "auroc_ci_hi", gm.auroc_ci.second);
            } else {
                f << arm_name << '\t' << group << "\tauroc\tnull\n";
            }
            const ConfusionMetrics& c = gm.confusion;
            row(arm_name, group, "tpr", c.tpr);
            row(arm_name, group, "tnr", c.tnr);
            row(arm_name, group, "fpr", c.fpr);
            row(arm_name, group, "fnr", c.fnr);
            if (c.precision) {
                row(arm_name, group, "precision", *c.precision);
                row(arm_name, group, "fdr", *c.fdr);
            } else {
                f << arm_name << '\t' << group << "\tprecision\tnull\n";
                f << arm_name << '\t' << group << "\tfdr\tnull\n";
            }
            row(arm_name, group, "predicted_prevalence", c.predicted_prevalence);
        }
        for (const auto& [metric, value] : arm.report.gaps) row(arm_name, "gap", metric, value);
        for (const auto& [group, count] : arm.plan.realized_counts) {
            row(arm_name, group, "train_rows", static_cast<double>(count));
        }
    }
    for (const auto& [arm_name, red] : reductions) {
        row(arm_name, "-", "bias_pre", red.bias_pre);
        row(arm_name, "-", "bias_post", red.bias_post);
        row(arm_name, "-", "bias_reduction_abs", red.absolute);
        if (red.percent) {
            row(arm_name, "-", "bias_reduction_pct", *red.percent);
        } else {
            f << arm_name << "\t-\tbias_reduction_pct\tnull\n";
        }
    }
}

inline nlohmann::json fairness_to_json(const MitigationResult& mit) {
    nlohmann::json arms;
    for (const auto& [arm_name, arm] : mit.arms) {
        nlohmann::json groups;
        for (const auto& [group, gm] : arm.report.per_group) {
            nlohmann::json g = {{"n", gm.n_rows},
                                {"tpr", gm.confusion.tpr},
                                {"tnr", gm.confusion.tnr},
                                {"fpr", gm.confusion.fpr},
                                {"fnr", gm.confusion.fnr},
                                {"predicted_prevalence", gm.confusion.predicted_prevalence}};
            if (gm.auroc) {
                g["auroc"] = *gm.auroc;
                g["auroc_ci"] = {gm.auroc_ci.first, gm.auroc_ci.second};
            } else {
                g["auroc"] = nullptr;
            }
            if (gm.confusion.precision) {
                g["precision"] = *gm.confusion.precision;
                g["fdr"] = *gm.confusion.fdr;
            } else {
                g["precision"] = nullptr;
                g["fdr"] = nullptr;
            }
            groups[group] = g;
        }
        nlohmann::json counts;
        for (const auto& [group, count] : arm.plan.realized_counts) counts[group] = count;
        arms[arm_name] = {{"strategy", to_string(arm.plan.strategy)},
                          {"budget", arm.plan.budget},
                          {"realized_counts", counts},
                          {"with_replacement", arm.plan.with_replacement},
                          {"groups", groups},
                          {"gaps", arm.report.gaps}};
    }
    nlohmann::json reds;
    for (const auto& [arm_name, red] : mit.reductions) {
        nlohmann::json r = {{"bias_pre", red.bias_pre},
                            {"bias_post", red.bias_post},
                            {"absolute", red.absolute}};
        if (red.percent) r["percent"] = *red.percent;
        else r["percent"] = nullptr;
        reds[arm_name] = r;
    }
    return {{"arms", arms},
            {"reductions_vs_naive", reds},
            {"recommended_arm", mit.recommended_arm},
            {"note", mit.note}};
}

struct MitigateResult {
    MeasureResult measure;
    MitigationResult mitigation;
};

/// mitigate subcommand: an inline measure pass, then naive/balanced-ERM/
/// recommended curation arms on the first outcome's primary label.
inline RunArtifacts cmd_mitigate(const RunConfig& cfg, std::size_t budget, std::size_t threads,
                                 MitigateResult* out_result = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    FeatureDataset ds = standardize(load_table(cfg));
    MeasureResult m = run_measure_on(ds, cfg, threads);

    const std::string& outcome = cfg.outcome_cols.front();
    const std::string& label = m.primary_label.at(outcome);
    // the label columns produced by risk stratification live in the measured
    // copy; recreate them here so the classifier can train on them
    FeatureDataset work = std::move(ds);
    prepare_labels(work, cfg.outcome_cols);

    const LabelDiagnosis* chosen = nullptr;
    for (const auto& ld : m.diagnoses) {
        if (ld.label == label && ld.reference == m.reference_group) chosen = &ld;
    }
    if (!chosen) throw DataError("mitigate: no diagnosis for label '" + label + "'");

    const MitigationResult mit = run_mitigation(
        work, chosen->diagnosis, label, m.reference_group, m.protected_group, budget,
        classifier_train_config(), cfg.threshold, mix_seed(cfg.seed_u64(), fnv1a64("mitigate")));

    std::filesystem::create_directories(cfg.root_dir);
    RunArtifacts art = cmd_measure(cfg, threads);  // measure artifacts + its manifest
    art.fairness_path = cfg.root_dir + "/fairness.tsv";
    art.fairness_json_path = cfg.root_dir + "/fairness.json";
    write_fairness_tsv(art.fairness_path, mit.arms, mit.reductions);
    {
        std::ofstream f(art.fairness_json_path, std::ios::binary);
        f << fairness_to_json(mit).dump(2) << '\n';
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(art.manifest_path, "mitigate", cfg, budget, elapsed,
                   {art.aeq_table_path, art.curves_path, art.diagnosis_path, art.fairness_path,
                    art.fairness_json_path});
    art.exit_code = m.exit_code;
    if (out_result) *out_result = {std::move(m), mit};
    return art;
}

struct SynthArtifacts {
    std::string data_path;
    std::string config_path;
    nlohmann::json ground_truth;
};

/// synth subcommand: generate a planted-bias dataset plus a ready-to-run
/// config so the scenario flows through measure/mitigate unmodified.
inline SynthArtifacts cmd_synth(const SynthSpec& spec, const std::string& out_dir) {
    spec.validate();
    const FeatureDataset ds = generate(spec);

    std::filesystem::create_directories(out_dir);
    SynthArtifacts art;
    art.data_path = out_dir + "/data.tsv";
    art.config_path = out_dir + "/config.yaml";
    write_dataset_tsv(ds, art.data_path, "group", "patient_id");

    std::string outcome_cols;
    for (const auto& [name, _] : ds.outcomes) {
        if (!outcome_cols.empty()) outcome_cols += ",";
        outcome_cols += name;
    }
    {
        std::ofstream f(art.config_path, std::ios::binary);
        f << "data_path: " << art.data_path << "\n"
          << "demographics_col: group\n"
          << "outcome_cols: " << outcome_cols << "\n"
          << "exclude_cols: None\n"
          << "patient_id_col: patient_id\n"
          << "out_data: " << out_dir << "/run/data.tsv\n"
          << "bootstraps: 10\n"
          << "start_seed: " << spec.seed << "\n"
          << "input_dim: " << spec.n_features << "\n"
          << "max_sample_size: 1024\n"
          << "min_sample_size: 16\n"
          << "root_dir: " << out_dir << "/run\n"
          << "protected_group: " << spec.minority_group << "\n"
          << "alpha: 0.05\n"
          << "threshold: 0.5\n";
    }

    nlohmann::json counts;
    for (const auto& g : ds.distinct_groups()) counts[g] = ds.group_count(g);
    art.ground_truth = {{"kind", to_string(spec.kind)},
                        {"seed", spec.seed},
                        {"n_rows", ds.n_rows()},
                        {"n_features", spec.n_features},
                        {"group_counts", counts},
                        {"protected_group", spec.minority_group}};
    if (spec.kind == BiasKind::Sampling) art.ground_truth["skew_ratio"] = spec.skew_ratio;
    if (spec.kind == BiasKind::Complexity) art.ground_truth["extra_components"] = spec.extra_components;
    if (spec.kind == BiasKind::Label) {
        art.ground_truth["flip_rate"] = spec.flip_rate;
        const auto clean = ds.outcomes.find("outcome_clean");
        const auto noisy = ds.outcomes.find("outcome");
        if (clean != ds.outcomes.end() && noisy != ds.outcomes.end()) {
            std::size_t flips = 0;
            for (std::size_t r = 0; r < ds.n_rows(); ++r) {
                if (clean->second[r] != noisy->second[r]) ++flips;
            }
            art.ground_truth["realized_flips"] = flips;
        }
        const bool neutral = spec.flip_rate == 0.0 && spec.outcome_columns.empty();
        art.ground_truth["neutral"] = neutral;
    }
    return art;
}

}  // namespace aequity
