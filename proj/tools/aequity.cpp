// aequity command-line tool: measure / mitigate / synth.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aequity/aequity.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string replay_path;
    std::size_t threads = 1;
    std::optional<std::int64_t> seed;
    std::optional<std::size_t> bootstraps;
    // overrides mirroring config keys (kebab-case flags)
    std::optional<std::string> data_path, demographics_col, outcome_cols, exclude_cols,
        patient_id_col, out_data, root_dir, protected_group;
    std::optional<std::size_t> input_dim, max_sample_size, min_sample_size;
    std::optional<double> alpha, threshold;
    bool impute_missing = false;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Path to the run config file");
    cmd->add_option("--replay", args.replay_path, "Re-run from a manifest.json snapshot");
    cmd->add_option("--threads", args.threads, "Worker threads for bootstrap cells")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed,--start-seed", args.seed, "Override start_seed");
    cmd->add_option("--bootstraps", args.bootstraps, "Override bootstraps");
    cmd->add_option("--data-path", args.data_path, "Override data_path");
    cmd->add_option("--demographics-col", args.demographics_col, "Override demographics_col");
    cmd->add_option("--outcome-cols", args.outcome_cols, "Override outcome_cols");
    cmd->add_option("--exclude-cols", args.exclude_cols, "Override exclude_cols");
    cmd->add_option("--patient-id-col", args.patient_id_col, "Override patient_id_col");
    cmd->add_option("--out-data", args.out_data, "Override out_data");
    cmd->add_option("--root-dir", args.root_dir, "Override root_dir");
    cmd->add_option("--protected-group", args.protected_group, "Override protected_group");
    cmd->add_option("--input-dim", args.input_dim, "Override input_dim");
    cmd->add_option("--max-sample-size", args.max_sample_size, "Override max_sample_size");
    cmd->add_option("--min-sample-size", args.min_sample_size, "Override min_sample_size");
    cmd->add_option("--alpha", args.alpha, "Override alpha");
    cmd->add_option("--threshold", args.threshold, "Override threshold");
    cmd->add_flag("--impute-missing", args.impute_missing, "Mean-impute missing feature cells");
}

aequity::RunConfig resolve_config(const CommonArgs& args) {
    aequity::RunConfig cfg;
    if (!args.replay_path.empty()) {
        std::ifstream f(args.replay_path);
        if (!f) throw aequity::ConfigError("manifest not found: " + args.replay_path);
        nlohmann::json manifest;
        f >> manifest;
        cfg = aequity::config_from_json(manifest.at("config"));
    } else if (!args.config_path.empty()) {
        cfg = aequity::parse_config(args.config_path);
    } else {
        throw aequity::ConfigError("either --config or --replay is required");
    }

    if (args.seed) cfg.start_seed = *args.seed;
    if (args.bootstraps) cfg.bootstraps = *args.bootstraps;
    if (args.data_path) cfg.data_path = *args.data_path;
    if (args.demographics_col) cfg.demographics_cols = aequity::split_list(*args.demographics_col);
    if (args.outcome_cols) cfg.outcome_cols = aequity::split_list(*args.outcome_cols);
    if (args.exclude_cols) cfg.exclude_cols = aequity::split_list(*args.exclude_cols);
    if (args.patient_id_col) cfg.patient_id_col = *args.patient_id_col;
    if (args.out_data) cfg.out_data = *args.out_data;
    if (args.root_dir) cfg.root_dir = *args.root_dir;
    if (args.protected_group) cfg.protected_group = *args.protected_group;
    if (args.input_dim) cfg.input_dim = *args.input_dim;
    if (args.max_sample_size) cfg.max_sample_size = *args.max_sample_size;
    if (args.min_sample_size) cfg.min_sample_size = *args.min_sample_size;
    if (args.alpha) cfg.alpha = *args.alpha;
    if (args.threshold) cfg.threshold = *args.threshold;
    if (args.impute_missing) cfg.impute_missing = true;

    if (const char* env_root = std::getenv("AEQUITY_ROOT_DIR")) {
        if (*env_root) cfg.root_dir = env_root;
    }
    cfg.validate();
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    return cfg;
}

void print_measure_summary(const aequity::MeasureResult& m, const aequity::RunArtifacts& art) {
    std::cout << "groups:";
    for (const auto& g : m.groups) std::cout << ' ' << g;
    std::cout << "  protected: " << m.protected_group << "\n";
    for (const auto& ld : m.diagnoses) {
        const auto& d = ld.diagnosis;
        std::cout << "label " << ld.label << " (vs " << ld.reference
                  << "): " << aequity::to_string(d.bias_type) << " -> "
                  << aequity::to_string(d.recommendation.action);
        if (!d.recommendation.group.empty()) std::cout << '(' << d.recommendation.group << ')';
        std::cout << "  gap p=" << aequity::format_double(d.gap.p) << "\n";
    }
    if (m.selection) {
        std::cout << "outcome selection: " << m.selection->selected << " (" << m.selection->reason
                  << ")\n";
    }
    std::cout << "artifacts: " << art.aeq_table_path << ", " << art.curves_path << ", "
              << art.diagnosis_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dataset bias auditing via bootstrapped learning-curve estimates"};
    app.require_subcommand(1);

    CommonArgs measure_args, mitigate_args;
    std::size_t budget = 0;

    CLI::App* measure = app.add_subcommand("measure", "Compute AEq tables and a bias diagnosis");
    add_common_flags(measure, measure_args);

    CLI::App* mitigate =
        app.add_subcommand("mitigate", "Run curation arms and report fairness deltas");
    add_common_flags(mitigate, mitigate_args);
    mitigate->add_option("--budget", budget, "Training-row budget per arm (0 = full train pool)");

    std::string synth_kind = "sampling";
    std::string synth_out = "synth_out";
    aequity::SynthSpec spec;
    std::string flip_rates_csv;
    CLI::App* synth = app.add_subcommand("synth", "Generate a planted-bias dataset + config");
    synth->add_option("--kind", synth_kind, "sampling | complexity | label")
        ->check(CLI::IsMember({"sampling", "complexity", "label"}));
    synth->add_option("--seed", spec.seed, "Generator seed");
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--n-per-group", spec.n_per_group, "Per-group size before skew");
    synth->add_option("--features", spec.n_features, "Feature count");
    synth->add_option("--skew", spec.skew_ratio, "Sampling skew ratio (majority:minority)");
    synth->add_option("--components", spec.extra_components, "Minority components per label");
    synth->add_option("--flip-rate", spec.flip_rate, "Minority label flip rate");
    synth->add_option("--flip-rates", flip_rates_csv,
                      "Comma list of flip rates; emits one outcome column per rate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (measure->parsed()) {
            const aequity::RunConfig cfg = resolve_config(measure_args);
            aequity::MeasureResult result;
            const aequity::RunArtifacts art =
                aequity::cmd_measure(cfg, measure_args.threads, &result);
            print_measure_summary(result, art);
            return art.exit_code;
        }
        if (mitigate->parsed()) {
            const aequity::RunConfig cfg = resolve_config(mitigate_args);
            std::size_t run_budget = budget;
            if (!mitigate_args.replay_path.empty() && budget == 0) {
                std::ifstream f(mitigate_args.replay_path);
                nlohmann::json manifest;
                f >> manifest;
                run_budget = manifest.value("budget", std::size_t{0});
            }
            aequity::MitigateResult result;
            const aequity::RunArtifacts art =
                aequity::cmd_mitigate(cfg, run_budget, mitigate_args.threads, &result);
            print_measure_summary(result.measure, art);
            for (const auto& [arm, red] : result.mitigation.reductions) {
                std::cout << "arm " << arm << ": bias " << aequity::format_double(red.bias_pre)
                          << " -> " << aequity::format_double(red.bias_post);
                if (red.percent) {
                    std::cout << "  (reduction " << aequity::format_double(*red.percent) << "%)";
                }
                std::cout << "\n";
            }
            std::cout << "fairness: " << art.fairness_path << "\n";
            return art.exit_code;
        }
        if (synth->parsed()) {
            spec.kind = synth_kind == "sampling"  ? aequity::BiasKind::Sampling
                        : synth_kind == "complexity" ? aequity::BiasKind::Complexity
                                                     : aequity::BiasKind::Label;
            if (!flip_rates_csv.empty()) {
                if (spec.kind != aequity::BiasKind::Label) {
                    throw aequity::ConfigError("--flip-rates applies to --kind label only");
                }
                spec.outcome_columns.clear();
                std::size_t idx = 1;
                for (const auto& tok : aequity::split_list(flip_rates_csv)) {
                    spec.outcome_columns.emplace_back("outcome_" + std::to_string(idx++),
                                                      std::stod(tok));
                }
            }
            const aequity::SynthArtifacts art = aequity::cmd_synth(spec, synth_out);
            std::cout << art.ground_truth.dump(2) << "\n";
            std::cout << "wrote " << art.data_path << " and " << art.config_path << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
