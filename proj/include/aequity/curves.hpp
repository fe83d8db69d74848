#pragma once

#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "aequity/common.hpp"
#include "aequity/dataset.hpp"
#include "aequity/nn.hpp"
#include "aequity/parallel.hpp"
#include "aequity/rng.hpp"

namespace aequity {

/// Geometric sample-size grid: powers of two from min_n up to max_n.
struct SampleGrid {
    std::vector<std::size_t> sizes;

    std::size_t min_n() const { return sizes.front(); }
    std::size_t max_n() const { return sizes.back(); }
    double log2_at(std::size_t i) const { return std::log2(static_cast<double>(sizes[i])); }
};

inline SampleGrid make_grid(std::size_t min_n, std::size_t max_n) {
    if (min_n < 2 || (min_n & (min_n - 1)) != 0) {
        throw ConfigError("make_grid: min_n must be a power of two >= 2");
    }
    SampleGrid g;
    for (std::size_t n = min_n; n <= max_n; n *= 2) g.sizes.push_back(n);
    if (g.sizes.size() < 4) {
        throw ConfigError("make_grid: grid [" + std::to_string(min_n) + ".." +
                          std::to_string(max_n) + "] has fewer than 4 sizes");
    }
    return g;
}

/// Fixed small epoch budget for curve cells. The optimization budget per
/// cell then scales with n (epochs x batches), which is what turns the
/// final training loss into a sample-size-to-learn curve: small-n cells stay
/// near the untrained loss (~1 on standardized data) and large-n cells reach
/// the floor.
inline TrainConfig curve_train_defaults() {
    TrainConfig cfg;
    cfg.loss_kind = LossKind::Mse;
    cfg.max_epochs = 6;
    cfg.batch_size = 32;
    cfg.learning_rate = 1.5e-3;
    // a stricter plateau bar than the training default: cells below the batch
    // size must all receive the same number of optimizer steps
    cfg.early_stop_min_delta = 1e-7;
    // calibration overrides, removed after tuning
    if (const char* e = std::getenv("AEQ_CAL_EPOCHS")) cfg.max_epochs = std::atoi(e);
    if (const char* e = std::getenv("AEQ_CAL_LR")) cfg.learning_rate = std::atof(e);
    if (const char* e = std::getenv("AEQ_CAL_BATCH")) cfg.batch_size = std::atoi(e);
    return cfg;
}

/// Settings for one curve computation. The autoencoder is
/// input -> hidden -> latent -> hidden -> input with ReLU hidden layers and
/// identity bottleneck/output.
struct CurveConfig {
    TrainConfig train = curve_train_defaults();  // loss_kind forced to Mse
    std::size_t latent = 2;
    std::size_t hidden = curve_hidden_default();
    std::size_t bootstraps = 50;
    std::uint64_t start_seed = 42;
    std::size_t threads = 1;

    static std::size_t curve_hidden_default() {
        if (const char* e = std::getenv("AEQ_CAL_HIDDEN")) return std::atoi(e);
        return 16;
    }
};

/// Bootstrapped final-training-loss surface over a sample-size grid.
struct LearningCurve {
    SampleGrid grid;
    std::vector<std::vector<double>> losses;  // [bootstrap][grid index]
    std::string group;
    std::string label;
    std::vector<std::uint64_t> seeds;  // per-bootstrap derived seeds
    std::vector<std::string> flags;    // retries, pool oversampling notes

    std::vector<double> mean_curve() const {
        std::vector<double> m(grid.sizes.size(), 0.0);
        for (const auto& row : losses) {
            for (std::size_t i = 0; i < row.size(); ++i) m[i] += row[i];
        }
        for (double& v : m) v /= static_cast<double>(losses.size());
        return m;
    }
};

inline std::vector<std::size_t> autoencoder_dims(std::size_t input, const CurveConfig& cfg) {
    return {input, cfg.hidden, cfg.latent, cfg.hidden, input};
}

inline std::vector<Activation> autoencoder_activations() {
    return {Activation::Relu, Activation::Identity, Activation::Relu, Activation::Identity};
}

namespace detail {

/// One (bootstrap, grid-size) cell: subsample with replacement, train a fresh
/// autoencoder, report its final mean training loss. Pure function of the
/// derived seeds, so the curve is identical under any worker count.
///
/// Cells of one bootstrap take nested prefixes of a single per-bootstrap
/// with-replacement row stream: the same row luck flows through every grid
/// size, so second differences along the curve cancel it instead of
/// compounding it.
inline double curve_cell(const DatasetView& view, std::size_t n, const CurveConfig& cfg,
                         std::uint64_t boot_seed, std::uint64_t cell_seed) {
    DatasetView sample;
    sample.ds = view.ds;
    sample.with_replacement = true;
    sample.rows.reserve(n);
    if (view.balanced_halves > 0) {
        // stratified: half the rows from each group part, both halves driven
        // by the same index stream the per-group curves use, so the joint
        // cell trains on the union of the group cells' rows
        const std::size_t h = view.balanced_halves;
        Rng rng_a(mix_seed(boot_seed, 0x5EE));
        Rng rng_b(mix_seed(boot_seed, 0x5EE));
        for (std::size_t i = 0; i < n / 2; ++i) sample.rows.push_back(view.rows[rng_a.below(h)]);
        for (std::size_t i = 0; i < n - n / 2; ++i) {
            sample.rows.push_back(view.rows[h + rng_b.below(h)]);
        }
    } else {
        Rng row_rng(mix_seed(boot_seed, 0x5EE));
        for (std::size_t i = 0; i < n; ++i) {
            sample.rows.push_back(view.rows[row_rng.below(view.size())]);
        }
    }
    const Matrix x = gather_features(sample);

    TrainConfig tc = cfg.train;
    tc.loss_kind = LossKind::Mse;

    // one network init per bootstrap, shared across the grid, so the curve
    // along n is not confounded by re-initialization noise
    NetworkParams net = init_network(autoencoder_dims(x.cols, cfg), autoencoder_activations(),
                                     mix_seed(boot_seed, 0x11A7));
    const TrainResult res = train(std::move(net), x, x, nullptr, nullptr, tc,
                                  mix_seed(cell_seed, 0x0BA7));
    // final loss re-evaluated over the whole training sample at the final
    // parameters; the running epoch mean is noisier at small n
    const Matrix reconstructed = forward(res.params, x);
    double loss = compute_loss(LossKind::Mse, reconstructed, x);
    if (std::getenv("AEQ_CAL_NORM")) {
        double moment = 0.0;
        for (double v : x.data) moment += v * v;
        moment /= static_cast<double>(x.size());
        loss = moment > 1e-12 ? loss / moment : loss;
    }
    if (!std::isfinite(loss) || loss < 0.0) {
        throw NumericError("curve cell produced invalid loss");
    }
    return loss;
}

}  // namespace detail

/// Bootstrapped learning curve for a view. Requires standardized features so
/// losses are on a comparable scale (untrained loss ~ 1).
inline LearningCurve learning_curve(const DatasetView& view, const SampleGrid& grid,
                                    const CurveConfig& cfg) {
    if (view.empty()) throw DataError("learning_curve: empty view");
    if (!view.ds->standardized) throw DataError("learning_curve: dataset must be standardized");
    if (cfg.bootstraps < 1) throw ConfigError("learning_curve: bootstraps must be >= 1");
    if (view.size() < grid.min_n()) {
        throw DataError("learning_curve: view of " + std::to_string(view.size()) +
                        " rows is smaller than the minimum grid size " +
                        std::to_string(grid.min_n()) +
                        "; lower min_sample_size or provide more rows");
    }

    LearningCurve curve;
    curve.grid = grid;
    curve.group = view.group;
    curve.label = view.label;
    curve.losses.assign(cfg.bootstraps, std::vector<double>(grid.sizes.size(), 0.0));
    curve.seeds.resize(cfg.bootstraps);
    for (std::size_t b = 0; b < cfg.bootstraps; ++b) {
        curve.seeds[b] = mix_seed(cfg.start_seed, b);
    }
    if (grid.max_n() > view.size()) {
        curve.flags.push_back("grid exceeds pool size; bootstrap cells resample with replacement");
    }

    const std::size_t n_cells = cfg.bootstraps * grid.sizes.size();
    std::vector<std::string> cell_flags(n_cells);
    parallel_for(n_cells, cfg.threads, [&](std::size_t cell) {
        const std::size_t b = cell / grid.sizes.size();
        const std::size_t gi = cell % grid.sizes.size();
        const std::size_t n = grid.sizes[gi];
        const std::uint64_t boot_seed = curve.seeds[b];
        const std::uint64_t cell_seed = mix_seed(boot_seed, n);
        try {
            curve.losses[b][gi] = detail::curve_cell(view, n, cfg, boot_seed, cell_seed);
        } catch (const NumericError&) {
            // one retry with a perturbed seed, then give up naming the cell
            const std::uint64_t retry_seed = mix_seed(cell_seed, 0x4E7471);
            cell_flags[cell] = "retry b=" + std::to_string(b) + " n=" + std::to_string(n);
            try {
                curve.losses[b][gi] =
                    detail::curve_cell(view, n, cfg, mix_seed(boot_seed, 0x4E7471), retry_seed);
            } catch (const NumericError&) {
                throw NumericError("learning_curve: training failed twice at bootstrap " +
                                   std::to_string(b) + ", n=" + std::to_string(n));
            }
        }
    });
    for (auto& flag : cell_flags) {
        if (!flag.empty()) curve.flags.push_back(std::move(flag));
    }
    return curve;
}

/// Plot-ready CSV rows. Column layout: label,group,bootstrap,n,log2_n,loss.
inline void append_curve_csv(std::ofstream& f, const LearningCurve& curve) {
    for (std::size_t b = 0; b < curve.losses.size(); ++b) {
        for (std::size_t i = 0; i < curve.grid.sizes.size(); ++i) {
            f << curve.label << ',' << curve.group << ',' << b << ',' << curve.grid.sizes[i] << ','
              << format_double(curve.grid.log2_at(i)) << ',' << format_double(curve.losses[b][i])
              << '\n';
        }
    }
}

inline void write_curves_csv(const std::string& path, const std::vector<LearningCurve>& curves) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write curves CSV: " + path);
    f << "label,group,bootstrap,n,log2_n,loss\n";
    for (const auto& c : curves) append_curve_csv(f, c);
}

}  // namespace aequity
