#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "aequity/common.hpp"
#include "aequity/metrics_basic.hpp"
#include "aequity/rng.hpp"

namespace aequity {

enum class Activation { Relu, Sigmoid, Identity };

enum class LossKind { Mse, BinaryCrossEntropy };

/// Dense feed-forward network. Weight matrix l has shape
/// (layer_dims[l] x layer_dims[l+1]); batches are row-major (rows x features).
struct NetworkParams {
    std::vector<std::size_t> layer_dims;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    std::vector<Activation> activations;  // one per weight layer

    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t output_dim() const { return layer_dims.back(); }
    std::size_t n_layers() const { return weights.size(); }
};

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 200;  // classifier runs use 30
    std::size_t early_stop_patience = 5;
    double early_stop_min_delta = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    LossKind loss_kind = LossKind::Mse;

    void validate() const {
        if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
        if (batch_size == 0) throw ConfigError("batch_size must be positive");
        if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
        if (early_stop_patience == 0) throw ConfigError("early_stop_patience must be positive");
        if (!(early_stop_min_delta > 0)) throw ConfigError("early_stop_min_delta must be positive");
        if (!(adam_beta1 > 0 && adam_beta1 < 1)) throw ConfigError("adam_beta1 must be in (0,1)");
        if (!(adam_beta2 > 0 && adam_beta2 < 1)) throw ConfigError("adam_beta2 must be in (0,1)");
        if (!(adam_eps > 0)) throw ConfigError("adam_eps must be positive");
    }
};

/// First/second moment estimates, one slot per parameter tensor.
struct AdamState {
    std::vector<Matrix> weight_m, weight_v;
    std::vector<std::vector<double>> bias_m, bias_v;
    std::size_t step_count = 0;

    static AdamState zeros_like(const NetworkParams& p) {
        AdamState s;
        for (const auto& w : p.weights) {
            s.weight_m.emplace_back(w.rows, w.cols);
            s.weight_v.emplace_back(w.rows, w.cols);
        }
        for (const auto& b : p.biases) {
            s.bias_m.emplace_back(b.size(), 0.0);
            s.bias_v.emplace_back(b.size(), 0.0);
        }
        return s;
    }
};

/// Xavier/Glorot-uniform initialization: weights uniform in
/// [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))], biases zero.
/// Deterministic for a given seed.
inline NetworkParams init_network(const std::vector<std::size_t>& layer_dims,
                                  const std::vector<Activation>& activations,
                                  std::uint64_t seed) {
    if (layer_dims.size() < 2) throw ConfigError("init_network: need at least 2 layer dims");
    for (std::size_t d : layer_dims) {
        if (d < 1) throw ConfigError("init_network: all layer dims must be >= 1");
    }
    if (activations.size() != layer_dims.size() - 1) {
        throw ConfigError("init_network: need one activation per weight layer");
    }

    NetworkParams p;
    p.layer_dims = layer_dims;
    p.activations = activations;
    Rng rng(mix_seed(seed, 0x1717));
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const std::size_t fan_in = layer_dims[l];
        const std::size_t fan_out = layer_dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_in, fan_out);
        for (double& v : w.data) v = rng.uniform(-bound, bound);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(fan_out, 0.0);
    }
    return p;
}

inline double apply_activation(Activation a, double z) {
    switch (a) {
        case Activation::Relu: return z > 0 ? z : 0.0;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::Identity: return z;
    }
    return z;
}

/// Derivative expressed through the activation value itself (valid for all
/// three supported activations).
inline double activation_grad_from_value(Activation a, double value) {
    switch (a) {
        case Activation::Relu: return value > 0 ? 1.0 : 0.0;
        case Activation::Sigmoid: return value * (1.0 - value);
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

/// Layer activations for a forward pass; acts[0] is the input batch.
struct ForwardCache {
    std::vector<Matrix> acts;
};

inline Matrix forward(const NetworkParams& p, const Matrix& batch, ForwardCache* cache = nullptr) {
    if (batch.cols != p.input_dim()) {
        throw DataError("forward: batch has " + std::to_string(batch.cols) +
                        " columns, network expects " + std::to_string(p.input_dim()));
    }
    if (!batch.all_finite()) throw NumericError("forward: non-finite input batch");

    Matrix cur = batch;
    if (cache) {
        cache->acts.clear();
        cache->acts.push_back(cur);
    }
    for (std::size_t l = 0; l < p.n_layers(); ++l) {
        const Matrix& w = p.weights[l];
        const auto& b = p.biases[l];
        Matrix next(cur.rows, w.cols);
        for (std::size_t r = 0; r < cur.rows; ++r) {
            double* out = next.row(r);
            for (std::size_t j = 0; j < w.cols; ++j) out[j] = b[j];
            const double* in = cur.row(r);
            for (std::size_t k = 0; k < w.rows; ++k) {
                const double a = in[k];
                if (a == 0.0) continue;
                const double* wrow = w.row(k);
                for (std::size_t j = 0; j < w.cols; ++j) out[j] += a * wrow[j];
            }
            for (std::size_t j = 0; j < w.cols; ++j) {
                out[j] = apply_activation(p.activations[l], out[j]);
                if (!std::isfinite(out[j])) {
                    throw NumericError("forward: non-finite output at layer " + std::to_string(l));
                }
            }
        }
        cur = std::move(next);
        if (cache) cache->acts.push_back(cur);
    }
    return cur;
}

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    double loss = 0.0;
};

/// Mean loss over all rows and output columns.
inline double compute_loss(LossKind kind, const Matrix& outputs, const Matrix& targets) {
    const double n = static_cast<double>(outputs.rows * outputs.cols);
    double total = 0.0;
    if (kind == LossKind::Mse) {
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            const double d = outputs.data[i] - targets.data[i];
            total += d * d;
        }
    } else {
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            const double y = targets.data[i];
            const double eps = 1e-12;
            const double pc = std::min(1.0 - eps, std::max(eps, outputs.data[i]));
            total += -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
        }
    }
    return total / n;
}

/// Exact gradients of the batch loss w.r.t. every weight and bias.
/// For BinaryCrossEntropy the output layer must be sigmoid (the fused
/// output-delta (p - y)/n is used for stability).
inline Gradients backprop_grads(const NetworkParams& p, const Matrix& batch_in,
                                const Matrix& batch_target, LossKind loss_kind) {
    if (batch_target.rows != batch_in.rows || batch_target.cols != p.output_dim()) {
        throw DataError("backprop_grads: target shape mismatch");
    }
    if (loss_kind == LossKind::BinaryCrossEntropy) {
        if (p.activations.back() != Activation::Sigmoid) {
            throw ConfigError("backprop_grads: binary_cross_entropy requires a sigmoid output layer");
        }
        for (double y : batch_target.data) {
            if (y != 0.0 && y != 1.0) throw DataError("backprop_grads: bce targets must be 0/1");
        }
    }

    ForwardCache cache;
    const Matrix outputs = forward(p, batch_in, &cache);

    Gradients g;
    g.loss = compute_loss(loss_kind, outputs, batch_target);
    g.weights.reserve(p.n_layers());
    g.biases.reserve(p.n_layers());
    for (std::size_t l = 0; l < p.n_layers(); ++l) {
        g.weights.emplace_back(p.weights[l].rows, p.weights[l].cols);
        g.biases.emplace_back(p.biases[l].size(), 0.0);
    }

    const double inv_n = 1.0 / static_cast<double>(outputs.rows * outputs.cols);

    // delta at the output layer
    Matrix delta(outputs.rows, outputs.cols);
    if (loss_kind == LossKind::Mse) {
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            const double base = 2.0 * (outputs.data[i] - batch_target.data[i]) * inv_n;
            delta.data[i] = base * activation_grad_from_value(p.activations.back(), outputs.data[i]);
        }
    } else {
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            delta.data[i] = (outputs.data[i] - batch_target.data[i]) * inv_n;
        }
    }

    for (std::size_t l = p.n_layers(); l-- > 0;) {
        const Matrix& a_prev = cache.acts[l];
        Matrix& dw = g.weights[l];
        auto& db = g.biases[l];
        for (std::size_t r = 0; r < delta.rows; ++r) {
            const double* drow = delta.row(r);
            const double* arow = a_prev.row(r);
            for (std::size_t j = 0; j < delta.cols; ++j) db[j] += drow[j];
            for (std::size_t i = 0; i < a_prev.cols; ++i) {
                const double a = arow[i];
                if (a == 0.0) continue;
                double* dwrow = dw.row(i);
                for (std::size_t j = 0; j < delta.cols; ++j) dwrow[j] += a * drow[j];
            }
        }
        if (!dw.all_finite()) throw NumericError("backprop_grads: non-finite gradient at layer " + std::to_string(l));

        if (l > 0) {
            const Matrix& w = p.weights[l];
            Matrix prev_delta(delta.rows, w.rows);
            for (std::size_t r = 0; r < delta.rows; ++r) {
                const double* drow = delta.row(r);
                double* prow = prev_delta.row(r);
                for (std::size_t i = 0; i < w.rows; ++i) {
                    const double* wrow = w.row(i);
                    double acc = 0.0;
                    for (std::size_t j = 0; j < w.cols; ++j) acc += drow[j] * wrow[j];
                    prow[i] = acc * activation_grad_from_value(p.activations[l - 1], cache.acts[l](r, i));
                }
            }
            delta = std::move(prev_delta);
        }
    }
    return g;
}

/// One Adam step with bias correction; increments state.step_count.
inline void adam_update(NetworkParams& p, const Gradients& g, AdamState& state,
                        const TrainConfig& cfg) {
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, t);

    auto step = [&](double& param, double grad, double& m, double& v) {
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad * grad;
        const double mhat = m / bc1;
        const double vhat = v / bc2;
        param -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    };

    for (std::size_t l = 0; l < p.n_layers(); ++l) {
        if (g.weights[l].rows != p.weights[l].rows || g.weights[l].cols != p.weights[l].cols) {
            throw DataError("adam_update: gradient shape mismatch");
        }
        for (std::size_t i = 0; i < p.weights[l].size(); ++i) {
            step(p.weights[l].data[i], g.weights[l].data[i], state.weight_m[l].data[i],
                 state.weight_v[l].data[i]);
        }
        for (std::size_t i = 0; i < p.biases[l].size(); ++i) {
            step(p.biases[l][i], g.biases[l][i], state.bias_m[l][i], state.bias_v[l][i]);
        }
    }
}

/// Mini-batch visit order for one epoch: a pure function of (seed, epoch).
inline std::vector<std::size_t> batch_order(std::uint64_t seed, std::size_t epoch, std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(seed, 0xE90C + epoch));
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

struct TrainResult {
    NetworkParams params;
    std::vector<double> epoch_losses;   // mean training loss per epoch
    double final_loss = 0.0;            // training loss of the returned params' epoch
    std::size_t best_epoch = 0;         // epoch the returned params come from (0-based)
    std::vector<double> val_auroc_trace;  // classifier runs only
};

/// Train with Adam.
///
/// Mse without validation data: plateau early stop — stops once the relative
/// epoch-over-epoch improvement stays below early_stop_min_delta for
/// early_stop_patience consecutive epochs; returns the final parameters and
/// final mean training loss.
///
/// BinaryCrossEntropy with validation data: early stop on best validation
/// AUROC with the same patience; returns the parameters from the best epoch.
inline TrainResult train(NetworkParams params, const Matrix& train_in, const Matrix& train_target,
                         const Matrix* val_in, const Matrix* val_target, const TrainConfig& cfg,
                         std::uint64_t seed) {
    cfg.validate();
    if (train_in.rows == 0) throw DataError("train: empty training data");
    if (train_target.rows != train_in.rows) throw DataError("train: target row mismatch");

    const bool use_val_auroc = cfg.loss_kind == LossKind::BinaryCrossEntropy && val_in != nullptr;
    if (use_val_auroc && (val_target == nullptr || val_target->rows != val_in->rows)) {
        throw DataError("train: validation target mismatch");
    }

    AdamState adam = AdamState::zeros_like(params);
    TrainResult result;
    result.params = params;

    double best_val = -1.0;
    double prev_loss = std::numeric_limits<double>::infinity();
    std::size_t stall = 0;

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const auto order = batch_order(seed, epoch, train_in.rows);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t take = std::min(cfg.batch_size, order.size() - start);
            Matrix bx(take, train_in.cols);
            Matrix by(take, train_target.cols);
            for (std::size_t r = 0; r < take; ++r) {
                const std::size_t src = order[start + r];
                std::copy(train_in.row(src), train_in.row(src) + train_in.cols, bx.row(r));
                std::copy(train_target.row(src), train_target.row(src) + train_target.cols, by.row(r));
            }
            Gradients g = backprop_grads(params, bx, by, cfg.loss_kind);
            adam_update(params, g, adam, cfg);
            loss_sum += g.loss * static_cast<double>(take);
        }
        const double epoch_loss = loss_sum / static_cast<double>(train_in.rows);
        result.epoch_losses.push_back(epoch_loss);

        if (use_val_auroc) {
            const Matrix val_scores = forward(params, *val_in);
            std::vector<double> scores(val_scores.rows), labels(val_scores.rows);
            for (std::size_t r = 0; r < val_scores.rows; ++r) {
                scores[r] = val_scores(r, 0);
                labels[r] = (*val_target)(r, 0);
            }
            const double auc = auroc_or_half(scores, labels);
            result.val_auroc_trace.push_back(auc);
            if (auc > best_val + cfg.early_stop_min_delta) {
                best_val = auc;
                result.params = params;
                result.best_epoch = epoch;
                result.final_loss = epoch_loss;
                stall = 0;
            } else {
                if (++stall >= cfg.early_stop_patience) break;
            }
        } else {
            result.params = params;
            result.best_epoch = epoch;
            result.final_loss = epoch_loss;
            const double rel_improvement =
                (prev_loss - epoch_loss) / std::max(std::abs(prev_loss), 1e-12);
            if (std::isfinite(prev_loss) && rel_improvement < cfg.early_stop_min_delta) {
                if (++stall >= cfg.early_stop_patience) break;
            } else {
                stall = 0;
            }
            prev_loss = epoch_loss;
        }
    }
    return result;
}

}  // namespace aequity
