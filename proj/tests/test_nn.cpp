#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aequity/nn.hpp"
#include "aequity/rng.hpp"
#include "oracles.hpp"

using namespace aequity;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    Matrix m(rows, cols);
    Rng rng(seed);
    for (double& v : m.data) v = scale * rng.normal();
    return m;
}

bool params_equal(const NetworkParams& a, const NetworkParams& b) {
    if (a.layer_dims != b.layer_dims) return false;
    for (std::size_t l = 0; l < a.n_layers(); ++l) {
        if (a.weights[l].data != b.weights[l].data) return false;
        if (a.biases[l] != b.biases[l]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("init_network is deterministic for a fixed seed") {
    const std::vector<std::size_t> dims{4, 2, 4};
    const std::vector<Activation> acts{Activation::Relu, Activation::Identity};
    const NetworkParams a = init_network(dims, acts, 7);
    const NetworkParams b = init_network(dims, acts, 7);
    CHECK(params_equal(a, b));
    const NetworkParams c = init_network(dims, acts, 8);
    CHECK_FALSE(params_equal(a, c));
}

TEST_CASE("init_network draws within the Xavier bound and zeroes biases") {
    // dims [4,2,4]: first layer fan_in+fan_out = 6 -> bound sqrt(6/6) = 1
    const NetworkParams p =
        init_network({4, 2, 4}, {Activation::Relu, Activation::Identity}, 123);
    for (double w : p.weights[0].data) {
        CHECK(w >= -1.0);
        CHECK(w <= 1.0);
    }
    bool nonzero = false;
    for (double w : p.weights[0].data) nonzero = nonzero || w != 0.0;
    CHECK(nonzero);
    for (const auto& b : p.biases) {
        for (double v : b) CHECK(v == 0.0);
    }
}

TEST_CASE("init_network shapes chain for the EHR autoencoder layout") {
    const std::vector<std::size_t> dims{149, 64, 2, 64, 149};
    const NetworkParams p = init_network(
        dims, {Activation::Relu, Activation::Identity, Activation::Relu, Activation::Identity}, 1);
    REQUIRE(p.weights.size() == 4);
    CHECK(p.weights[0].rows == 149);
    CHECK(p.weights[0].cols == 64);
    CHECK(p.weights[1].rows == 64);
    CHECK(p.weights[1].cols == 2);
    CHECK(p.weights[2].rows == 2);
    CHECK(p.weights[2].cols == 64);
    CHECK(p.weights[3].rows == 64);
    CHECK(p.weights[3].cols == 149);
}

TEST_CASE("init_network rejects invalid dims") {
    CHECK_THROWS_AS(init_network({4}, {}, 1), ConfigError);
    CHECK_THROWS_AS(init_network({4, 0}, {Activation::Relu}, 1), ConfigError);
    CHECK_THROWS_AS(init_network({4, 2}, {}, 1), ConfigError);
}

TEST_CASE("forward: identity single layer reproduces its input") {
    NetworkParams p = init_network({3, 3}, {Activation::Identity}, 5);
    p.weights[0] = Matrix(3, 3);
    for (std::size_t i = 0; i < 3; ++i) p.weights[0](i, i) = 1.0;
    const Matrix x = random_matrix(4, 3, 99);
    const Matrix y = forward(p, x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(y.data[i] == doctest::Approx(x.data[i]));
}

TEST_CASE("forward: sigmoid of zero pre-activation is 0.5") {
    NetworkParams p = init_network({2, 1}, {Activation::Sigmoid}, 5);
    p.weights[0] = Matrix(2, 1);  // zero weights, zero bias
    Matrix x(1, 2);
    x(0, 0) = 3.0;
    x(0, 1) = -1.0;
    const Matrix y = forward(p, x);
    CHECK(y(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("forward: random 3-layer net keeps shape and stays finite") {
    const NetworkParams p = init_network(
        {6, 5, 3}, {Activation::Relu, Activation::Sigmoid}, 42);
    const Matrix x = random_matrix(7, 6, 1);
    const Matrix y = forward(p, x);
    CHECK(y.rows == 7);
    CHECK(y.cols == 3);
    CHECK(y.all_finite());
    for (double v : y.data) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("forward rejects shape mismatches") {
    const NetworkParams p = init_network({4, 2}, {Activation::Identity}, 1);
    CHECK_THROWS_AS(forward(p, Matrix(3, 5)), DataError);
}

TEST_CASE("backprop: zero loss and zero gradients when target equals output") {
    const NetworkParams p = init_network({3, 2}, {Activation::Identity}, 11);
    const Matrix x = random_matrix(5, 3, 2);
    const Matrix y = forward(p, x);
    const Gradients g = backprop_grads(p, x, y, LossKind::Mse);
    CHECK(g.loss == doctest::Approx(0.0));
    for (const auto& w : g.weights) {
        for (double v : w.data) CHECK(v == doctest::Approx(0.0));
    }
}

TEST_CASE("backprop: single linear neuron hand case (x=1, target=0, w=2)") {
    NetworkParams p = init_network({1, 1}, {Activation::Identity}, 1);
    p.weights[0](0, 0) = 2.0;
    p.biases[0][0] = 0.0;
    Matrix x(1, 1);
    x(0, 0) = 1.0;
    Matrix y(1, 1);
    y(0, 0) = 0.0;
    const Gradients g = backprop_grads(p, x, y, LossKind::Mse);
    CHECK(g.loss == doctest::Approx(4.0));
    CHECK(g.weights[0](0, 0) == doctest::Approx(4.0));
}

TEST_CASE("backprop matches central finite differences on a [5,3,5] net") {
    const NetworkParams p = init_network(
        {5, 3, 5}, {Activation::Relu, Activation::Identity}, 21);
    const Matrix x = random_matrix(8, 5, 31);
    const Matrix y = random_matrix(8, 5, 32);
    const Gradients analytic = backprop_grads(p, x, y, LossKind::Mse);
    const Gradients numeric = oracle::finite_difference_grads(p, x, y, LossKind::Mse);
    CHECK(oracle::max_grad_rel_error(analytic, numeric) < 1e-4);
}

TEST_CASE("gradient oracle: 20 random nets, mse and bce, max rel error < 1e-4") {
    Rng meta(777);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t in = 2 + meta.below(4);
        const std::size_t mid = 2 + meta.below(4);
        const bool bce = trial % 2 == 0;
        const std::size_t out = bce ? 1 : in;
        const std::vector<std::size_t> dims{in, mid, out};
        const std::vector<Activation> acts{
            Activation::Relu, bce ? Activation::Sigmoid : Activation::Identity};
        const NetworkParams p = init_network(dims, acts, meta.next_u64());
        const std::size_t rows = 3 + meta.below(6);
        const Matrix x = random_matrix(rows, in, meta.next_u64());
        Matrix y(rows, out);
        Rng yr(meta.next_u64());
        for (double& v : y.data) v = bce ? static_cast<double>(yr.below(2)) : yr.normal();
        const LossKind kind = bce ? LossKind::BinaryCrossEntropy : LossKind::Mse;
        const Gradients analytic = backprop_grads(p, x, y, kind);
        const Gradients numeric = oracle::finite_difference_grads(p, x, y, kind);
        CHECK(oracle::max_grad_rel_error(analytic, numeric) < 1e-4);
    }
}

TEST_CASE("adam: first step moves parameters by about -lr on unit gradient") {
    NetworkParams p = init_network({1, 1}, {Activation::Identity}, 3);
    const double w0 = p.weights[0](0, 0);
    Gradients g;
    g.weights.emplace_back(1, 1);
    g.weights[0](0, 0) = 1.0;
    g.biases.emplace_back(1, 0.0);
    AdamState st = AdamState::zeros_like(p);
    TrainConfig cfg;
    cfg.learning_rate = 0.001;
    adam_update(p, g, st, cfg);
    CHECK(st.step_count == 1);
    CHECK(p.weights[0](0, 0) == doctest::Approx(w0 - 0.001).epsilon(1e-6));
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    NetworkParams p = init_network({2, 2}, {Activation::Identity}, 3);
    const NetworkParams before = p;
    Gradients g;
    g.weights.emplace_back(2, 2);
    g.biases.emplace_back(2, 0.0);
    AdamState st = AdamState::zeros_like(p);
    adam_update(p, g, st, TrainConfig{});
    CHECK(params_equal(p, before));
}

TEST_CASE("adam: two steps with constant gradient match the hand recurrence") {
    // g = 2, lr = 0.1: m/v estimates are bias-corrected to exactly g and g^2
    // under a constant gradient, so each step moves by lr * g/(|g| + eps).
    NetworkParams p = init_network({1, 1}, {Activation::Identity}, 3);
    p.weights[0](0, 0) = 0.0;
    Gradients g;
    g.weights.emplace_back(1, 1);
    g.weights[0](0, 0) = 2.0;
    g.biases.emplace_back(1, 0.0);
    AdamState st = AdamState::zeros_like(p);
    TrainConfig cfg;
    cfg.learning_rate = 0.1;

    // hand evaluation
    double m = 0.0, v = 0.0, w = 0.0;
    for (int t = 1; t <= 2; ++t) {
        m = 0.9 * m + 0.1 * 2.0;
        v = 0.999 * v + 0.001 * 4.0;
        const double mhat = m / (1.0 - std::pow(0.9, t));
        const double vhat = v / (1.0 - std::pow(0.999, t));
        w -= 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
    }

    adam_update(p, g, st, cfg);
    adam_update(p, g, st, cfg);
    CHECK(st.step_count == 2);
    CHECK(p.weights[0](0, 0) == doctest::Approx(w).epsilon(1e-12));
}

TEST_CASE("train: constant dataset reconstructs to < 1e-3") {
    Matrix x(32, 4);  // all zeros, i.e. a standardized constant dataset
    NetworkParams p = init_network(
        {4, 3, 2, 3, 4},
        {Activation::Relu, Activation::Identity, Activation::Relu, Activation::Identity}, 9);
    TrainConfig cfg;
    const TrainResult r = train(std::move(p), x, x, nullptr, nullptr, cfg, 5);
    CHECK(r.final_loss < 1e-3);

    // loss trace is non-increasing after epoch 3
    for (std::size_t e = 3; e + 1 < r.epoch_losses.size(); ++e) {
        CHECK(r.epoch_losses[e + 1] <= r.epoch_losses[e] + 1e-12);
    }
}

TEST_CASE("train: linearly separable binary task reaches val AUROC > 0.95") {
    Rng rng(1234);
    const std::size_t n = 200;
    Matrix x(n, 2), y(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double label = static_cast<double>(i % 2);
        x(i, 0) = rng.normal() + (label == 1.0 ? 2.0 : -2.0);
        x(i, 1) = rng.normal();
        y(i, 0) = label;
    }
    Matrix vx(60, 2), vy(60, 1);
    for (std::size_t i = 0; i < 60; ++i) {
        const double label = static_cast<double>(i % 2);
        vx(i, 0) = rng.normal() + (label == 1.0 ? 2.0 : -2.0);
        vx(i, 1) = rng.normal();
        vy(i, 0) = label;
    }
    NetworkParams p = init_network({2, 8, 1}, {Activation::Relu, Activation::Sigmoid}, 77);
    TrainConfig cfg;
    cfg.loss_kind = LossKind::BinaryCrossEntropy;
    cfg.max_epochs = 30;
    const TrainResult r = train(std::move(p), x, y, &vx, &vy, cfg, 3);
    REQUIRE_FALSE(r.val_auroc_trace.empty());
    double best = 0.0;
    for (double a : r.val_auroc_trace) best = std::max(best, a);
    CHECK(best > 0.95);
}

TEST_CASE("train: max_epochs=1 records exactly one epoch") {
    Matrix x = random_matrix(16, 3, 4);
    NetworkParams p = init_network({3, 3}, {Activation::Identity}, 2);
    TrainConfig cfg;
    cfg.max_epochs = 1;
    const TrainResult r = train(std::move(p), x, x, nullptr, nullptr, cfg, 6);
    CHECK(r.epoch_losses.size() == 1);
}

TEST_CASE("train: empty data errors") {
    Matrix x(0, 3);
    NetworkParams p = init_network({3, 3}, {Activation::Identity}, 2);
    CHECK_THROWS_AS(train(std::move(p), x, x, nullptr, nullptr, TrainConfig{}, 1), DataError);
}

TEST_CASE("train is bit-deterministic for identical seed, data and config") {
    const Matrix x = random_matrix(64, 5, 55);
    const NetworkParams init = init_network(
        {5, 4, 2, 4, 5},
        {Activation::Relu, Activation::Identity, Activation::Relu, Activation::Identity}, 10);
    TrainConfig cfg;
    cfg.max_epochs = 20;
    const TrainResult a = train(init, x, x, nullptr, nullptr, cfg, 42);
    const TrainResult b = train(init, x, x, nullptr, nullptr, cfg, 42);
    CHECK(params_equal(a.params, b.params));
    CHECK(a.epoch_losses == b.epoch_losses);
}

TEST_CASE("batch order is a pure function of seed and epoch") {
    const auto a = batch_order(9, 3, 100);
    const auto b = batch_order(9, 3, 100);
    CHECK(a == b);
    CHECK(batch_order(9, 4, 100) != a);
    CHECK(batch_order(10, 3, 100) != a);
    // a permutation of 0..99
    std::vector<std::size_t> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}
