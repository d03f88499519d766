#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ecglab/neural/cnn.hpp"
#include "ecglab/noise.hpp"
#include "ecglab/recipes.hpp"
#include "ecglab/rng.hpp"
#include "gradcheck.hpp"

using namespace ecglab;
using namespace ecglab::neural;

namespace {

Tensor row_tensor(std::vector<double> v) {
    const std::size_t n = v.size();
    return Tensor({1, 1, n}, std::move(v));
}

std::vector<double> as_vec(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

CnnConfig small_config() {
    CnnConfig c;
    c.filters_per_layer = 4;
    c.kernel_len = 9;
    c.batch_size = 8;
    c.seed = 3;
    return c;
}

}  // namespace

TEST_CASE("convolution hand examples") {
    Conv1d delta(1, 1, 5);
    delta.weight = {0, 0, 1, 0, 0};
    const Tensor x = row_tensor({0.5, -1.0, 2.0, 3.0, 4.5, -2.0});
    CHECK(as_vec(delta.apply(x)) == as_vec(x));

    Conv1d box(1, 1, 3);
    box.weight = {1, 1, 1};
    CHECK(as_vec(box.apply(row_tensor({1, 2, 3}))) == std::vector<double>{3, 6, 5});

    Conv1d blank(1, 1, 3);
    blank.weight = {0, 0, 0};
    blank.bias = {0.5};
    const Tensor flat = blank.apply(x);
    for (double v : flat.data()) CHECK(v == 0.5);

    delta.zero_grad();
    delta.forward(x);
    const Tensor up = gradcheck::random_tensor(x.shape(), 4);
    CHECK(as_vec(delta.backward(up)) == as_vec(up));

    delta.zero_grad();
    delta.forward(x);
    delta.backward(Tensor(x.shape(), 0.0));
    for (double g : delta.grad_weight) CHECK(g == 0.0);
    CHECK(delta.grad_bias[0] == 0.0);

    CHECK_THROWS_AS(Conv1d(1, 1, 4), std::invalid_argument);
    CHECK_THROWS((void)box.apply(Tensor({1, 2, 3})));
}

TEST_CASE("finite-difference gradients") {
    for (const auto& r : gradcheck::run_all()) {
        INFO(r.name << " max error " << r.max_error);
        CHECK(r.max_error < 1e-5);
    }
}

TEST_CASE("batch normalization statistics") {
    BatchNorm1d bn(2);
    bn.beta = {0.25, -1.0};
    Tensor x({3, 2, 4});
    SplitMix64 rng(2);
    for (std::size_t b = 0; b < 3; ++b) {
        for (std::size_t i = 0; i < 4; ++i) {
            x.at(b, 0, i) = 7.0;
            x.at(b, 1, i) = rng.normal() * 3.0 + 2.0;
        }
    }
    const Tensor y = bn.forward(x, Mode::train);
    double mean = 0.0, var = 0.0;
    for (std::size_t b = 0; b < 3; ++b) {
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(y.at(b, 0, i) == doctest::Approx(0.25));
            mean += y.at(b, 1, i) + 1.0;
        }
    }
    mean /= 12.0;
    for (std::size_t b = 0; b < 3; ++b) {
        for (std::size_t i = 0; i < 4; ++i) var += std::pow(y.at(b, 1, i) + 1.0 - mean, 2);
    }
    var /= 12.0;
    CHECK(std::abs(mean) < 1e-9);
    // eps in the denominator keeps the variance a hair under one
    CHECK(std::abs(var - 1.0) < 1e-5);
    CHECK(bn.running_mean[0] == doctest::Approx(0.7));

    BatchNorm1d fresh(2);
    const Tensor z = fresh.forward(x, Mode::inference);
    CHECK(z.at(0, 0, 0) == doctest::Approx(7.0 / std::sqrt(1.0 + 1e-5)));
}

TEST_CASE("relu and pooling") {
    Relu relu;
    CHECK(as_vec(relu.forward(row_tensor({-1, 0, 2}))) == std::vector<double>{0, 0, 2});
    CHECK(as_vec(relu.backward(row_tensor({5, 5, 5}))) == std::vector<double>{0, 0, 5});

    AvgPool1d pool(4);
    const Tensor p = pool.forward(row_tensor({1, 2, 3, 4, 5, 6, 7, 8}));
    CHECK(as_vec(p) == std::vector<double>{1, 5});
    CHECK(as_vec(pool.backward(row_tensor({2, 3}))) == std::vector<double>{2, 0, 0, 0, 3, 0, 0, 0});
    std::size_t len = 360;
    std::vector<std::size_t> seen;
    for (int i = 0; i < 3; ++i) seen.push_back(len = AvgPool1d::output_length(len, 4));
    CHECK(seen == std::vector<std::size_t>{90, 23, 6});

    AvgPool1d avg(4, PoolMode::mean);
    CHECK(as_vec(avg.apply(row_tensor({1, 2, 3, 4, 5, 6}))) == std::vector<double>{2.5, 5.5});
}

TEST_CASE("dense layer") {
    Dense id(3, 3);
    id.weight = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    id.bias = {0, 0, 0};
    const Tensor x = row_tensor({1.5, -2.0, 0.25});
    CHECK(as_vec(id.apply(x)) == as_vec(x));
    Dense bias_only(3, 2);
    std::fill(bias_only.weight.begin(), bias_only.weight.end(), 0.0);
    bias_only.bias = {0.3, -0.7};
    CHECK(as_vec(bias_only.apply(x)) == std::vector<double>{0.3, -0.7});
    CHECK_THROWS((void)id.apply(row_tensor({1, 2})));
}

TEST_CASE("mean squared error") {
    const Tensor a = row_tensor({1, 2, 3});
    CHECK(mse_loss(a, a).loss == 0.0);
    CHECK(mse_loss(row_tensor({2, 3, 4}), a).loss == 1.0);
    CHECK(as_vec(mse_loss(row_tensor({2, 3, 4}), a).grad) == std::vector<double>(3, 2.0 / 3.0));
    CHECK_THROWS(mse_loss(a, row_tensor({1, 2})));
}

TEST_CASE("adam and clipping") {
    std::vector<double> w{1.0}, g{2.0};
    const std::vector<ParamView> view{{"w", w, g}};
    Adam adam({0.01});
    adam.step(view);
    CHECK(w[0] == doctest::Approx(0.99).epsilon(1e-6));
    CHECK(adam.steps() == 1);

    g[0] = 0.0;
    const double before = w[0];
    const double m = adam.first_moment()[0][0];
    adam.step(view);
    CHECK(adam.first_moment()[0][0] == doctest::Approx(0.9 * m));
    // the first moment still carries the old gradient, so w keeps drifting; a fresh optimizer does not move
    std::vector<double> w2{1.0}, g2{0.0};
    Adam idle;
    idle.step(std::vector<ParamView>{{"w", w2, g2}});
    CHECK(w2[0] == 1.0);
    CHECK(w[0] < before);

    g[0] = std::nan("");
    const double held = w[0];
    CHECK_THROWS_AS(adam.step(view), std::runtime_error);
    CHECK(w[0] == held);

    std::vector<double> a{0.3, 0.4}, ga{0.3, 0.4};
    std::vector<double> b{0.0}, gb{0.0};
    const std::vector<ParamView> pv{{"a", a, ga}, {"b", b, gb}};
    CHECK(clip_gradients(pv, 1.0) == doctest::Approx(0.5));
    CHECK(ga == std::vector<double>{0.3, 0.4});
    ga = {1.2, 1.6};
    CHECK(clip_gradients(pv, 1.0) == doctest::Approx(2.0));
    CHECK(std::abs(gradient_norm(pv) - 1.0) < 1e-12);
    ga = {0.0, 0.0};
    clip_gradients(pv, 1.0);
    CHECK(ga == std::vector<double>{0.0, 0.0});
}

TEST_CASE("configuration checks") {
    CnnConfig c;
    CHECK(c.pooled_length() == 6);
    c.kernel_len = 22;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.kernel_len = 23;
    c.filters_per_layer = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("overfits a handful of pairs") {
    const Signal rec = recipes::synthetic_record(8.0, 360);
    const auto clean = segment(rec, 1.0);
    std::vector<Signal> noisy;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        noisy.push_back(noise::add_noise(clean[i], {noise::Kind::random_plus_drift, 0.0, 40 + i, std::nullopt}));
    }
    CnnConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 9;
    const auto res = train(cfg, noisy, clean);
    REQUIRE(res.trace.size() == 200);
    for (const auto& e : res.trace) CHECK(std::isfinite(e.loss));
    MESSAGE("rms epoch 1 " << res.trace.front().rms << ", epoch 200 " << res.trace.back().rms);
    CHECK(res.trace.back().rms < 0.05 * res.trace.front().rms);
    CHECK(res.trace.back().loss < 0.1 * res.trace.front().loss);
}

TEST_CASE("training is deterministic and zero epochs is a no-op") {
    const Signal rec = recipes::synthetic_record(6.0, 360);
    const auto clean = segment(rec, 1.0);
    std::vector<Signal> noisy;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        noisy.push_back(noise::add_noise(clean[i], {noise::Kind::random, 3.0, i, std::nullopt}));
    }
    auto cfg = small_config();
    cfg.epochs = 0;
    const auto none = train(cfg, noisy, clean);
    CHECK(none.trace.empty());
    const CnnModel init(cfg);
    CHECK(none.model.fc.weight == init.fc.weight);

    cfg.epochs = 5;
    const auto a = train(cfg, noisy, clean);
    const auto b = train(cfg, noisy, clean);
    CHECK(a.model.fc.weight == b.model.fc.weight);
    CHECK(a.trace.back().loss == b.trace.back().loss);

    const Signal five = concatenate(std::span<const Signal>(noisy.data(), 5));
    const Signal out = denoise(a.model, five);
    CHECK(out.size() == 1800);
    CHECK(denoise(a.model, five).vec() == out.vec());
    CHECK_THROWS(denoise(a.model, Signal(std::vector<double>(500, 0.0), 360)));

    std::stringstream ss;
    save(ss, a.model);
    const CnnModel back = load(ss);
    CHECK(denoise(back, five).vec() == out.vec());
    std::stringstream junk("CNN0garbage");
    CHECK_THROWS(load(junk));

    std::vector<Signal> short_clean(clean.begin(), clean.begin() + 2);
    CHECK_THROWS(train(cfg, noisy, short_clean));
}
