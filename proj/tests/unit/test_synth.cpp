#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ecglab/synth.hpp"

using namespace ecglab;
using namespace ecglab::synth;

namespace {

EcgModelParams flat_params() {
    EcgModelParams p;
    for (auto& s : p.spikes) s.amplitude = 0.0;
    return p;
}

double z_after(double t_end, double dt, double z_start) {
    auto p = flat_params();
    TrajectoryState s;
    s.z = z_start;
    const auto steps = static_cast<long>(std::llround(t_end / dt));
    for (long i = 0; i < steps; ++i) s = rk4_step(s, p, dt);
    return s.z;
}

std::size_t beats(const Signal& s) { return detect_r_peaks(s).size(); }

}  // namespace

TEST_CASE("parameter validation") {
    EcgModelParams p;
    CHECK_NOTHROW(p.validate());
    p.spikes[1].theta = p.spikes[2].theta;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = EcgModelParams{};
    p.spikes[4].width = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = EcgModelParams{};
    p.heart_rate_bpm = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("angle wrapping lands in (-pi, pi]") {
    CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
    CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
}

TEST_CASE("baseline is a fixed point without spikes") {
    auto p = flat_params();
    p.z0 = 0.0;
    TrajectoryState s;
    for (int i = 0; i < 1000; ++i) {
        s = rk4_step(s, p, 1.0 / 360);
        REQUIRE(s.z == 0.0);
    }
}

TEST_CASE("spike-free z decays like the exponential") {
    CHECK(std::abs(z_after(1.0, 1.0 / 360, 1.0) - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("rk4 is fourth order on the decaying subsystem") {
    double dt = 0.1;
    double prev = std::abs(z_after(2.0, dt, 1.0) - std::exp(-2.0));
    for (int k = 0; k < 3; ++k) {
        dt /= 2;
        const double err = std::abs(z_after(2.0, dt, 1.0) - std::exp(-2.0));
        CHECK(prev / err >= 8.0);
        prev = err;
    }
}

TEST_CASE("trajectory radius relaxes onto the unit circle") {
    // The radial equation is logistic, r' = r(1 - r), so r(t) = 1 / (1 - (1 - 1/r0) e^-t).
    auto p = flat_params();
    auto radius_at = [&](double t_end, double dt) {
        TrajectoryState s;
        s.x = 2.0;
        const auto steps = static_cast<long>(std::llround(t_end / dt));
        for (long i = 0; i < steps; ++i) s = rk4_step(s, p, dt);
        return std::hypot(s.x, s.y);
    };
    const double dt = 1.0 / 360;
    const double r5 = radius_at(5.0, dt);
    const double closed = 1.0 / (1.0 - 0.5 * std::exp(-5.0));
    CHECK(std::abs(r5 - closed) < 1e-8);
    CHECK(std::abs(r5 - radius_at(5.0, dt / 10)) < 1e-8);
    CHECK(std::abs(r5 - 1.0) < 5e-3);
    CHECK(std::abs(radius_at(7.0, dt) - 1.0) < 1e-3);
}

TEST_CASE("generated ECG has the requested beat count and amplitude") {
    EcgModelParams p;
    const Signal s60 = generate_ecg(p, 10.0, 360);
    CHECK(s60.size() == 3600);
    CHECK(std::abs(static_cast<long>(beats(s60)) - 10) <= 1);

    p.heart_rate_bpm = 90.0;
    CHECK(std::abs(static_cast<long>(beats(generate_ecg(p, 10.0, 360))) - 15) <= 1);

    for (double rate : {57.0, 67.0}) {
        p.heart_rate_bpm = rate;
        p.voltage_scale = 2.0;
        const Signal s = generate_ecg(p, 10.0, 360);
        const auto [mn, mx] = std::ranges::minmax(s.vec());
        CHECK(mx - mn == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("generation is deterministic") {
    EcgModelParams p;
    CHECK(generate_ecg(p, 3.0, 500) == generate_ecg(p, 3.0, 500));
}

TEST_CASE("phase advances at the model's angular rate") {
    EcgModelParams p;
    p.heart_rate_bpm = 72.0;
    TrajectoryState s;
    const double dt = 1.0 / 500;
    for (int i = 0; i < 2500; ++i) s = rk4_step(s, p, dt);
    double unwrapped = 0.0;
    double last = std::atan2(s.y, s.x);
    const int steps = 5000;
    for (int i = 0; i < steps; ++i) {
        s = rk4_step(s, p, dt);
        const double th = std::atan2(s.y, s.x);
        const double d = wrap_angle(th - last);
        CHECK(d > 0.0);
        unwrapped += d;
        last = th;
    }
    CHECK(unwrapped / (steps * dt) == doctest::Approx(p.omega()).epsilon(0.01));
}

TEST_CASE("effort family beat counts") {
    EcgModelParams p;
    const Signal rest = generate_ecg(p, 1.0, 360);
    CHECK(rest_rate_bpm(rest) == doctest::Approx(60.0));
    const std::vector<double> rates{72, 78, 84, 90};
    const auto family = generate_effort_family(rest, rates, 360, 10.0);
    REQUIRE(family.size() == 4);
    const long expected[] = {12, 13, 14, 15};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(family[i].size() == 3600);
        CHECK(std::abs(static_cast<long>(beats(family[i])) - expected[i]) <= 1);
    }
}

TEST_CASE("effort family at the rest rate tiles the input") {
    EcgModelParams p;
    const Signal rest = generate_ecg(p, 1.0, 360);
    const std::vector<double> rates{60.0};
    const auto out = generate_effort_family(rest, rates, 360, 3.0);
    REQUIRE(out.size() == 1);
    for (std::size_t i = 0; i < out[0].size(); ++i) CHECK(std::abs(out[0][i] - rest[i % rest.size()]) < 1e-6);
    CHECK(generate_effort_family(rest, std::vector<double>{}, 360, 3.0).empty());
}

TEST_CASE("aliasing rates are rejected") {
    EcgModelParams p;
    const Signal rest = generate_ecg(p, 1.0, 360);
    const std::vector<double> too_fast{2000.0};
    CHECK_THROWS_AS(generate_effort_family(rest, too_fast, 360, 2.0), std::invalid_argument);
}
