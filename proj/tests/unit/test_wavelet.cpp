#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ecglab/metrics.hpp"
#include "ecglab/noise.hpp"
#include "ecglab/rng.hpp"
#include "ecglab/synth.hpp"
#include "ecglab/wavelet.hpp"

using namespace ecglab;
using namespace ecglab::wavelet;

namespace {

const Family kFamilies[] = {Family::haar, Family::db4, Family::sym4};

void check_close(const std::vector<double>& got, const std::vector<double>& want, double tol) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < tol);
}

Signal random_signal(SplitMix64& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return {v, 360};
}

}  // namespace

TEST_CASE("filter banks are orthonormal quadrature mirrors") {
    for (auto f : kFamilies) {
        const auto s = WaveletSpec::make(f);
        const std::size_t n = s.filter_length();
        for (std::size_t shift = 0; shift < n; shift += 2) {
            double lo = 0.0, hi = 0.0, cross = 0.0;
            for (std::size_t j = 0; j + shift < n; ++j) {
                lo += s.dec_lo[j] * s.dec_lo[j + shift];
                hi += s.dec_hi[j] * s.dec_hi[j + shift];
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (j + shift < n) cross += s.dec_lo[j] * s.dec_hi[j + shift];
            }
            CHECK(std::abs(lo - (shift == 0 ? 1.0 : 0.0)) < 1e-12);
            CHECK(std::abs(hi - (shift == 0 ? 1.0 : 0.0)) < 1e-12);
            CHECK(std::abs(cross) < 1e-12);
        }
        CHECK(std::accumulate(s.dec_lo.begin(), s.dec_lo.end(), 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
        CHECK(std::abs(std::accumulate(s.dec_hi.begin(), s.dec_hi.end(), 0.0)) < 1e-11);
        CHECK(parse_family(to_string(f)) == f);
    }
    CHECK_THROWS(parse_family("coif5"));
}

TEST_CASE("haar on a constant pair") {
    const auto c = dwt(Signal({1.0, 1.0}, 2), WaveletSpec::make(Family::haar), 1);
    REQUIRE(c.approximation.size() == 1);
    CHECK(c.approximation[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::abs(c.details.at(0).at(0)) < 1e-15);
}

TEST_CASE("symmetric-mode coefficients match the reference transform") {
    const Signal x({1, 2, 3, 4, 5, 6, 7, 9, 2, 1}, 10);
    const auto s1 = dwt(x, WaveletSpec::make(Family::sym4), 1);
    check_close(s1.approximation,
                {2.5509431938418126, 1.5975058540564984, 4.3472572805599325, 7.015853355966758, 11.307004989759685,
                 3.995604268876855, 1.2134410420525885, 10.708675981434752},
                1e-12);
    check_close(s1.details.at(0),
                {-0.10927326907805518, 0.3069348857957045, -0.19766161672358934, -0.032223100608073714,
                 0.4774552198412033, -3.3334485345822342, 0.08515780191952038, 1.9067629209806205},
                1e-12);

    const auto d2 = dwt(x, WaveletSpec::make(Family::db4), 2);
    check_close(d2.approximation,
                {7.468402962238519, 2.9585422343106065, 10.270525198230285, 5.0143903213898335, 3.768088220167989,
                 14.269050969179334, 0.9878171580759363},
                1e-12);
    check_close(d2.details.at(0),
                {-0.429470015436781, -1.1318237115659808, 0.7484060326059647, 0.9561054042771949, -0.5885123172277207,
                 -0.5738577631082198, -0.41994902800712286},
                1e-12);
    check_close(d2.details.at(1),
                {0.023713130626226167, 0.0409620863958662, -0.06467521702209224, -0.23037781330889642,
                 -3.5614064420201994, 1.2161605365656507, 3.409817794430152, -1.1799957534510164},
                1e-12);
}

TEST_CASE("periodized coefficients match the reference transform") {
    std::vector<double> v(16);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(static_cast<double>(i), 1.5);
    const auto c = dwt(Signal(v, 16), WaveletSpec::make(Family::db4), 2, Extension::periodization);
    check_close(c.approximation, {70.17972272582922, 80.87837728703718, 8.883897246488152, 29.09526420729398}, 1e-11);
    check_close(c.details.at(0), {16.140461615429068, -3.226808616230902, -5.573067290184656, -37.752980082278626}, 1e-11);
    check_close(c.details.at(1),
                {-0.3684731104269556, -0.6418726853118926, -0.00566455249184933, -0.0022711533108317056,
                 -0.0011898834737452263, -0.0007165323740782881, 14.743708791463279, 7.927069809517395},
                1e-11);
}

TEST_CASE("perfect reconstruction for random signals") {
    SplitMix64 rng(31);
    for (auto f : kFamilies) {
        const auto spec = WaveletSpec::make(f);
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const std::size_t n = 16 + rng.below(500);
            const Signal x = random_signal(rng, n);
            const int levels = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(5, max_level(n)))));
            const Signal y = idwt(dwt(x, spec, levels), spec);
            REQUIRE(y.size() == n);
            for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(y[i] - x[i]));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("constant signals have vanishing details") {
    const Signal c(std::vector<double>(64, 2.5), 64);
    for (auto f : kFamilies) {
        const auto spec = WaveletSpec::make(f);
        const auto co = dwt(c, spec, 3);
        for (const auto& d : co.details) {
            for (double v : d) CHECK(std::abs(v) < 1e-10);
        }
        auto zeroed = co;
        for (auto& d : zeroed.details) std::fill(d.begin(), d.end(), 0.0);
        const Signal flat = idwt(zeroed, spec);
        for (double v : flat.samples()) CHECK(std::abs(v - 2.5) < 1e-10);
        auto blank = co;
        std::fill(blank.approximation.begin(), blank.approximation.end(), 0.0);
        for (auto& d : blank.details) std::fill(d.begin(), d.end(), 0.0);
        const Signal none = idwt(blank, spec);
        for (double v : none.samples()) CHECK(v == 0.0);
    }
}

TEST_CASE("periodized transform preserves energy and round-trips coefficients") {
    SplitMix64 rng(5);
    for (auto f : kFamilies) {
        const auto spec = WaveletSpec::make(f);
        const Signal x = random_signal(rng, 256);
        const auto c = dwt(x, spec, 4, Extension::periodization);
        double e = power(c.approximation);
        for (const auto& d : c.details) e += power(d);
        CHECK(e == doctest::Approx(power(x)).epsilon(1e-9));

        auto r = c;
        for (auto& v : r.approximation) v = rng.normal();
        for (auto& d : r.details) {
            for (auto& v : d) v = rng.normal();
        }
        const auto back = dwt(idwt(r, spec), spec, 4, Extension::periodization);
        check_close(back.approximation, r.approximation, 1e-10);
        for (std::size_t l = 0; l < r.details.size(); ++l) check_close(back.details[l], r.details[l], 1e-10);
    }
}

TEST_CASE("decomposition preconditions") {
    const auto spec = WaveletSpec::make(Family::sym4);
    CHECK(max_level(360) == 8);
    CHECK(default_levels(360) == 4);
    CHECK(default_levels(4) == 2);
    CHECK_THROWS_AS(dwt(Signal(std::vector<double>(100, 1.0), 100), spec, 0), std::invalid_argument);
    CHECK_THROWS_AS(dwt(Signal(std::vector<double>(100, 1.0), 100), spec, 7), std::invalid_argument);
    CHECK_THROWS_AS(dwt(Signal(std::vector<double>(5, 1.0), 5), spec, 1), std::invalid_argument);
    CHECK_THROWS_AS(dwt(Signal(std::vector<double>(100, 1.0), 100), spec, 3, Extension::periodization),
                    std::invalid_argument);
    const auto c = dwt(Signal(std::vector<double>(64, 1.0), 64), spec, 2);
    CHECK_THROWS_AS(idwt(c, WaveletSpec::make(Family::db4)), std::invalid_argument);
}

TEST_CASE("soft threshold and noise estimate") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-0.7, 0.0) == -0.7);
    const std::vector<double> d{1.0, -2.0, 3.0, -4.0, 5.0};
    CHECK(estimate_sigma(d) == doctest::Approx(3.0 / 0.6745));
}

TEST_CASE("denoising behaviour") {
    const auto spec = WaveletSpec::make(Family::sym4);
    const Signal flat(std::vector<double>(360, 1.25), 360);
    const Signal same = wavelet_denoise(flat, spec, 4);
    for (double v : same.samples()) CHECK(std::abs(v - 1.25) < 1e-10);

    synth::EcgModelParams p;
    p.voltage_scale = 3.0;
    const Signal ecg = synth::generate_ecg(p, 4.0, 360);
    const Signal noisy = noise::add_noise(ecg, {noise::Kind::random, 6.0, 17, std::nullopt});
    const Signal out = wavelet_denoise(noisy, spec, 4);
    CHECK(metrics::rms(ecg, out) < metrics::rms(ecg, noisy));

    const Signal big = wavelet_denoise(scaled(noisy, 3.0), spec, 4);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(big[i] - 3.0 * out[i]) < 1e-10);
}
