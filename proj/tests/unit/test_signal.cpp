#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "ecglab/rng.hpp"
#include "ecglab/signal.hpp"
#include "ecglab/signal_io.hpp"

using namespace ecglab;

TEST_CASE("signal rejects empty samples and bad rates") {
    CHECK_THROWS_AS(Signal({}, 360), std::invalid_argument);
    CHECK_THROWS_AS(Signal({1.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(Signal({1.0}, -5), std::invalid_argument);
    const Signal s({1, 2, 3}, 3);
    CHECK(s.duration_seconds() == 1.0);
}

TEST_CASE("segment counts and remainder") {
    const Signal half_hour(std::vector<double>(30 * 60 * 360, 0.5), 360);
    const auto w = segment(half_hour, 1.0);
    CHECK(w.size() == 1800);
    CHECK(w.front().size() == 360);
    CHECK(w.back().fs() == 360);

    const Signal long_fs(std::vector<double>(30000, 1.0), 3000);
    const auto one = segment(long_fs, 10.0);
    REQUIRE(one.size() == 1);
    CHECK(one[0].size() == 30000);

    std::vector<double> v(361);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    const auto dropped = segment(Signal(v, 360), 1.0);
    REQUIRE(dropped.size() == 1);
    CHECK(dropped[0][359] == 359.0);
}

TEST_CASE("segment rejects fractional window sizes") {
    const Signal s(std::vector<double>(1000, 0.0), 360);
    CHECK_THROWS_AS(segment(s, 0.0015), std::invalid_argument);
    CHECK_THROWS_AS(segment(s, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(segment(s, 0.0), std::invalid_argument);
}

TEST_CASE("segment of concatenation is identity") {
    SplitMix64 rng(4);
    std::vector<Signal> parts;
    for (int i = 0; i < 5; ++i) {
        std::vector<double> v(36);
        for (auto& x : v) x = rng.normal();
        parts.emplace_back(v, 36);
    }
    const auto again = segment(concatenate(parts), 1.0);
    REQUIRE(again.size() == parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) CHECK(again[i] == parts[i]);
}

TEST_CASE("slice bounds") {
    const Signal s({1, 2, 3, 4}, 4);
    CHECK(slice(s, {1, 2}).vec() == std::vector<double>{2, 3});
    CHECK_THROWS(slice(s, {3, 2}));
    CHECK_THROWS(slice(s, {0, 0}));
}

TEST_CASE("power is a sum of squares") {
    CHECK(power(Signal({0, 0, 0}, 1)) == 0.0);
    CHECK(power(Signal({1, 1, 1, 1}, 1)) == 4.0);
    CHECK(power(Signal({3, 4}, 1)) == 25.0);
    const Signal s({0.5, -1.5, 2.0}, 10);
    CHECK(power(scaled(s, -3.0)) == doctest::Approx(9.0 * power(s)).epsilon(1e-15));
}

TEST_CASE("minmax scaling") {
    const auto a = minmax_scale(Signal({-3, 3}, 1));
    CHECK(a.signal.vec() == std::vector<double>{0, 1});
    const auto b = minmax_scale(Signal({1, 2, 3}, 1));
    CHECK(b.signal.vec() == std::vector<double>{0, 0.5, 1});
    CHECK_THROWS_AS(minmax_scale(Signal({5, 5, 5}, 1)), std::invalid_argument);
    CHECK_THROWS_AS(minmax_scale(Signal({1, 2}, 1), 1.0, 1.0), std::invalid_argument);

    SplitMix64 rng(11);
    std::vector<double> v(500);
    for (auto& x : v) x = 3.0 * rng.normal() + 1.0;
    const Signal s(v, 250);
    const auto sc = minmax_scale(s, -1.0, 2.0);
    const Signal back = sc.record.invert(sc.signal);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back[i] - v[i]) <= 1e-12 * std::max(1.0, std::abs(v[i])));
}

TEST_CASE("text and binary formats round-trip exactly") {
    SplitMix64 rng(2);
    std::vector<double> v(257);
    for (auto& x : v) x = rng.normal() * 1e-3 + rng.uniform();
    const Signal s(v, 360);

    std::stringstream text;
    io::write_text(text, s);
    CHECK(text.str().rfind("fs=360\n", 0) == 0);
    CHECK(io::read_text(text) == s);

    std::stringstream bin;
    io::write_binary(bin, s);
    CHECK(bin.str().substr(0, 4) == "ECG1");
    CHECK(bin.str().size() == 8 + 8 * v.size());
    CHECK(io::read_binary(bin) == s);

    const auto dir = std::filesystem::temp_directory_path() / "ecglab_signal_io";
    std::filesystem::create_directories(dir);
    io::save(dir / "a.txt", s);
    io::save(dir / "a.bin", s);
    CHECK(io::load(dir / "a.txt") == s);
    CHECK(io::load(dir / "a.bin") == s);
}

TEST_CASE("malformed text input is rejected") {
    std::stringstream no_header("1.0\n2.0\n");
    CHECK_THROWS(io::read_text(no_header));
    std::stringstream junk("fs=10\n1.0\nabc\n");
    CHECK_THROWS(io::read_text(junk));
}

TEST_CASE("rng is reproducible and well spread") {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    CHECK(derive_seed(1, "noise") != derive_seed(1, "split"));
    CHECK(derive_seed(1, "noise") == derive_seed(1, "noise"));
    SplitMix64 r(9);
    for (int i = 0; i < 1000; ++i) {
        const auto k = r.below(7);
        CHECK(k < 7);
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("rng matches the reference splitmix64 stream") {
    SplitMix64 r(1234567);
    CHECK(r() == 6457827717110365317ULL);
    CHECK(r() == 3203168211198807973ULL);
    CHECK(r() == 9817491932198370423ULL);
}
