#include "ecglab/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ecglab/rng.hpp"

namespace ecglab::noise {

Kind parse_kind(std::string_view name) {
    if (name == "random") return Kind::random;
    if (name == "drift") return Kind::drift;
    if (name == "random_plus_drift" || name == "random+drift") return Kind::random_plus_drift;
    if (name == "recorded") return Kind::recorded;
    throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

std::string_view to_string(Kind k) noexcept {
    switch (k) {
        case Kind::random: return "random";
        case Kind::drift: return "drift";
        case Kind::random_plus_drift: return "random_plus_drift";
        case Kind::recorded: return "recorded";
    }
    return "?";
}

double snr_gain(double clean_power, double noise_power, double target_snr_db) {
    if (!std::isfinite(target_snr_db)) throw std::invalid_argument("target SNR must be finite");
    if (!(clean_power > 0.0)) throw std::invalid_argument("clean signal has zero power");
    if (!(noise_power > 0.0)) throw std::invalid_argument("noise has zero power");
    return std::sqrt(clean_power / (noise_power * std::pow(10.0, target_snr_db / 10.0)));
}

Signal scale_noise_to_snr(const Signal& clean, const Signal& noise, double target_snr_db) {
    if (clean.size() != noise.size()) {
        throw std::invalid_argument("scale_noise_to_snr: clean has " + std::to_string(clean.size()) +
                                    " samples, noise has " + std::to_string(noise.size()));
    }
    const double g = snr_gain(power(clean), power(noise), target_snr_db);
    std::vector<double> out(clean.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = clean[i] + g * noise[i];
    return {std::move(out), clean.fs()};
}

Signal random_noise(std::size_t length, int fs, std::uint64_t seed) {
    if (length == 0) throw std::invalid_argument("random_noise: length must be positive");
    SplitMix64 rng(seed);
    std::vector<double> v(length);
    for (auto& x : v) x = rng.normal();
    return {std::move(v), fs};
}

Signal drift_noise(std::size_t length, int fs, std::uint64_t seed) {
    if (length == 0) throw std::invalid_argument("drift_noise: length must be positive");
    SplitMix64 rng(seed);
    const auto count = 1 + rng.below(3);
    std::vector<double> v(length, 0.0);
    for (std::uint64_t c = 0; c < count; ++c) {
        const double freq = rng.uniform(0.05, 0.5);
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double weight = rng.uniform(0.5, 1.0);
        for (std::size_t i = 0; i < length; ++i) {
            v[i] += weight * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs + phase);
        }
    }
    const double rms = std::sqrt(power(v) / static_cast<double>(length));
    // A sub-sample window can catch every sinusoid near a zero crossing.
    if (rms > 0.0) {
        for (auto& x : v) x /= rms;
    }
    return {std::move(v), fs};
}

Signal random_plus_drift_noise(std::size_t length, int fs, std::uint64_t seed) {
    const auto white = random_noise(length, fs, derive_seed(seed, "white"));
    const auto drift = drift_noise(length, fs, derive_seed(seed, "drift"));
    std::vector<double> v(length);
    for (std::size_t i = 0; i < length; ++i) v[i] = white[i] + 2.0 * drift[i];
    return {std::move(v), fs};
}

Signal tiled_segment(const Signal& record, std::size_t offset, std::size_t length) {
    if (length == 0) throw std::invalid_argument("tiled_segment: length must be positive");
    std::vector<double> v(length);
    const std::size_t n = record.size();
    for (std::size_t i = 0; i < length; ++i) v[i] = record[(offset + i) % n];
    return {std::move(v), record.fs()};
}

Signal make_noise(const NoiseSpec& spec, std::size_t length, int fs) {
    switch (spec.kind) {
        case Kind::random: return random_noise(length, fs, spec.seed);
        case Kind::drift: return drift_noise(length, fs, spec.seed);
        case Kind::random_plus_drift: return random_plus_drift_noise(length, fs, spec.seed);
        case Kind::recorded: {
            if (!spec.noise_source) throw std::invalid_argument("recorded noise needs a noise source");
            SplitMix64 rng(spec.seed);
            return tiled_segment(*spec.noise_source, rng.below(spec.noise_source->size()), length);
        }
    }
    throw std::logic_error("make_noise: unhandled kind");
}

Signal add_noise(const Signal& clean, const NoiseSpec& spec) {
    return scale_noise_to_snr(clean, make_noise(spec, clean.size(), clean.fs()), spec.target_snr_db);
}

std::vector<std::pair<double, Signal>> noise_stress_mix(const Signal& clean_record, const Signal& noise_record,
                                                        std::span<const double> snr_levels_db, std::uint64_t seed) {
    for (double level : snr_levels_db) {
        if (!std::isfinite(level)) throw std::invalid_argument("noise_stress_mix: SNR levels must be finite");
    }
    std::vector<std::pair<double, Signal>> out;
    out.reserve(snr_levels_db.size());
    for (std::size_t i = 0; i < snr_levels_db.size(); ++i) {
        SplitMix64 rng(derive_seed(seed, i));
        const auto noise = tiled_segment(noise_record, rng.below(noise_record.size()), clean_record.size());
        out.emplace_back(snr_levels_db[i], scale_noise_to_snr(clean_record, noise, snr_levels_db[i]));
    }
    return out;
}

}  // namespace ecglab::noise
