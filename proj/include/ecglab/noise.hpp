#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ecglab/signal.hpp"

namespace ecglab::noise {

enum class Kind { random, drift, random_plus_drift, recorded };

Kind parse_kind(std::string_view name);
std::string_view to_string(Kind k) noexcept;

/// Recipe for corrupting a clean signal at an exact SNR.
struct NoiseSpec {
    Kind kind = Kind::random;
    double target_snr_db = 0.0;
    std::uint64_t seed = 0;
    std::optional<Signal> noise_source;  ///< required for Kind::recorded; tiled when shorter than the target
};

/// Returns clean + g*noise with g chosen so that
/// 10*log10(power(clean) / power(g*noise)) == target_snr_db.
/// Throws when either input has zero power, lengths differ, or the target is not finite.
Signal scale_noise_to_snr(const Signal& clean, const Signal& noise, double target_snr_db);

/// The gain `scale_noise_to_snr` would apply.
double snr_gain(double clean_power, double noise_power, double target_snr_db);

/// Zero-mean, unit-variance white Gaussian noise.
Signal random_noise(std::size_t length, int fs, std::uint64_t seed);

/// Baseline drift: one to three sinusoids between 0.05 and 0.5 Hz with random
/// phases and weights, normalized to unit RMS.
Signal drift_noise(std::size_t length, int fs, std::uint64_t seed);

/// Unit-variance white noise plus drift at twice its RMS.
Signal random_plus_drift_noise(std::size_t length, int fs, std::uint64_t seed);

/// `length` samples of `record` starting at `offset`, wrapping around.
Signal tiled_segment(const Signal& record, std::size_t offset, std::size_t length);

/// Unscaled noise of the requested kind, `length` samples long.
Signal make_noise(const NoiseSpec& spec, std::size_t length, int fs);

/// make_noise followed by scale_noise_to_snr.
Signal add_noise(const Signal& clean, const NoiseSpec& spec);

/// One calibrated noisy copy of `clean_record` per SNR level, in the given
/// order. Noise is a segment of `noise_record` (tiled when shorter) whose start
/// offset is drawn from `seed` per level.
std::vector<std::pair<double, Signal>> noise_stress_mix(const Signal& clean_record, const Signal& noise_record,
                                                        std::span<const double> snr_levels_db, std::uint64_t seed);

/// The fourteen levels of the multi-record scenario, in dB.
inline constexpr double kStressLevels[] = {36, 24, 20, 18, 14, 12, 8, 6, 3, 0, -1, -3, -6, -8};

}  // namespace ecglab::noise
