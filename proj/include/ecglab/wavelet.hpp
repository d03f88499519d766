#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ecglab/signal.hpp"

namespace ecglab::wavelet {

enum class Family { haar, db4, sym4 };

/// How samples beyond either edge are supplied to the analysis filters.
enum class Extension {
    symmetric,     ///< half-sample mirror (x[-1] = x[0]); coefficient count grows by ~F/2 per level
    periodization  ///< circular; length must be divisible by 2^levels; orthonormal so energy is preserved
};

Family parse_family(std::string_view name);
std::string_view to_string(Family f) noexcept;

/// Orthogonal two-channel filter bank. Synthesis filters are the time reverses
/// of the analysis filters; the highpass is the alternating-flip of the lowpass.
struct WaveletSpec {
    Family family;
    std::vector<double> dec_lo;
    std::vector<double> dec_hi;
    std::vector<double> rec_lo;
    std::vector<double> rec_hi;

    static WaveletSpec make(Family f);
    [[nodiscard]] std::size_t filter_length() const noexcept { return dec_lo.size(); }
};

struct DwtCoeffs {
    Family family;
    Extension extension;
    std::vector<double> approximation;         ///< at the deepest level
    std::vector<std::vector<double>> details;  ///< coarsest first, finest last
    std::size_t original_length = 0;
    int fs = 1;
    /// Input length at each level, finest first; used to trim reconstructions.
    std::vector<std::size_t> level_lengths;
};

/// Deepest level allowed for `n` samples: floor(log2(n)).
int max_level(std::size_t n) noexcept;

/// L-level decomposition. Throws if levels < 1, the signal is shorter than the
/// filter, levels exceeds max_level, or (periodization) n is not divisible by 2^levels.
DwtCoeffs dwt(const Signal& signal, const WaveletSpec& spec, int levels, Extension ext = Extension::symmetric);

/// Exact-length inverse. Throws when `coeffs` came from a different family.
Signal idwt(const DwtCoeffs& coeffs, const WaveletSpec& spec);

/// Shrinks toward zero by `threshold`; identity at threshold 0.
double soft_threshold(double v, double threshold) noexcept;

/// Noise level from the finest detail band: median(|d|) / 0.6745.
double estimate_sigma(std::span<const double> finest_detail);

/// Universal-threshold denoising: lambda = sigma * sqrt(2 ln N), soft
/// thresholding applied to every detail level with the same lambda.
Signal wavelet_denoise(const Signal& signal, const WaveletSpec& spec, int levels);

/// min(4, max_level(n)), the default depth for short windows.
int default_levels(std::size_t n) noexcept;

}  // namespace ecglab::wavelet
