#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include "ecglab/signal.hpp"

namespace ecglab::filters {

enum class Kind { lowpass, highpass, bandstop };

Kind parse_kind(std::string_view name);
std::string_view to_string(Kind k) noexcept;

struct Design {
    Kind kind;
    std::vector<double> cutoffs_hz;  ///< one edge, or {lower, upper} for bandstop
    int order = 1;
    double fs = 0.0;
};

/// Direct-form IIR filter with a[0] == 1.
struct IirFilter {
    std::vector<double> b;
    std::vector<double> a;
    Design design;

    /// H(e^{jw}) at frequency `hz`.
    [[nodiscard]] std::complex<double> response(double hz) const;
    /// Largest pole magnitude.
    [[nodiscard]] double max_pole_radius() const;
};

/// First-order Butterworth via the bilinear transform with pre-warped edges.
/// The bandstop is the lowpass-to-bandstop transform of the first-order
/// prototype, which yields one second-order digital section.
/// Throws if a cutoff is not strictly inside (0, fs/2), the edges are out of
/// order, or `order` is not 1.
IirFilter design_butterworth(Kind kind, std::vector<double> cutoffs_hz, int order, double fs);

/// Single pass with explicit initial state (transposed direct form II).
std::vector<double> lfilter(const IirFilter& f, std::span<const double> x, std::vector<double> state);

/// Steady-state initial state for a unit step input.
std::vector<double> lfilter_zi(const IirFilter& f);

/// Zero-phase forward-backward filtering. The input is extended at both ends by
/// odd reflection of length 3*(max(len(a), len(b)) - 1) and each pass starts
/// from the step steady state scaled by its first sample.
/// Throws when the signal is not longer than the padding.
Signal filtfilt(const IirFilter& f, const Signal& signal);

/// Wavelet depth whose approximation band sits below ~0.67 Hz:
/// floor(log2(fs / 0.67)).
int baseline_levels(int fs) noexcept;

/// Drops the approximation band of a sym4 decomposition at baseline_levels(fs).
/// Needs at least 2^L samples.
Signal remove_baseline_wavelet(const Signal& signal);

/// Four-step cleanup chain: 30 Hz lowpass, 0.1 Hz highpass, 47.5-52.5 Hz
/// bandstop (all first-order, zero-phase), then wavelet baseline removal.
/// Requires fs > 120 Hz.
Signal algorithm1(const Signal& signal);

/// Plain-text dump of the coefficients, one `b=`/`a=` line each.
std::string describe(const IirFilter& f);

}  // namespace ecglab::filters
