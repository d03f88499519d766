#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ecglab {

/// Uniformly sampled waveform. Amplitudes in millivolts, rate in Hz.
///
/// Immutable once built: the sample buffer and rate are only reachable through
/// const accessors, so a Signal can be shared freely between threads.
class Signal {
public:
    /// Throws std::invalid_argument when `samples` is empty or `fs` is not positive.
    Signal(std::vector<double> samples, int fs);

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] const std::vector<double>& vec() const noexcept { return samples_; }
    [[nodiscard]] int fs() const noexcept { return fs_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return samples_[i]; }
    [[nodiscard]] double duration_seconds() const noexcept {
        return static_cast<double>(samples_.size()) / fs_;
    }

    friend bool operator==(const Signal&, const Signal&) = default;

private:
    std::vector<double> samples_;
    int fs_;
};

/// Sample range inside a parent signal.
struct Window {
    std::size_t start_index = 0;
    std::size_t length = 0;
};

/// Copies `w` out of `signal`. Throws if the window runs past the end.
Signal slice(const Signal& signal, Window w);

/// Non-overlapping windows of `window_seconds`; the trailing remainder is dropped.
/// `window_seconds * fs` must be a positive integer.
std::vector<Signal> segment(const Signal& signal, double window_seconds);

/// Joins signals that share a sampling rate.
Signal concatenate(std::span<const Signal> parts);

/// Sum of squared samples (not the mean).
double power(std::span<const double> samples) noexcept;
inline double power(const Signal& s) noexcept { return power(s.samples()); }

/// Scalar multiple, sample by sample.
Signal scaled(const Signal& s, double factor);

/// Affine map recorded by minmax_scale; `apply` and `invert` are exact inverses
/// up to floating-point rounding.
struct ScaleRecord {
    double src_min = 0.0;
    double src_max = 1.0;
    double lo = 0.0;
    double hi = 1.0;

    [[nodiscard]] double apply(double v) const noexcept {
        return lo + (v - src_min) * (hi - lo) / (src_max - src_min);
    }
    [[nodiscard]] double invert(double v) const noexcept {
        return src_min + (v - lo) * (src_max - src_min) / (hi - lo);
    }
    [[nodiscard]] Signal apply(const Signal& s) const;
    [[nodiscard]] Signal invert(const Signal& s) const;
};

struct ScaledSignal {
    Signal signal;
    ScaleRecord record;
};

/// Maps min(samples) to `lo` and max(samples) to `hi`.
/// Throws on a constant signal or when lo >= hi.
ScaledSignal minmax_scale(const Signal& signal, double lo = 0.0, double hi = 1.0);

}  // namespace ecglab
