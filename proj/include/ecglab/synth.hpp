#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "ecglab/signal.hpp"

namespace ecglab::synth {

/// One Gaussian event of the PQRST cycle on the limit circle.
struct Spike {
    char label;        ///< 'P', 'Q', 'R', 'S' or 'T'
    double theta;      ///< angular position, radians in (-pi, pi]
    double amplitude;  ///< event amplitude coefficient
    double width;      ///< angular width, radians (> 0)
};

/// Three-dimensional limit-cycle ECG model: the trajectory circles the unit
/// circle in (x, y) at angular speed 2*pi*heart_rate/60 while z is pushed by a
/// Gaussian-weighted angular offset for each of the five events and relaxes
/// to the baseline z0.
struct EcgModelParams {
    std::array<Spike, 5> spikes{{
        {'P', -std::numbers::pi / 3.0, 1.2, 0.25},
        {'Q', -std::numbers::pi / 12.0, -5.0, 0.1},
        {'R', 0.0, 30.0, 0.1},
        {'S', std::numbers::pi / 12.0, -7.5, 0.1},
        {'T', std::numbers::pi / 2.0, 0.75, 0.4},
    }};
    double z0 = 0.0;
    double heart_rate_bpm = 60.0;
    double voltage_scale = 1.0;  ///< peak-to-peak amplitude of the generated signal, mV

    [[nodiscard]] double omega() const noexcept { return 2.0 * std::numbers::pi * heart_rate_bpm / 60.0; }

    /// Throws std::invalid_argument if the angles are not strictly increasing
    /// within (-pi, pi], a width is non-positive, or the heart rate is not positive.
    void validate() const;
};

struct TrajectoryState {
    double x = -1.0;
    double y = 0.0;
    double z = 0.0;
    double t = 0.0;
};

/// (theta - theta_i) wrapped into (-pi, pi].
double wrap_angle(double a) noexcept;

/// One classical fourth-order Runge-Kutta step of size dt.
TrajectoryState rk4_step(const TrajectoryState& s, const EcgModelParams& p, double dt);

/// Integrates from (x, y) = (-1, 0), z = z0 with one step per output sample
/// (dt = 1/fs) and returns the z trace rescaled about z0 so that its
/// peak-to-peak amplitude equals `voltage_scale`.
Signal generate_ecg(const EcgModelParams& p, double duration_s, int fs);

/// Multi-beat signals at each rate in `rates_bpm`, made by time-compressing and
/// tiling a single rest cycle with linear interpolation. Throws when the
/// compression would push the rest beat's spectral content past Nyquist.
std::vector<Signal> generate_effort_family(const Signal& rest_beat, std::span<const double> rates_bpm,
                                           int fs, double duration_s);

/// Heart rate implied by a single-cycle rest beat: 60 * fs / length.
double rest_rate_bpm(const Signal& rest_beat) noexcept;

/// Local maxima above `threshold_fraction` of the global maximum, at least
/// `refractory_s` apart. Used to count beats.
std::vector<std::size_t> detect_r_peaks(const Signal& s, double threshold_fraction = 0.5, double refractory_s = 0.2);

}  // namespace ecglab::synth
