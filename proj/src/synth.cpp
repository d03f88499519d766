#include "ecglab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace ecglab::synth {

namespace {

constexpr double kPi = std::numbers::pi;

struct Derivative {
    double dx, dy, dz;
};

Derivative field(double x, double y, double z, const EcgModelParams& p) {
    const double alpha = 1.0 - std::sqrt(x * x + y * y);
    const double w = p.omega();
    const double theta = std::atan2(y, x);
    double dz = -(z - p.z0);
    for (const auto& s : p.spikes) {
        const double d = wrap_angle(theta - s.theta);
        dz -= s.amplitude * d * std::exp(-d * d / (2.0 * s.width * s.width));
    }
    return {alpha * x - w * y, alpha * y + w * x, dz};
}

std::size_t whole_samples(double duration_s, int fs, const char* who) {
    const double exact = duration_s * fs;
    const double n = std::round(exact);
    if (!(duration_s > 0.0) || n < 1.0 || std::abs(exact - n) > 1e-9 * std::max(1.0, exact)) {
        throw std::invalid_argument(std::string(who) + ": duration x fs must be a positive integer");
    }
    return static_cast<std::size_t>(n);
}

// Frequency below which 99% of the (mean-removed) spectral energy lies.
double occupied_bandwidth(const Signal& beat) {
    const std::size_t n = beat.size();
    double mean = 0.0;
    for (double v : beat.samples()) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> energy(n / 2 + 1, 0.0);
    for (std::size_t k = 0; k < energy.size(); ++k) {
        std::complex<double> acc{};
        for (std::size_t i = 0; i < n; ++i) {
            const double a = -2.0 * kPi * static_cast<double>((k * i) % n) / static_cast<double>(n);
            acc += (beat[i] - mean) * std::complex<double>(std::cos(a), std::sin(a));
        }
        energy[k] = std::norm(acc);
    }
    double total = 0.0;
    for (double e : energy) total += e;
    if (total <= 0.0) return 0.0;
    double running = 0.0;
    for (std::size_t k = 0; k < energy.size(); ++k) {
        running += energy[k];
        if (running >= 0.99 * total) return static_cast<double>(k) * beat.fs() / static_cast<double>(n);
    }
    return beat.fs() / 2.0;
}

}  // namespace

void EcgModelParams::validate() const {
    for (std::size_t i = 0; i < spikes.size(); ++i) {
        const auto& s = spikes[i];
        if (!(s.theta > -kPi && s.theta <= kPi)) {
            throw std::invalid_argument(std::string("EcgModelParams: angle of ") + s.label + " outside (-pi, pi]");
        }
        if (i > 0 && !(s.theta > spikes[i - 1].theta)) {
            throw std::invalid_argument("EcgModelParams: angles must increase P<Q<R<S<T");
        }
        if (!(s.width > 0.0)) throw std::invalid_argument(std::string("EcgModelParams: width of ") + s.label + " must be > 0");
    }
    if (!(heart_rate_bpm > 0.0)) throw std::invalid_argument("EcgModelParams: heart rate must be > 0");
}

double wrap_angle(double a) noexcept {
    double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

TrajectoryState rk4_step(const TrajectoryState& s, const EcgModelParams& p, double dt) {
    const auto k1 = field(s.x, s.y, s.z, p);
    const auto k2 = field(s.x + 0.5 * dt * k1.dx, s.y + 0.5 * dt * k1.dy, s.z + 0.5 * dt * k1.dz, p);
    const auto k3 = field(s.x + 0.5 * dt * k2.dx, s.y + 0.5 * dt * k2.dy, s.z + 0.5 * dt * k2.dz, p);
    const auto k4 = field(s.x + dt * k3.dx, s.y + dt * k3.dy, s.z + dt * k3.dz, p);
    return {
        s.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
        s.y + dt / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
        s.z + dt / 6.0 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz),
        s.t + dt,
    };
}

Signal generate_ecg(const EcgModelParams& p, double duration_s, int fs) {
    p.validate();
    if (fs <= 0) throw std::invalid_argument("generate_ecg: fs must be positive");
    const std::size_t n = whole_samples(duration_s, fs, "generate_ecg");
    const double dt = 1.0 / fs;
    std::vector<double> z(n);
    TrajectoryState st{-1.0, 0.0, p.z0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = st.z;
        st = rk4_step(st, p, dt);
    }
    const auto [mn, mx] = std::ranges::minmax(z);
    if (mx > mn) {
        const double k = p.voltage_scale / (mx - mn);
        for (auto& v : z) v = p.z0 + (v - p.z0) * k;
    }
    return {std::move(z), fs};
}

double rest_rate_bpm(const Signal& rest_beat) noexcept {
    return 60.0 * rest_beat.fs() / static_cast<double>(rest_beat.size());
}

std::vector<Signal> generate_effort_family(const Signal& rest_beat, std::span<const double> rates_bpm, int fs,
                                           double duration_s) {
    std::vector<Signal> out;
    if (rates_bpm.empty()) return out;
    if (fs <= 0) throw std::invalid_argument("generate_effort_family: fs must be positive");
    if (rest_beat.size() < 2) throw std::invalid_argument("generate_effort_family: rest beat too short");
    const std::size_t n = whole_samples(duration_s, fs, "generate_effort_family");
    const double rest_rate = rest_rate_bpm(rest_beat);
    const double bandwidth = occupied_bandwidth(rest_beat);
    const auto len = static_cast<double>(rest_beat.size());

    out.reserve(rates_bpm.size());
    for (double rate : rates_bpm) {
        if (!(rate > 0.0)) throw std::invalid_argument("generate_effort_family: rates must be positive");
        const double compression = rate / rest_rate;
        if (compression * bandwidth >= fs / 2.0) {
            throw std::invalid_argument("generate_effort_family: " + std::to_string(rate) +
                                        " bpm compresses the rest beat past Nyquist (" +
                                        std::to_string(compression * bandwidth) + " Hz >= " +
                                        std::to_string(fs / 2.0) + " Hz)");
        }
        // Rest-beat samples advanced per output sample.
        const double step = len * rate / (60.0 * fs);
        std::vector<double> samples(n);
        for (std::size_t i = 0; i < n; ++i) {
            double pos = static_cast<double>(i) * step;
            pos -= std::floor(pos / len) * len;
            const auto i0 = static_cast<std::size_t>(pos) % rest_beat.size();
            const auto i1 = (i0 + 1) % rest_beat.size();
            const double frac = pos - std::floor(pos);
            samples[i] = rest_beat[i0] + frac * (rest_beat[i1] - rest_beat[i0]);
        }
        out.emplace_back(std::move(samples), fs);
    }
    return out;
}

std::vector<std::size_t> detect_r_peaks(const Signal& s, double threshold_fraction, double refractory_s) {
    const auto& v = s.vec();
    const double top = *std::ranges::max_element(v);
    const double thr = threshold_fraction * top;
    const auto gap = static_cast<std::size_t>(std::max(1.0, refractory_s * s.fs()));
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < thr) continue;
        const bool left = i == 0 || v[i] > v[i - 1];
        const bool right = i + 1 == v.size() || v[i] >= v[i + 1];
        if (!(left && right)) continue;
        if (!peaks.empty() && i - peaks.back() < gap) {
            if (v[i] > v[peaks.back()]) peaks.back() = i;
            continue;
        }
        peaks.push_back(i);
    }
    return peaks;
}

}  // namespace ecglab::synth
