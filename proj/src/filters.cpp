#include "ecglab/filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ecglab/wavelet.hpp"

namespace ecglab::filters {

namespace {

// Solves A x = rhs by Gaussian elimination with partial pivoting (tiny systems only).
std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        }
        std::swap(a[c], a[p]);
        std::swap(rhs[c], rhs[p]);
        if (a[c][c] == 0.0) throw std::runtime_error("lfilter_zi: singular system");
        for (std::size_t r = c + 1; r < n; ++r) {
            const double k = a[r][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[r][j] -= k * a[c][j];
            rhs[r] -= k * rhs[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

// Roots of a monic quadratic or linear denominator, enough for the designs here.
std::vector<std::complex<double>> poles(const std::vector<double>& a) {
    if (a.size() == 2) return {std::complex<double>(-a[1], 0.0)};
    if (a.size() == 3) {
        const std::complex<double> disc = std::sqrt(std::complex<double>(a[1] * a[1] - 4.0 * a[2], 0.0));
        return {(-a[1] + disc) / 2.0, (-a[1] - disc) / 2.0};
    }
    throw std::logic_error("poles: only first and second order sections supported");
}

}  // namespace

Kind parse_kind(std::string_view name) {
    if (name == "lowpass") return Kind::lowpass;
    if (name == "highpass") return Kind::highpass;
    if (name == "bandstop" || name == "notch") return Kind::bandstop;
    throw std::invalid_argument("unknown filter kind '" + std::string(name) + "'");
}

std::string_view to_string(Kind k) noexcept {
    switch (k) {
        case Kind::lowpass: return "lowpass";
        case Kind::highpass: return "highpass";
        case Kind::bandstop: return "bandstop";
    }
    return "?";
}

std::complex<double> IirFilter::response(double hz) const {
    const double w = 2.0 * std::numbers::pi * hz / design.fs;
    std::complex<double> num{};
    std::complex<double> den{};
    for (std::size_t k = 0; k < b.size(); ++k) num += b[k] * std::polar(1.0, -w * static_cast<double>(k));
    for (std::size_t k = 0; k < a.size(); ++k) den += a[k] * std::polar(1.0, -w * static_cast<double>(k));
    return num / den;
}

double IirFilter::max_pole_radius() const {
    double r = 0.0;
    for (const auto& p : poles(a)) r = std::max(r, std::abs(p));
    return r;
}

IirFilter design_butterworth(Kind kind, std::vector<double> cutoffs_hz, int order, double fs) {
    if (order != 1) throw std::invalid_argument("design_butterworth: only first-order prototypes are supported");
    if (!(fs > 0.0)) throw std::invalid_argument("design_butterworth: fs must be positive");
    const std::size_t want = kind == Kind::bandstop ? 2 : 1;
    if (cutoffs_hz.size() != want) {
        throw std::invalid_argument("design_butterworth: " + std::string(to_string(kind)) + " needs " +
                                    std::to_string(want) + " cutoff(s)");
    }
    for (double c : cutoffs_hz) {
        if (!(c > 0.0 && c < fs / 2.0)) {
            throw std::invalid_argument("design_butterworth: cutoff " + std::to_string(c) +
                                        " Hz must lie strictly inside (0, " + std::to_string(fs / 2.0) + ") Hz");
        }
    }
    if (kind == Kind::bandstop && !(cutoffs_hz[0] < cutoffs_hz[1])) {
        throw std::invalid_argument("design_butterworth: bandstop edges must satisfy lower < upper");
    }

    IirFilter f{{}, {}, {kind, cutoffs_hz, order, fs}};
    // Bilinear transform with s = c (1 - z^-1)/(1 + z^-1), c = 2 fs; pre-warped edges.
    const auto warp = [fs](double hz) { return std::tan(std::numbers::pi * hz / fs); };
    switch (kind) {
        case Kind::lowpass: {
            const double k = warp(cutoffs_hz[0]);
            f.b = {k / (1.0 + k), k / (1.0 + k)};
            f.a = {1.0, (k - 1.0) / (k + 1.0)};
            break;
        }
        case Kind::highpass: {
            const double k = warp(cutoffs_hz[0]);
            f.b = {1.0 / (1.0 + k), -1.0 / (1.0 + k)};
            f.a = {1.0, (k - 1.0) / (k + 1.0)};
            break;
        }
        case Kind::bandstop: {
            // Prototype 1/(s+1) with s -> B s / (s^2 + W0^2), in units where c = 1.
            const double w1 = warp(cutoffs_hz[0]);
            const double w2 = warp(cutoffs_hz[1]);
            const double w0sq = w1 * w2;
            const double bw = w2 - w1;
            const double d0 = 1.0 + bw + w0sq;
            f.b = {(1.0 + w0sq) / d0, 2.0 * (w0sq - 1.0) / d0, (1.0 + w0sq) / d0};
            f.a = {1.0, 2.0 * (w0sq - 1.0) / d0, (1.0 - bw + w0sq) / d0};
            break;
        }
    }
    return f;
}

std::vector<double> lfilter_zi(const IirFilter& f) {
    const std::size_t n = std::max(f.a.size(), f.b.size());
    std::vector<double> a(f.a);
    std::vector<double> b(f.b);
    a.resize(n, 0.0);
    b.resize(n, 0.0);
    const std::size_t m = n - 1;
    if (m == 0) return {};
    // (I - companion(a)^T) zi = b[1:] - a[1:] b[0]
    std::vector<std::vector<double>> mat(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        mat[i][i] = 1.0;
        mat[i][0] += a[i + 1];
        if (i + 1 < m) mat[i][i + 1] -= 1.0;
    }
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = b[i + 1] - a[i + 1] * b[0];
    return solve(std::move(mat), std::move(rhs));
}

std::vector<double> lfilter(const IirFilter& f, std::span<const double> x, std::vector<double> state) {
    const std::size_t n = std::max(f.a.size(), f.b.size());
    std::vector<double> a(f.a);
    std::vector<double> b(f.b);
    a.resize(n, 0.0);
    b.resize(n, 0.0);
    state.resize(n - 1, 0.0);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double out = b[0] * x[i] + (n > 1 ? state[0] : 0.0);
        for (std::size_t k = 1; k < n; ++k) {
            const double next = k < n - 1 ? state[k] : 0.0;
            state[k - 1] = b[k] * x[i] - a[k] * out + next;
        }
        y[i] = out;
    }
    return y;
}

Signal filtfilt(const IirFilter& f, const Signal& signal) {
    const std::size_t pad = 3 * (std::max(f.a.size(), f.b.size()) - 1);
    const std::size_t n = signal.size();
    if (n <= pad) {
        throw std::invalid_argument("filtfilt: signal of " + std::to_string(n) + " samples must be longer than the " +
                                    std::to_string(pad) + "-sample edge padding");
    }
    const auto& x = signal.vec();
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    const auto zi = lfilter_zi(f);
    auto scaled_zi = [&zi](double v) {
        std::vector<double> s(zi);
        for (auto& z : s) z *= v;
        return s;
    };
    auto y = lfilter(f, ext, scaled_zi(ext.front()));
    std::ranges::reverse(y);
    y = lfilter(f, y, scaled_zi(y.front()));
    std::ranges::reverse(y);
    return {std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(pad),
                                y.begin() + static_cast<std::ptrdiff_t>(pad + n)),
            signal.fs()};
}

int baseline_levels(int fs) noexcept {
    return static_cast<int>(std::floor(std::log2(static_cast<double>(fs) / 0.67)));
}

Signal remove_baseline_wavelet(const Signal& signal) {
    const int levels = std::max(1, baseline_levels(signal.fs()));
    if (signal.size() < (std::size_t{1} << levels)) {
        throw std::invalid_argument("remove_baseline_wavelet: " + std::to_string(levels) + " levels at " +
                                    std::to_string(signal.fs()) + " Hz need at least " +
                                    std::to_string(std::size_t{1} << levels) + " samples, got " +
                                    std::to_string(signal.size()));
    }
    const auto spec = wavelet::WaveletSpec::make(wavelet::Family::sym4);
    auto c = wavelet::dwt(signal, spec, levels);
    std::ranges::fill(c.approximation, 0.0);
    return wavelet::idwt(c, spec);
}

Signal algorithm1(const Signal& signal) {
    const double fs = signal.fs();
    if (!(fs > 120.0)) throw std::invalid_argument("algorithm1: fs must exceed 120 Hz so the notch fits below Nyquist");
    const auto lowpass = design_butterworth(Kind::lowpass, {30.0}, 1, fs);
    const auto highpass = design_butterworth(Kind::highpass, {0.1}, 1, fs);
    const auto notch = design_butterworth(Kind::bandstop, {47.5, 52.5}, 1, fs);
    auto y = filtfilt(lowpass, signal);
    y = filtfilt(highpass, y);
    y = filtfilt(notch, y);
    return remove_baseline_wavelet(y);
}

std::string describe(const IirFilter& f) {
    std::string out = "kind=" + std::string(to_string(f.design.kind)) + "\n";
    char buf[40];
    for (const auto* name : {"b", "a"}) {
        const auto& v = name[0] == 'b' ? f.b : f.a;
        out += name;
        out += "=";
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", v[i]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace ecglab::filters
