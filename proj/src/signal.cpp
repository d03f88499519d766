#include "ecglab/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ecglab {

Signal::Signal(std::vector<double> samples, int fs) : samples_(std::move(samples)), fs_(fs) {
    if (samples_.empty()) throw std::invalid_argument("Signal: sample list is empty");
    if (fs_ <= 0) throw std::invalid_argument("Signal: sampling rate must be positive, got " + std::to_string(fs_));
}

Signal slice(const Signal& signal, Window w) {
    if (w.length == 0 || w.start_index + w.length > signal.size()) {
        throw std::out_of_range("slice: window [" + std::to_string(w.start_index) + ", +" +
                                std::to_string(w.length) + ") exceeds signal of " +
                                std::to_string(signal.size()) + " samples");
    }
    auto first = signal.vec().begin() + static_cast<std::ptrdiff_t>(w.start_index);
    return Signal({first, first + static_cast<std::ptrdiff_t>(w.length)}, signal.fs());
}

std::vector<Signal> segment(const Signal& signal, double window_seconds) {
    const double exact = window_seconds * signal.fs();
    const double rounded = std::round(exact);
    if (!(window_seconds > 0.0) || rounded < 1.0 || std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact)) {
        throw std::invalid_argument("segment: window of " + std::to_string(window_seconds) + " s at " +
                                    std::to_string(signal.fs()) +
                                    " Hz is not a positive whole number of samples");
    }
    const auto len = static_cast<std::size_t>(rounded);
    const std::size_t count = signal.size() / len;
    std::vector<Signal> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(slice(signal, {i * len, len}));
    return out;
}

Signal concatenate(std::span<const Signal> parts) {
    if (parts.empty()) throw std::invalid_argument("concatenate: nothing to join");
    std::vector<double> joined;
    const int fs = parts.front().fs();
    for (const auto& p : parts) {
        if (p.fs() != fs) throw std::invalid_argument("concatenate: sampling rates differ");
        joined.insert(joined.end(), p.vec().begin(), p.vec().end());
    }
    return {std::move(joined), fs};
}

double power(std::span<const double> samples) noexcept {
    return std::transform_reduce(samples.begin(), samples.end(), 0.0, std::plus<>{},
                                 [](double v) { return v * v; });
}

Signal scaled(const Signal& s, double factor) {
    std::vector<double> out(s.vec());
    for (auto& v : out) v *= factor;
    return {std::move(out), s.fs()};
}

Signal ScaleRecord::apply(const Signal& s) const {
    std::vector<double> out(s.size());
    std::ranges::transform(s.vec(), out.begin(), [this](double v) { return apply(v); });
    return {std::move(out), s.fs()};
}

Signal ScaleRecord::invert(const Signal& s) const {
    std::vector<double> out(s.size());
    std::ranges::transform(s.vec(), out.begin(), [this](double v) { return invert(v); });
    return {std::move(out), s.fs()};
}

ScaledSignal minmax_scale(const Signal& signal, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("minmax_scale: lo must be below hi");
    const auto [mn, mx] = std::ranges::minmax(signal.vec());
    if (!(mx > mn)) throw std::invalid_argument("minmax_scale: constant signal has zero dynamic range");
    ScaleRecord rec{mn, mx, lo, hi};
    std::vector<double> out(signal.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        // Endpoints are pinned so the extremes land on lo/hi without rounding drift.
        const double v = signal[i];
        out[i] = v == mn ? lo : v == mx ? hi : rec.apply(v);
    }
    return {Signal(std::move(out), signal.fs()), rec};
}

}  // namespace ecglab
