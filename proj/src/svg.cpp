#include "ecglab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ecglab::svg {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Roughly five round-numbered ticks covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) ticks.push_back(t);
    return ticks;
}

std::string header(const std::string& title) {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"16\">" + escape(title) + "</text>\n";
    }
    return s;
}

struct Axis {
    double lo;
    double hi;
    double px_lo;
    double px_hi;
    [[nodiscard]] double map(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

std::string y_axis(const Axis& y, const std::string& label) {
    std::string s = "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
                    num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(y.lo, y.hi)) {
        const double py = y.map(t);
        s += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(py) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + tick_label(t) + "</text>\n";
    }
    s += "<text x=\"16\" y=\"" + num((kTop + kHeight - kBottom) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         num((kTop + kHeight - kBottom) / 2) + ")\">" + escape(label) + "</text>\n";
    return s;
}

}  // namespace

std::string bar_chart(const std::string& title, const std::string& y_label, std::span<const std::string> labels,
                      std::span<const double> values, std::span<const std::size_t> highlight) {
    if (labels.size() != values.size()) throw std::invalid_argument("bar_chart: labels and values differ in count");
    if (values.empty()) throw std::invalid_argument("bar_chart: no values");
    double top = 0.0;
    double bottom = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("bar_chart: non-finite value");
        top = std::max(top, v);
        bottom = std::min(bottom, v);
    }
    if (top == bottom) top = 1.0;
    const double pad = 0.05 * (top - bottom);
    const Axis y{bottom < 0.0 ? bottom - pad : 0.0, top + pad, kHeight - kBottom, kTop};

    std::string s = header(title) + y_axis(y, y_label);
    const double plot_w = kWidth - kLeft - kRight;
    const double slot = plot_w / static_cast<double>(values.size());
    const double bar_w = slot * 0.8;
    const double zero = y.map(0.0);
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(zero) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" +
         num(zero) + "\" stroke=\"black\"/>\n";
    const std::size_t label_every = std::max<std::size_t>(1, values.size() / 26 + 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = kLeft + slot * static_cast<double>(i) + (slot - bar_w) / 2;
        const double py = y.map(values[i]);
        const bool hot = std::ranges::find(highlight, i) != highlight.end();
        s += "<rect class=\"bar\" x=\"" + num(x) + "\" y=\"" + num(std::min(py, zero)) + "\" width=\"" + num(bar_w) +
             "\" height=\"" + num(std::abs(zero - py)) + "\" fill=\"" + (hot ? "#2ca02c" : "#1f77b4") + "\"><title>" +
             escape(labels[i]) + ": " + tick_label(values[i]) + "</title></rect>\n";
        if (i % label_every == 0) {
            s += "<text x=\"" + num(x + bar_w / 2) + "\" y=\"" + num(kHeight - kBottom + 14) +
                 "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + escape(labels[i]) +
                 "</text>\n";
        }
    }
    s += "</svg>\n";
    return s;
}

std::string plot_signals(std::span<const Signal> signals, std::span<const std::string> labels,
                         const std::string& title) {
    if (signals.empty() || signals.size() > 3) throw std::invalid_argument("plot_signals: expects one to three signals");
    if (labels.size() != signals.size()) throw std::invalid_argument("plot_signals: one label per signal");
    const std::size_t n = signals.front().size();
    const int fs = signals.front().fs();
    double lo = signals.front()[0];
    double hi = lo;
    for (const auto& sig : signals) {
        if (sig.size() != n || sig.fs() != fs) {
            throw std::invalid_argument("plot_signals: signals differ in length or sample rate");
        }
        const auto [mn, mx] = std::ranges::minmax(sig.vec());
        lo = std::min(lo, mn);
        hi = std::max(hi, mx);
    }
    if (hi == lo) {
        hi += 1.0;
        lo -= 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    const Axis y{lo - pad, hi + pad, kHeight - kBottom, kTop};
    const double t_end = n > 1 ? static_cast<double>(n - 1) / fs : 1.0 / fs;
    const Axis x{0.0, t_end, kLeft, kWidth - kRight};

    std::string s = header(title) + y_axis(y, "amplitude [mV]");
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" + num(kWidth - kRight) +
         "\" y2=\"" + num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(0.0, t_end)) {
        const double px = x.map(t);
        s += "<line x1=\"" + num(px) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" + num(px) + "\" y2=\"" +
             num(kHeight - kBottom + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(px) + "\" y=\"" + num(kHeight - kBottom + 18) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + tick_label(t) + "</text>\n";
    }
    s += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" + num(kHeight - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">time [s]</text>\n";
    for (std::size_t k = 0; k < signals.size(); ++k) {
        s += "<polyline fill=\"none\" stroke=\"" + std::string(kColours[k]) + "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            if (i) s += ' ';
            s += num(x.map(static_cast<double>(i) / fs)) + "," + num(y.map(signals[k][i]));
        }
        s += "\"/>\n";
        const double ly = kTop + 14.0 * static_cast<double>(k);
        s += "<line x1=\"" + num(kWidth - 150) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(kWidth - 130) + "\" y2=\"" +
             num(ly) + "\" stroke=\"" + kColours[k] + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + num(kWidth - 125) + "\" y=\"" + num(ly + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(labels[k]) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace ecglab::svg
