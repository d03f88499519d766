#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecglab/signal.hpp"

namespace ecglab::svg {

/// Vertical bar chart, one bar per value. `highlight` bars are drawn in a
/// second colour.
std::string bar_chart(const std::string& title, const std::string& y_label, std::span<const std::string> labels,
                      std::span<const double> values, std::span<const std::size_t> highlight = {});

/// Overlay of up to three equal-length signals with time (s) and amplitude
/// (mV) ticks. Throws on zero or more than three signals, on a length or
/// rate mismatch, or when labels and signals differ in count.
std::string plot_signals(std::span<const Signal> signals, std::span<const std::string> labels,
                         const std::string& title = "");

}  // namespace ecglab::svg
