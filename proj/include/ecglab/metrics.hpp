#pragma once

#include <limits>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "ecglab/signal.hpp"

namespace ecglab::metrics {

/// Returned by snr_db when prediction and reference match exactly.
/// Excluded from averages.
inline constexpr double kExactMatchSnr = std::numeric_limits<double>::infinity();

/// Joint quality bar: 5% of a 6 mV clean range, and the SNR above which a
/// denoised trace is still considered informative.
inline constexpr double kRmsLimitMv = 0.3;
inline constexpr double kSnrThresholdDb = 8.0;

/// sqrt(mean((pred - clean)^2)) over the N common samples.
double rms(const Signal& clean, const Signal& pred);

/// 10 log10(sum clean^2 / sum (pred - clean)^2), or kExactMatchSnr.
double snr_db(const Signal& clean, const Signal& pred);

struct SignalScore {
    double rms_mv;
    double snr_db;
};

struct EvalReport {
    std::vector<SignalScore> per_signal;
    double avg_rms_mv = 0.0;
    double avg_snr_db = 0.0;  ///< over finite entries; kExactMatchSnr if there are none
    double rms_limit_mv = kRmsLimitMv;
    double snr_threshold_db = kSnrThresholdDb;
    double pass_fraction = 0.0;  ///< share with rms <= limit and snr >= threshold
};

using SignalPair = std::pair<const Signal*, const Signal*>;

/// Per-pair scores and dataset means. Throws on an empty list.
EvalReport evaluate_dataset(std::span<const std::pair<Signal, Signal>> pairs);
EvalReport evaluate_dataset(std::span<const SignalPair> pairs);

/// Rebuilds the summary fields from `per_signal`.
EvalReport summarize(std::vector<SignalScore> scores);

/// CSV with header `index,rms_mv,snr_db,pass`, one row per signal, and a final
/// `mean` row carrying the averages and the pass fraction.
void write_csv(std::ostream& os, const EvalReport& report);

}  // namespace ecglab::metrics
