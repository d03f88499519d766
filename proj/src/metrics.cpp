#include "ecglab/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ecglab::metrics {

namespace {

void check_pair(const Signal& clean, const Signal& pred) {
    if (clean.size() != pred.size() || clean.fs() != pred.fs()) {
        throw std::invalid_argument("metrics: clean (" + std::to_string(clean.size()) + " @ " +
                                    std::to_string(clean.fs()) + " Hz) and prediction (" +
                                    std::to_string(pred.size()) + " @ " + std::to_string(pred.fs()) +
                                    " Hz) do not align");
    }
}

double error_power(const Signal& clean, const Signal& pred) {
    double acc = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const double d = pred[i] - clean[i];
        acc += d * d;
    }
    return acc;
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

double rms(const Signal& clean, const Signal& pred) {
    check_pair(clean, pred);
    return std::sqrt(error_power(clean, pred) / static_cast<double>(clean.size()));
}

double snr_db(const Signal& clean, const Signal& pred) {
    check_pair(clean, pred);
    const double p = power(clean);
    if (!(p > 0.0)) throw std::invalid_argument("snr_db: clean signal has zero power");
    const double e = error_power(clean, pred);
    if (e == 0.0) return kExactMatchSnr;
    return 10.0 * std::log10(p / e);
}

EvalReport summarize(std::vector<SignalScore> scores) {
    if (scores.empty()) throw std::invalid_argument("evaluate_dataset: no signals to evaluate");
    EvalReport r;
    r.per_signal = std::move(scores);
    double rms_sum = 0.0;
    double snr_sum = 0.0;
    std::size_t finite = 0;
    std::size_t passed = 0;
    for (const auto& s : r.per_signal) {
        rms_sum += s.rms_mv;
        if (std::isfinite(s.snr_db)) {
            snr_sum += s.snr_db;
            ++finite;
        }
        if (s.rms_mv <= r.rms_limit_mv && s.snr_db >= r.snr_threshold_db) ++passed;
    }
    const auto n = static_cast<double>(r.per_signal.size());
    r.avg_rms_mv = rms_sum / n;
    r.avg_snr_db = finite ? snr_sum / static_cast<double>(finite) : kExactMatchSnr;
    r.pass_fraction = static_cast<double>(passed) / n;
    return r;
}

EvalReport evaluate_dataset(std::span<const SignalPair> pairs) {
    std::vector<SignalScore> scores;
    scores.reserve(pairs.size());
    for (const auto& [clean, pred] : pairs) scores.push_back({rms(*clean, *pred), snr_db(*clean, *pred)});
    return summarize(std::move(scores));
}

EvalReport evaluate_dataset(std::span<const std::pair<Signal, Signal>> pairs) {
    std::vector<SignalPair> refs;
    refs.reserve(pairs.size());
    for (const auto& [c, p] : pairs) refs.emplace_back(&c, &p);
    return evaluate_dataset(std::span<const SignalPair>(refs));
}

void write_csv(std::ostream& os, const EvalReport& report) {
    os << "index,rms_mv,snr_db,pass\n";
    for (std::size_t i = 0; i < report.per_signal.size(); ++i) {
        const auto& s = report.per_signal[i];
        const bool pass = s.rms_mv <= report.rms_limit_mv && s.snr_db >= report.snr_threshold_db;
        os << i << ',' << fmt(s.rms_mv) << ',' << fmt(s.snr_db) << ',' << (pass ? 1 : 0) << '\n';
    }
    os << "mean," << fmt(report.avg_rms_mv) << ',' << fmt(report.avg_snr_db) << ',' << fmt(report.pass_fraction)
       << '\n';
}

}  // namespace ecglab::metrics
