#include "ecglab/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ecglab::wavelet {

namespace {

// Standard published lowpass analysis taps (same ordering as PyWavelets dec_lo).
const std::vector<double> kHaar{0.7071067811865476, 0.7071067811865476};
const std::vector<double> kDb4{-0.010597401785069032, 0.0328830116668852,  0.030841381835560764,
                               -0.18703481171909309,  -0.027983769416859854, 0.6308807679298589,
                               0.7148465705529157,    0.2303778133088965};
const std::vector<double> kSym4{-0.07576571478927333, -0.02963552764599851, 0.49761866763201545,
                                0.8037387518059161,   0.29785779560527736,  -0.09921954357684722,
                                -0.012603967262037833, 0.0322231006040427};

// Half-sample symmetric extension, valid for any integer index.
std::size_t mirror(std::ptrdiff_t i, std::size_t n) {
    const auto period = static_cast<std::ptrdiff_t>(2 * n);
    std::ptrdiff_t r = i % period;
    if (r < 0) r += period;
    return static_cast<std::size_t>(r < static_cast<std::ptrdiff_t>(n) ? r : period - 1 - r);
}

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    const auto p = static_cast<std::ptrdiff_t>(n);
    std::ptrdiff_t r = i % p;
    return static_cast<std::size_t>(r < 0 ? r + p : r);
}

// One analysis level: y[k] = sum_j h[j] * x[2k + 1 - j].
void analyze(std::span<const double> x, const WaveletSpec& spec, Extension ext, std::vector<double>& lo,
             std::vector<double>& hi) {
    const std::size_t n = x.size();
    const std::size_t f = spec.filter_length();
    const std::size_t m = ext == Extension::symmetric ? (n + f - 1) / 2 : n / 2;
    // periodized phase matches PyWavelets
    const std::ptrdiff_t shift = ext == Extension::periodization ? static_cast<std::ptrdiff_t>(f / 2) - 1 : 0;
    lo.assign(m, 0.0);
    hi.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t j = 0; j < f; ++j) {
            const auto idx = static_cast<std::ptrdiff_t>(2 * k + 1) - static_cast<std::ptrdiff_t>(j) + shift;
            const double v = x[ext == Extension::symmetric ? mirror(idx, n) : wrap(idx, n)];
            a += spec.dec_lo[j] * v;
            d += spec.dec_hi[j] * v;
        }
        lo[k] = a;
        hi[k] = d;
    }
}

// Transpose of `analyze`, restricted to the first `n` output positions.
std::vector<double> synthesize(std::span<const double> lo, std::span<const double> hi, const WaveletSpec& spec,
                               Extension ext, std::size_t n) {
    const std::size_t f = spec.filter_length();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < lo.size(); ++k) {
        for (std::size_t j = 0; j < f; ++j) {
            const auto idx = static_cast<std::ptrdiff_t>(2 * k + 1) - static_cast<std::ptrdiff_t>(j);
            std::size_t pos;
            if (ext == Extension::periodization) {
                pos = wrap(idx + static_cast<std::ptrdiff_t>(f / 2) - 1, n);
            } else {
                if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) continue;
                pos = static_cast<std::size_t>(idx);
            }
            out[pos] += spec.dec_lo[j] * lo[k] + spec.dec_hi[j] * hi[k];
        }
    }
    return out;
}

}  // namespace

Family parse_family(std::string_view name) {
    if (name == "haar" || name == "db1") return Family::haar;
    if (name == "db4") return Family::db4;
    if (name == "sym4") return Family::sym4;
    throw std::invalid_argument("unknown wavelet family '" + std::string(name) + "'");
}

std::string_view to_string(Family f) noexcept {
    switch (f) {
        case Family::haar: return "haar";
        case Family::db4: return "db4";
        case Family::sym4: return "sym4";
    }
    return "?";
}

WaveletSpec WaveletSpec::make(Family f) {
    WaveletSpec s{f, {}, {}, {}, {}};
    switch (f) {
        case Family::haar: s.dec_lo = kHaar; break;
        case Family::db4: s.dec_lo = kDb4; break;
        case Family::sym4: s.dec_lo = kSym4; break;
    }
    const std::size_t n = s.dec_lo.size();
    s.dec_hi.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        s.dec_hi[j] = (j % 2 == 0 ? -1.0 : 1.0) * s.dec_lo[n - 1 - j];
    }
    s.rec_lo.assign(s.dec_lo.rbegin(), s.dec_lo.rend());
    s.rec_hi.assign(s.dec_hi.rbegin(), s.dec_hi.rend());
    return s;
}

int max_level(std::size_t n) noexcept {
    int l = 0;
    while ((std::size_t{2} << l) <= n) ++l;
    return l;
}

int default_levels(std::size_t n) noexcept { return std::min(4, max_level(n)); }

DwtCoeffs dwt(const Signal& signal, const WaveletSpec& spec, int levels, Extension ext) {
    const std::size_t n = signal.size();
    if (levels < 1) throw std::invalid_argument("dwt: levels must be >= 1");
    if (n < spec.filter_length()) {
        throw std::invalid_argument("dwt: signal of " + std::to_string(n) + " samples is shorter than the " +
                                    std::to_string(spec.filter_length()) + "-tap filter");
    }
    if (levels > max_level(n)) {
        throw std::invalid_argument("dwt: " + std::to_string(levels) + " levels too deep for " + std::to_string(n) +
                                    " samples (max " + std::to_string(max_level(n)) + ")");
    }
    if (ext == Extension::periodization && n % (std::size_t{1} << levels) != 0) {
        throw std::invalid_argument("dwt: periodization needs length divisible by 2^levels");
    }
    DwtCoeffs c{spec.family, ext, {}, {}, n, signal.fs(), {}};
    std::vector<double> current(signal.vec());
    std::vector<double> lo;
    std::vector<double> hi;
    for (int l = 0; l < levels; ++l) {
        c.level_lengths.push_back(current.size());
        analyze(current, spec, ext, lo, hi);
        c.details.insert(c.details.begin(), hi);
        current.swap(lo);
    }
    c.approximation = std::move(current);
    return c;
}

Signal idwt(const DwtCoeffs& coeffs, const WaveletSpec& spec) {
    if (coeffs.family != spec.family) {
        throw std::invalid_argument("idwt: coefficients are " + std::string(to_string(coeffs.family)) +
                                    " but spec is " + std::string(to_string(spec.family)));
    }
    const auto levels = coeffs.details.size();
    if (levels == 0 || coeffs.level_lengths.size() != levels) throw std::invalid_argument("idwt: malformed coefficients");
    std::vector<double> current = coeffs.approximation;
    for (std::size_t i = 0; i < levels; ++i) {
        const auto& d = coeffs.details[i];
        if (d.size() != current.size()) throw std::invalid_argument("idwt: level size mismatch");
        current = synthesize(current, d, spec, coeffs.extension, coeffs.level_lengths[levels - 1 - i]);
    }
    return {std::move(current), coeffs.fs};
}

double soft_threshold(double v, double threshold) noexcept {
    const double mag = std::abs(v) - threshold;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
}

double estimate_sigma(std::span<const double> finest_detail) {
    if (finest_detail.empty()) throw std::invalid_argument("estimate_sigma: empty detail band");
    std::vector<double> mags(finest_detail.size());
    std::ranges::transform(finest_detail, mags.begin(), [](double v) { return std::abs(v); });
    const std::size_t mid = mags.size() / 2;
    std::ranges::nth_element(mags, mags.begin() + static_cast<std::ptrdiff_t>(mid));
    double median = mags[mid];
    if (mags.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return median / 0.6745;
}

Signal wavelet_denoise(const Signal& signal, const WaveletSpec& spec, int levels) {
    auto c = dwt(signal, spec, levels);
    const double sigma = estimate_sigma(c.details.back());
    const double lambda = sigma * std::sqrt(2.0 * std::log(static_cast<double>(signal.size())));
    for (auto& band : c.details) {
        for (auto& v : band) v = soft_threshold(v, lambda);
    }
    return idwt(c, spec);
}

}  // namespace ecglab::wavelet
