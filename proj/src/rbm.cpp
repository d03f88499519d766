#include "ecglab/rbm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ecglab/rng.hpp"
#include "ecglab/signal_io.hpp"

namespace ecglab::rbm {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'B', 'M', '1'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kMaxEnumeratedUnits = 20;

void check_sizes(const RbmParams& p, std::size_t visible, std::size_t hidden) {
    if (visible != p.n_visible || hidden != p.n_hidden) {
        throw std::invalid_argument("rbm: got " + std::to_string(visible) + " visible / " + std::to_string(hidden) +
                                    " hidden values for a " + std::to_string(p.n_visible) + "x" +
                                    std::to_string(p.n_hidden) + " machine");
    }
}

std::vector<double> bits(std::uint64_t mask, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (mask >> i) & 1u ? 1.0 : 0.0;
    return v;
}

}  // namespace

RbmParams::RbmParams(std::size_t visible, std::size_t hidden)
    : n_visible(visible),
      n_hidden(hidden),
      weights(visible * hidden, 0.0),
      visible_bias(visible, 0.0),
      hidden_bias(hidden, 0.0) {}

RbmParams RbmParams::transposed() const {
    RbmParams t(n_hidden, n_visible);
    for (std::size_t v = 0; v < n_visible; ++v) {
        for (std::size_t h = 0; h < n_hidden; ++h) t.w(h, v) = w(v, h);
    }
    t.visible_bias = hidden_bias;
    t.hidden_bias = visible_bias;
    return t;
}

double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double energy(const RbmParams& p, std::span<const double> visible, std::span<const double> hidden) {
    check_sizes(p, visible.size(), hidden.size());
    double e = 0.0;
    for (std::size_t k = 0; k < p.n_visible; ++k) e -= p.visible_bias[k] * visible[k];
    for (std::size_t m = 0; m < p.n_hidden; ++m) e -= p.hidden_bias[m] * hidden[m];
    for (std::size_t k = 0; k < p.n_visible; ++k) {
        for (std::size_t m = 0; m < p.n_hidden; ++m) e -= visible[k] * hidden[m] * p.w(k, m);
    }
    return e;
}

std::vector<double> hidden_given_visible(const RbmParams& p, std::span<const double> visible) {
    check_sizes(p, visible.size(), p.n_hidden);
    std::vector<double> act(p.hidden_bias);
    for (std::size_t t = 0; t < p.n_visible; ++t) {
        const double v = visible[t];
        if (v == 0.0) continue;
        const double* row = &p.weights[t * p.n_hidden];
        for (std::size_t s = 0; s < p.n_hidden; ++s) act[s] += v * row[s];
    }
    for (auto& a : act) a = sigmoid(a);
    return act;
}

std::vector<double> visible_given_hidden(const RbmParams& p, std::span<const double> hidden) {
    check_sizes(p, p.n_visible, hidden.size());
    std::vector<double> out(p.n_visible);
    for (std::size_t t = 0; t < p.n_visible; ++t) {
        const double* row = &p.weights[t * p.n_hidden];
        double a = p.visible_bias[t];
        for (std::size_t s = 0; s < p.n_hidden; ++s) a += hidden[s] * row[s];
        out[t] = sigmoid(a);
    }
    return out;
}

double log_partition(const RbmParams& p) {
    const std::size_t units = p.n_visible + p.n_hidden;
    if (units > kMaxEnumeratedUnits) {
        throw std::invalid_argument("rbm: exhaustive partition function limited to " +
                                    std::to_string(kMaxEnumeratedUnits) + " units, machine has " +
                                    std::to_string(units));
    }
    std::vector<double> neg_e;
    neg_e.reserve(std::size_t{1} << units);
    for (std::uint64_t vm = 0; vm < (std::uint64_t{1} << p.n_visible); ++vm) {
        const auto v = bits(vm, p.n_visible);
        for (std::uint64_t hm = 0; hm < (std::uint64_t{1} << p.n_hidden); ++hm) {
            neg_e.push_back(-energy(p, v, bits(hm, p.n_hidden)));
        }
    }
    const double top = *std::ranges::max_element(neg_e);
    double acc = 0.0;
    for (double x : neg_e) acc += std::exp(x - top);
    return top + std::log(acc);
}

double joint_probability(const RbmParams& p, std::span<const double> visible, std::span<const double> hidden) {
    check_sizes(p, visible.size(), hidden.size());
    return std::exp(-energy(p, visible, hidden) - log_partition(p));
}

std::vector<double> reconstruct(const RbmParams& p, std::span<const double> visible) {
    return visible_given_hidden(p, hidden_given_visible(p, visible));
}

double reconstruction_error(const RbmParams& p, std::span<const std::vector<double>> data) {
    if (data.empty()) throw std::invalid_argument("reconstruction_error: no data");
    double acc = 0.0;
    for (const auto& v : data) {
        const auto r = reconstruct(p, v);
        for (std::size_t i = 0; i < v.size(); ++i) acc += (r[i] - v[i]) * (r[i] - v[i]);
    }
    return acc / static_cast<double>(data.size() * p.n_visible);
}

RbmParams train_cd1(std::span<const std::vector<double>> data, const TrainConfig& config,
                    const EpochCallback& on_epoch) {
    if (data.empty()) throw std::invalid_argument("train_cd1: no training data");
    if (config.n_hidden == 0 || config.batch_size == 0) {
        throw std::invalid_argument("train_cd1: n_hidden and batch_size must be positive");
    }
    const std::size_t nv = data.front().size();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].size() != nv) throw std::invalid_argument("train_cd1: windows differ in length");
        for (double x : data[i]) {
            if (!(x >= -1e-9 && x <= 1.0 + 1e-9)) {
                throw std::invalid_argument("train_cd1: window " + std::to_string(i) +
                                            " holds a value outside [0, 1]; scale inputs first");
            }
        }
    }

    RbmParams p(nv, config.n_hidden);
    SplitMix64 init(derive_seed(config.seed, "rbm-init"));
    for (auto& w : p.weights) w = 0.01 * init.normal();

    SplitMix64 rng(derive_seed(config.seed, "rbm-gibbs"));
    std::vector<std::size_t> order(data.size());
    const std::size_t nh = config.n_hidden;
    std::vector<double> dw(nv * nh);
    std::vector<double> da(nv);
    std::vector<double> db(nh);
    std::vector<double> h_sample(nh);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t count = std::min(config.batch_size, order.size() - start);
            std::ranges::fill(dw, 0.0);
            std::ranges::fill(da, 0.0);
            std::ranges::fill(db, 0.0);
            for (std::size_t j = 0; j < count; ++j) {
                const auto& v0 = data[order[start + j]];
                const auto h0 = hidden_given_visible(p, v0);
                for (std::size_t s = 0; s < nh; ++s) h_sample[s] = rng.uniform() < h0[s] ? 1.0 : 0.0;
                const auto v1 = visible_given_hidden(p, h_sample);
                const auto h1 = hidden_given_visible(p, v1);
                for (std::size_t t = 0; t < nv; ++t) {
                    double* row = &dw[t * nh];
                    for (std::size_t s = 0; s < nh; ++s) row[s] += v0[t] * h0[s] - v1[t] * h1[s];
                    da[t] += v0[t] - v1[t];
                }
                for (std::size_t s = 0; s < nh; ++s) db[s] += h0[s] - h1[s];
            }
            const double step = config.learning_rate / static_cast<double>(count);
            for (std::size_t i = 0; i < dw.size(); ++i) p.weights[i] += step * dw[i];
            for (std::size_t t = 0; t < nv; ++t) p.visible_bias[t] += step * da[t];
            for (std::size_t s = 0; s < nh; ++s) p.hidden_bias[s] += step * db[s];
        }
        if (on_epoch) on_epoch(epoch, reconstruction_error(p, data));
    }
    return p;
}

RbmDenoiser fit_denoiser(std::span<const Signal> clean_windows, const TrainConfig& config,
                         const EpochCallback& on_epoch) {
    if (clean_windows.empty()) throw std::invalid_argument("fit_denoiser: no training windows");
    double mn = clean_windows.front()[0];
    double mx = mn;
    for (const auto& w : clean_windows) {
        const auto [lo, hi] = std::ranges::minmax(w.vec());
        mn = std::min(mn, lo);
        mx = std::max(mx, hi);
    }
    if (!(mx > mn)) throw std::invalid_argument("fit_denoiser: training windows are constant");
    const ScaleRecord rec{mn, mx, 0.0, 1.0};
    std::vector<std::vector<double>> data;
    data.reserve(clean_windows.size());
    for (const auto& w : clean_windows) {
        std::vector<double> v(w.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(rec.apply(w[i]), 0.0, 1.0);
        data.push_back(std::move(v));
    }
    return {train_cd1(data, config, on_epoch), rec};
}

Signal denoise_rbm(const RbmDenoiser& model, const Signal& noisy) {
    if (noisy.size() != model.params.n_visible) {
        throw std::invalid_argument("denoise_rbm: signal has " + std::to_string(noisy.size()) +
                                    " samples, machine has " + std::to_string(model.params.n_visible) + " visibles");
    }
    std::vector<double> v(noisy.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(model.scale.apply(noisy[i]), 0.0, 1.0);
    auto r = reconstruct(model.params, v);
    for (auto& x : r) x = model.scale.invert(x);
    return {std::move(r), noisy.fs()};
}

void save(std::ostream& os, const RbmDenoiser& model) {
    const auto& p = model.params;
    os.write(kMagic.data(), kMagic.size());
    io::put_u32(os, kFormatVersion);
    io::put_u32(os, static_cast<std::uint32_t>(p.n_visible));
    io::put_u32(os, static_cast<std::uint32_t>(p.n_hidden));
    for (double v : {model.scale.src_min, model.scale.src_max, model.scale.lo, model.scale.hi}) io::put_f64(os, v);
    for (double v : p.weights) io::put_f64(os, v);
    for (double v : p.visible_bias) io::put_f64(os, v);
    for (double v : p.hidden_bias) io::put_f64(os, v);
    if (!os) throw std::runtime_error("RBM model: write failed");
}

RbmDenoiser load(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("RBM model: bad magic");
    if (const auto v = io::get_u32(is); v != kFormatVersion) {
        throw std::runtime_error("RBM model: unsupported format version " + std::to_string(v));
    }
    const std::size_t nv = io::get_u32(is);
    const std::size_t nh = io::get_u32(is);
    RbmDenoiser m{RbmParams(nv, nh), {}};
    m.scale.src_min = io::get_f64(is);
    m.scale.src_max = io::get_f64(is);
    m.scale.lo = io::get_f64(is);
    m.scale.hi = io::get_f64(is);
    for (double& v : m.params.weights) v = io::get_f64(is);
    for (double& v : m.params.visible_bias) v = io::get_f64(is);
    for (double& v : m.params.hidden_bias) v = io::get_f64(is);
    return m;
}

void save(const std::filesystem::path& path, const RbmDenoiser& model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    save(os, model);
}

RbmDenoiser load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return load(is);
}

}  // namespace ecglab::rbm
