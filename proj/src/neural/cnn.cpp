#include "ecglab/neural/cnn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ecglab/rng.hpp"
#include "ecglab/signal_io.hpp"

namespace ecglab::neural {

namespace {

constexpr std::array<char, 4> kMagic{'C', 'N', 'N', '1'};
constexpr std::uint32_t kFormatVersion = 1;

std::vector<CnnModel::Block> make_blocks(const CnnConfig& c) {
    std::vector<CnnModel::Block> blocks;
    blocks.reserve(c.num_conv_layers);
    for (std::size_t i = 0; i < c.num_conv_layers; ++i) {
        const std::size_t in = i == 0 ? 1 : c.filters_per_layer;
        blocks.push_back({Conv1d(in, c.filters_per_layer, c.kernel_len), BatchNorm1d(c.filters_per_layer), Relu{},
                          AvgPool1d(c.pool_stride, c.pool_mode)});
    }
    return blocks;
}

void write_block(std::ostream& os, std::span<const double> v) {
    for (double x : v) io::put_f64(os, x);
}

void read_block(std::istream& is, std::span<double> v) {
    for (double& x : v) x = io::get_f64(is);
}

}  // namespace

void CnnConfig::validate() const {
    if (input_len == 0) throw std::invalid_argument("CnnConfig: input_len must be positive");
    if (num_conv_layers == 0) throw std::invalid_argument("CnnConfig: need at least one conv layer");
    if (filters_per_layer == 0) throw std::invalid_argument("CnnConfig: filters_per_layer must be positive");
    if (kernel_len == 0 || kernel_len % 2 == 0) {
        throw std::invalid_argument("CnnConfig: kernel_len must be odd, got " + std::to_string(kernel_len));
    }
    if (pool_stride == 0) throw std::invalid_argument("CnnConfig: pool_stride must be positive");
    if (batch_size == 0) throw std::invalid_argument("CnnConfig: batch_size must be positive");
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("CnnConfig: learning_rate must be non-negative");
    if (!(grad_clip_norm > 0.0)) throw std::invalid_argument("CnnConfig: grad_clip_norm must be positive");
}

std::size_t CnnConfig::pooled_length() const noexcept {
    std::size_t len = input_len;
    for (std::size_t i = 0; i < num_conv_layers; ++i) len = AvgPool1d::output_length(len, pool_stride);
    return len;
}

CnnModel::CnnModel(const CnnConfig& config)
    : input_mean(config.input_len, 0.0),
      blocks((config.validate(), make_blocks(config))),
      fc(config.filters_per_layer * config.pooled_length(), config.input_len),
      config_(config) {
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].conv.init(derive_seed(config.seed, "conv" + std::to_string(i)));
    fc.init(derive_seed(config.seed, "fc"));
}

Tensor CnnModel::normalize(const Tensor& input) const {
    const auto& s = input.shape();
    if (s.channels != 1 || s.length != config_.input_len) {
        throw std::invalid_argument("CnnModel: expected (batch, 1, " + std::to_string(config_.input_len) +
                                    ") input, got length " + std::to_string(s.length) + " with " +
                                    std::to_string(s.channels) + " channel(s)");
    }
    Tensor x(input);
    for (std::size_t b = 0; b < s.batch; ++b) {
        auto r = x.row(b, 0);
        for (std::size_t i = 0; i < s.length; ++i) r[i] -= input_mean[i];
    }
    return x;
}

Tensor CnnModel::forward(const Tensor& input, Mode mode) {
    Tensor x = normalize(input);
    for (auto& blk : blocks) {
        x = blk.conv.forward(x);
        x = blk.bn.forward(x, mode);
        x = blk.relu.forward(x);
        x = blk.pool.forward(x);
    }
    return fc.forward(x);
}

Tensor CnnModel::backward(const Tensor& grad_out) {
    Tensor g = fc.backward(grad_out);
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
        g = it->pool.backward(g);
        g = it->relu.backward(g);
        g = it->bn.backward(g);
        g = it->conv.backward(g);
    }
    return g;  // mean subtraction has unit Jacobian
}

Tensor CnnModel::predict(const Tensor& input) const {
    Tensor x = normalize(input);
    for (const auto& blk : blocks) {
        x = blk.conv.apply(x);
        x = blk.bn.apply(x);
        x = Relu::apply(x);
        x = blk.pool.apply(x);
    }
    return fc.apply(x);
}

std::vector<ParamView> CnnModel::params() {
    std::vector<ParamView> out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (auto p : blocks[i].conv.params()) {
            p.name = "block" + std::to_string(i) + "." + p.name;
            out.push_back(std::move(p));
        }
        for (auto p : blocks[i].bn.params()) {
            p.name = "block" + std::to_string(i) + "." + p.name;
            out.push_back(std::move(p));
        }
    }
    for (auto p : fc.params()) out.push_back(std::move(p));
    return out;
}

void CnnModel::zero_grad() {
    for (auto& b : blocks) {
        b.conv.zero_grad();
        b.bn.zero_grad();
    }
    fc.zero_grad();
}

std::size_t CnnModel::parameter_count() const noexcept {
    std::size_t n = fc.weight.size() + fc.bias.size();
    for (const auto& b : blocks) n += b.conv.weight.size() + b.conv.bias.size() + 2 * b.bn.gamma.size();
    return n;
}

Tensor stack(std::span<const Signal* const> signals) {
    if (signals.empty()) throw std::invalid_argument("stack: no signals");
    const std::size_t len = signals.front()->size();
    Tensor t({signals.size(), 1, len});
    for (std::size_t b = 0; b < signals.size(); ++b) {
        if (signals[b]->size() != len) throw std::invalid_argument("stack: signals differ in length");
        std::ranges::copy(signals[b]->samples(), t.row(b, 0).begin());
    }
    return t;
}

Tensor stack(std::span<const Signal> signals) {
    std::vector<const Signal*> refs;
    refs.reserve(signals.size());
    for (const auto& s : signals) refs.push_back(&s);
    return stack(std::span<const Signal* const>(refs));
}

TrainResult train(const CnnConfig& config, const Tensor& noisy, const Tensor& clean, const EpochCallback& on_epoch) {
    config.validate();
    const auto& s = noisy.shape();
    if (s != clean.shape()) throw std::invalid_argument("train: noisy and clean tensors differ in shape");
    if (s.channels != 1 || s.length != config.input_len) {
        throw std::invalid_argument("train: windows of " + std::to_string(s.length) + " samples, model expects " +
                                    std::to_string(config.input_len));
    }
    if (s.batch == 0) throw std::invalid_argument("train: empty dataset");

    TrainResult result{CnnModel(config), {}};
    auto& model = result.model;
    for (std::size_t b = 0; b < s.batch; ++b) {
        const auto r = noisy.row(b, 0);
        for (std::size_t i = 0; i < s.length; ++i) model.input_mean[i] += r[i];
    }
    for (auto& m : model.input_mean) m /= static_cast<double>(s.batch);

    Adam adam({.learning_rate = config.learning_rate});
    SplitMix64 rng(derive_seed(config.seed, "shuffle"));
    std::vector<std::size_t> order(s.batch);
    const std::size_t len = s.length;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t count = std::min(config.batch_size, order.size() - start);
            Tensor xb({count, 1, len});
            Tensor yb({count, 1, len});
            for (std::size_t j = 0; j < count; ++j) {
                std::ranges::copy(noisy.row(order[start + j], 0), xb.row(j, 0).begin());
                std::ranges::copy(clean.row(order[start + j], 0), yb.row(j, 0).begin());
            }
            model.zero_grad();
            const Tensor pred = model.forward(xb, Mode::train);
            auto [loss, grad] = mse_loss(pred, yb);
            if (!std::isfinite(loss)) {
                throw std::runtime_error("train: loss became non-finite at epoch " + std::to_string(epoch));
            }
            model.backward(grad);
            const auto params = model.params();
            clip_gradients(params, config.grad_clip_norm);
            adam.step(params);
            loss_sum += loss * static_cast<double>(count);
        }
        const double mean_loss = loss_sum / static_cast<double>(s.batch);
        result.trace.push_back({epoch, mean_loss, std::sqrt(mean_loss)});
        if (on_epoch) on_epoch(result.trace.back());
    }
    return result;
}

TrainResult train(const CnnConfig& config, std::span<const Signal> noisy, std::span<const Signal> clean,
                  const EpochCallback& on_epoch) {
    if (noisy.size() != clean.size()) throw std::invalid_argument("train: noisy/clean counts differ");
    return train(config, stack(noisy), stack(clean), on_epoch);
}

std::vector<Signal> denoise(const CnnModel& model, std::span<const Signal> noisy) {
    const std::size_t len = model.config().input_len;
    std::vector<const Signal*> windows;
    std::vector<Signal> owned;
    std::vector<std::size_t> parts;
    for (const auto& s : noisy) {
        if (s.size() % len != 0) {
            throw std::invalid_argument("denoise: " + std::to_string(s.size()) + " samples is not a multiple of the " +
                                        std::to_string(len) + "-sample model window");
        }
        parts.push_back(s.size() / len);
    }
    owned.reserve(std::accumulate(parts.begin(), parts.end(), std::size_t{0}));
    for (const auto& s : noisy) {
        for (std::size_t w = 0; w < s.size() / len; ++w) owned.push_back(slice(s, {w * len, len}));
    }
    for (const auto& w : owned) windows.push_back(&w);
    std::vector<Signal> out;
    if (windows.empty()) return out;
    const Tensor y = model.predict(stack(std::span<const Signal* const>(windows)));
    std::size_t next = 0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        std::vector<double> joined;
        joined.reserve(parts[i] * len);
        for (std::size_t w = 0; w < parts[i]; ++w, ++next) {
            const auto r = y.row(next, 0);
            joined.insert(joined.end(), r.begin(), r.end());
        }
        out.emplace_back(std::move(joined), noisy[i].fs());
    }
    return out;
}

Signal denoise(const CnnModel& model, const Signal& noisy) {
    return std::move(denoise(model, std::span<const Signal>(&noisy, 1)).front());
}

void save(std::ostream& os, const CnnModel& model) {
    const auto& c = model.config();
    os.write(kMagic.data(), kMagic.size());
    io::put_u32(os, kFormatVersion);
    for (std::size_t v : {c.input_len, c.num_conv_layers, c.filters_per_layer, c.kernel_len, c.pool_stride,
                          static_cast<std::size_t>(c.pool_mode), c.batch_size, c.epochs}) {
        io::put_u32(os, static_cast<std::uint32_t>(v));
    }
    io::put_u32(os, static_cast<std::uint32_t>(c.seed & 0xFFFFFFFFu));
    io::put_u32(os, static_cast<std::uint32_t>(c.seed >> 32));
    io::put_f64(os, c.learning_rate);
    io::put_f64(os, c.grad_clip_norm);
    write_block(os, model.input_mean);
    for (const auto& b : model.blocks) {
        write_block(os, b.conv.weight);
        write_block(os, b.conv.bias);
        write_block(os, b.bn.gamma);
        write_block(os, b.bn.beta);
        write_block(os, b.bn.running_mean);
        write_block(os, b.bn.running_var);
    }
    write_block(os, model.fc.weight);
    write_block(os, model.fc.bias);
    if (!os) throw std::runtime_error("CNN model: write failed");
}

CnnModel load(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("CNN model: bad magic");
    if (const auto v = io::get_u32(is); v != kFormatVersion) {
        throw std::runtime_error("CNN model: unsupported format version " + std::to_string(v));
    }
    CnnConfig c;
    c.input_len = io::get_u32(is);
    c.num_conv_layers = io::get_u32(is);
    c.filters_per_layer = io::get_u32(is);
    c.kernel_len = io::get_u32(is);
    c.pool_stride = io::get_u32(is);
    const auto mode = io::get_u32(is);
    if (mode > 1) throw std::runtime_error("CNN model: unknown pool mode");
    c.pool_mode = static_cast<PoolMode>(mode);
    c.batch_size = io::get_u32(is);
    c.epochs = io::get_u32(is);
    const std::uint64_t lo = io::get_u32(is);
    const std::uint64_t hi = io::get_u32(is);
    c.seed = lo | (hi << 32);
    c.learning_rate = io::get_f64(is);
    c.grad_clip_norm = io::get_f64(is);
    CnnModel model(c);
    read_block(is, model.input_mean);
    for (auto& b : model.blocks) {
        read_block(is, b.conv.weight);
        read_block(is, b.conv.bias);
        read_block(is, b.bn.gamma);
        read_block(is, b.bn.beta);
        read_block(is, b.bn.running_mean);
        read_block(is, b.bn.running_var);
    }
    read_block(is, model.fc.weight);
    read_block(is, model.fc.bias);
    return model;
}

void save(const std::filesystem::path& path, const CnnModel& model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    save(os, model);
}

CnnModel load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return load(is);
}

}  // namespace ecglab::neural
