#include "ecglab/neural/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "ecglab/rng.hpp"

namespace ecglab::neural {

namespace {

std::string shape_str(const Shape& s) {
    return "(" + std::to_string(s.batch) + "," + std::to_string(s.channels) + "," + std::to_string(s.length) + ")";
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrix = Eigen::Map<const RowMatrix>;
using MutMatrix = Eigen::Map<RowMatrix>;

// Row (c, k) of the column matrix holds x[c][i + k - pad] for i in [0, len), zero outside.
void im2col(std::span<const double> x, std::size_t channels, std::size_t len, std::size_t kernel, RowMatrix& cols) {
    cols.setZero(static_cast<Eigen::Index>(channels * kernel), static_cast<Eigen::Index>(len));
    const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);
    const auto slen = static_cast<std::ptrdiff_t>(len);
    for (std::size_t c = 0; c < channels; ++c) {
        const double* xc = x.data() + c * len;
        for (std::size_t k = 0; k < kernel; ++k) {
            const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad;
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(slen, slen - shift);
            double* row = cols.data() + (c * kernel + k) * len;
            for (std::ptrdiff_t i = lo; i < hi; ++i) row[i] = xc[i + shift];
        }
    }
}

// Adjoint of im2col, accumulated into `gx`.
void col2im_add(const RowMatrix& cols, std::size_t channels, std::size_t len, std::size_t kernel,
                std::span<double> gx) {
    const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);
    const auto slen = static_cast<std::ptrdiff_t>(len);
    for (std::size_t c = 0; c < channels; ++c) {
        double* gc = gx.data() + c * len;
        for (std::size_t k = 0; k < kernel; ++k) {
            const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad;
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(slen, slen - shift);
            const double* row = cols.data() + (c * kernel + k) * len;
            for (std::ptrdiff_t i = lo; i < hi; ++i) gc[i + shift] += row[i];
        }
    }
}

void fill_uniform(std::vector<double>& v, double bound, std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (auto& x : v) x = rng.uniform(-bound, bound);
}

}  // namespace

// ---------------------------------------------------------------- Conv1d

Conv1d::Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel)
    : weight(out_channels * in_channels * kernel, 0.0),
      bias(out_channels, 0.0),
      grad_weight(weight.size(), 0.0),
      grad_bias(out_channels, 0.0),
      in_(in_channels),
      out_(out_channels),
      k_(kernel) {
    if (kernel % 2 == 0) throw std::invalid_argument("Conv1d: kernel length must be odd, got " + std::to_string(kernel));
    if (in_channels == 0 || out_channels == 0) throw std::invalid_argument("Conv1d: channel counts must be positive");
}

void Conv1d::init(std::uint64_t seed) {
    fill_uniform(weight, 1.0 / std::sqrt(static_cast<double>(in_ * k_)), seed);
    std::ranges::fill(bias, 0.0);
}

Tensor Conv1d::forward(const Tensor& input) {
    auto out = apply(input);
    input_ = input;
    return out;
}

Tensor Conv1d::apply(const Tensor& input) const {
    const auto& s = input.shape();
    if (s.channels != in_) {
        throw std::invalid_argument("Conv1d: expected " + std::to_string(in_) + " input channels, got " + shape_str(s));
    }
    const std::size_t len = s.length;
    Tensor out({s.batch, out_, len});
    const ConstMatrix w(weight.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_ * k_));
    const Eigen::Map<const Eigen::VectorXd> bvec(bias.data(), static_cast<Eigen::Index>(out_));
    RowMatrix cols;
    for (std::size_t b = 0; b < s.batch; ++b) {
        im2col(input.item(b), in_, len, k_, cols);
        MutMatrix y(out.row(b, 0).data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(len));
        y.noalias() = w * cols;
        y.colwise() += bvec;
    }
    return out;
}

Tensor Conv1d::backward(const Tensor& grad_out) {
    const auto& s = input_.shape();
    if (grad_out.shape() != Shape{s.batch, out_, s.length}) {
        throw std::invalid_argument("Conv1d::backward: gradient shape " + shape_str(grad_out.shape()) +
                                    " does not match forward output");
    }
    const std::size_t len = s.length;
    const auto ck = static_cast<Eigen::Index>(in_ * k_);
    const ConstMatrix w(weight.data(), static_cast<Eigen::Index>(out_), ck);
    MutMatrix gw(grad_weight.data(), static_cast<Eigen::Index>(out_), ck);
    Eigen::Map<Eigen::VectorXd> gb(grad_bias.data(), static_cast<Eigen::Index>(out_));
    Tensor grad_in(s);
    RowMatrix cols;
    RowMatrix grad_cols(ck, static_cast<Eigen::Index>(len));
    for (std::size_t b = 0; b < s.batch; ++b) {
        const ConstMatrix g(grad_out.row(b, 0).data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(len));
        im2col(input_.item(b), in_, len, k_, cols);
        gb += g.rowwise().sum();
        gw.noalias() += g * cols.transpose();
        grad_cols.noalias() = w.transpose() * g;
        col2im_add(grad_cols, in_, len, k_, {grad_in.row(b, 0).data(), in_ * len});
    }
    return grad_in;
}

std::vector<ParamView> Conv1d::params() {
    return {{"conv.weight", weight, grad_weight}, {"conv.bias", bias, grad_bias}};
}

void Conv1d::zero_grad() {
    std::ranges::fill(grad_weight, 0.0);
    std::ranges::fill(grad_bias, 0.0);
}

// ---------------------------------------------------------------- BatchNorm1d

BatchNorm1d::BatchNorm1d(std::size_t channels, double momentum_, double eps_)
    : gamma(channels, 1.0),
      beta(channels, 0.0),
      running_mean(channels, 0.0),
      running_var(channels, 1.0),
      grad_gamma(channels, 0.0),
      grad_beta(channels, 0.0),
      momentum(momentum_),
      eps(eps_) {}

Tensor BatchNorm1d::forward(const Tensor& input, Mode mode) {
    const auto& s = input.shape();
    if (s.channels != gamma.size()) {
        throw std::invalid_argument("BatchNorm1d: expected " + std::to_string(gamma.size()) + " channels, got " +
                                    shape_str(s));
    }
    mode_ = mode;
    const std::size_t c_count = s.channels;
    const double n = static_cast<double>(s.batch * s.length);
    xhat_ = Tensor(s);
    inv_std_.assign(c_count, 0.0);
    Tensor out(s);
    for (std::size_t c = 0; c < c_count; ++c) {
        double mean;
        double var;
        if (mode == Mode::train) {
            double sum = 0.0;
            for (std::size_t b = 0; b < s.batch; ++b) {
                for (double v : input.row(b, c)) sum += v;
            }
            mean = sum / n;
            double sq = 0.0;
            for (std::size_t b = 0; b < s.batch; ++b) {
                for (double v : input.row(b, c)) sq += (v - mean) * (v - mean);
            }
            var = sq / n;
            const double unbiased = n > 1.0 ? sq / (n - 1.0) : var;
            running_mean[c] = momentum * running_mean[c] + (1.0 - momentum) * mean;
            running_var[c] = momentum * running_var[c] + (1.0 - momentum) * unbiased;
        } else {
            mean = running_mean[c];
            var = running_var[c];
        }
        const double inv = 1.0 / std::sqrt(var + eps);
        inv_std_[c] = inv;
        for (std::size_t b = 0; b < s.batch; ++b) {
            const auto x = input.row(b, c);
            auto xh = xhat_.row(b, c);
            auto y = out.row(b, c);
            for (std::size_t i = 0; i < s.length; ++i) {
                xh[i] = (x[i] - mean) * inv;
                y[i] = gamma[c] * xh[i] + beta[c];
            }
        }
    }
    return out;
}

Tensor BatchNorm1d::apply(const Tensor& input) const {
    const auto& s = input.shape();
    if (s.channels != gamma.size()) {
        throw std::invalid_argument("BatchNorm1d: expected " + std::to_string(gamma.size()) + " channels, got " +
                                    shape_str(s));
    }
    Tensor out(s);
    for (std::size_t c = 0; c < s.channels; ++c) {
        const double inv = 1.0 / std::sqrt(running_var[c] + eps);
        for (std::size_t b = 0; b < s.batch; ++b) {
            const auto x = input.row(b, c);
            auto y = out.row(b, c);
            for (std::size_t i = 0; i < s.length; ++i) y[i] = gamma[c] * ((x[i] - running_mean[c]) * inv) + beta[c];
        }
    }
    return out;
}

Tensor BatchNorm1d::backward(const Tensor& grad_out) {
    const auto& s = xhat_.shape();
    if (grad_out.shape() != s) throw std::invalid_argument("BatchNorm1d::backward: gradient shape mismatch");
    const double n = static_cast<double>(s.batch * s.length);
    Tensor grad_in(s);
    for (std::size_t c = 0; c < s.channels; ++c) {
        double sum_g = 0.0;
        double sum_gx = 0.0;
        for (std::size_t b = 0; b < s.batch; ++b) {
            const auto g = grad_out.row(b, c);
            const auto xh = xhat_.row(b, c);
            for (std::size_t i = 0; i < s.length; ++i) {
                sum_g += g[i];
                sum_gx += g[i] * xh[i];
            }
        }
        grad_beta[c] += sum_g;
        grad_gamma[c] += sum_gx;
        const double scale = gamma[c] * inv_std_[c];
        for (std::size_t b = 0; b < s.batch; ++b) {
            const auto g = grad_out.row(b, c);
            const auto xh = xhat_.row(b, c);
            auto gi = grad_in.row(b, c);
            if (mode_ == Mode::train) {
                for (std::size_t i = 0; i < s.length; ++i) {
                    gi[i] = scale * (g[i] - sum_g / n - xh[i] * sum_gx / n);
                }
            } else {
                for (std::size_t i = 0; i < s.length; ++i) gi[i] = scale * g[i];
            }
        }
    }
    return grad_in;
}

std::vector<ParamView> BatchNorm1d::params() {
    return {{"bn.gamma", gamma, grad_gamma}, {"bn.beta", beta, grad_beta}};
}

void BatchNorm1d::zero_grad() {
    std::ranges::fill(grad_gamma, 0.0);
    std::ranges::fill(grad_beta, 0.0);
}

// ---------------------------------------------------------------- Relu

Tensor Relu::forward(const Tensor& input) {
    input_ = input;
    return apply(input);
}

Tensor Relu::apply(const Tensor& input) {
    Tensor out(input.shape());
    auto o = out.data();
    auto x = input.data();
    for (std::size_t i = 0; i < x.size(); ++i) o[i] = x[i] > 0.0 ? x[i] : 0.0;
    return out;
}

Tensor Relu::backward(const Tensor& grad_out) const {
    if (grad_out.shape() != input_.shape()) throw std::invalid_argument("Relu::backward: gradient shape mismatch");
    Tensor grad_in(grad_out.shape());
    auto gi = grad_in.data();
    auto g = grad_out.data();
    auto x = input_.data();
    for (std::size_t i = 0; i < g.size(); ++i) gi[i] = x[i] > 0.0 ? g[i] : 0.0;
    return grad_in;
}

// ---------------------------------------------------------------- AvgPool1d

Tensor AvgPool1d::forward(const Tensor& input) {
    in_shape_ = input.shape();
    return apply(input);
}

Tensor AvgPool1d::apply(const Tensor& input) const {
    const auto& in_shape = input.shape();
    const std::size_t out_len = output_length(in_shape.length, stride_);
    Tensor out({in_shape.batch, in_shape.channels, out_len});
    for (std::size_t b = 0; b < in_shape.batch; ++b) {
        for (std::size_t c = 0; c < in_shape.channels; ++c) {
            const auto x = input.row(b, c);
            auto y = out.row(b, c);
            for (std::size_t j = 0; j < out_len; ++j) {
                const std::size_t start = j * stride_;
                if (mode_ == PoolMode::subsample) {
                    y[j] = x[start];
                } else {
                    const std::size_t end = std::min(start + stride_, in_shape.length);
                    double acc = 0.0;
                    for (std::size_t i = start; i < end; ++i) acc += x[i];
                    y[j] = acc / static_cast<double>(end - start);
                }
            }
        }
    }
    return out;
}

Tensor AvgPool1d::backward(const Tensor& grad_out) const {
    const std::size_t out_len = output_length(in_shape_.length, stride_);
    if (grad_out.shape() != Shape{in_shape_.batch, in_shape_.channels, out_len}) {
        throw std::invalid_argument("AvgPool1d::backward: gradient shape mismatch");
    }
    Tensor grad_in(in_shape_);
    for (std::size_t b = 0; b < in_shape_.batch; ++b) {
        for (std::size_t c = 0; c < in_shape_.channels; ++c) {
            const auto g = grad_out.row(b, c);
            auto gi = grad_in.row(b, c);
            for (std::size_t j = 0; j < out_len; ++j) {
                const std::size_t start = j * stride_;
                if (mode_ == PoolMode::subsample) {
                    gi[start] = g[j];
                } else {
                    const std::size_t end = std::min(start + stride_, in_shape_.length);
                    const double share = g[j] / static_cast<double>(end - start);
                    for (std::size_t i = start; i < end; ++i) gi[i] = share;
                }
            }
        }
    }
    return grad_in;
}

// ---------------------------------------------------------------- Dense

Dense::Dense(std::size_t in_features, std::size_t out_features)
    : weight(in_features * out_features, 0.0),
      bias(out_features, 0.0),
      grad_weight(weight.size(), 0.0),
      grad_bias(out_features, 0.0),
      in_(in_features),
      out_(out_features) {
    if (in_features == 0 || out_features == 0) throw std::invalid_argument("Dense: sizes must be positive");
}

void Dense::init(std::uint64_t seed) {
    fill_uniform(weight, 1.0 / std::sqrt(static_cast<double>(in_)), seed);
    std::ranges::fill(bias, 0.0);
}

Tensor Dense::forward(const Tensor& input) {
    auto out = apply(input);
    input_ = input;
    return out;
}

Tensor Dense::apply(const Tensor& input) const {
    const auto& s = input.shape();
    if (s.channels * s.length != in_) {
        throw std::invalid_argument("Dense: expected " + std::to_string(in_) + " features, got " + shape_str(s));
    }
    Tensor out({s.batch, 1, out_});
    for (std::size_t b = 0; b < s.batch; ++b) {
        const auto x = input.item(b);
        auto y = out.row(b, 0);
        for (std::size_t j = 0; j < out_; ++j) {
            const double* w = &weight[j * in_];
            double acc = bias[j];
            for (std::size_t f = 0; f < in_; ++f) acc += w[f] * x[f];
            y[j] = acc;
        }
    }
    return out;
}

Tensor Dense::backward(const Tensor& grad_out) {
    const auto& s = input_.shape();
    if (grad_out.shape() != Shape{s.batch, 1, out_}) throw std::invalid_argument("Dense::backward: gradient shape mismatch");
    Tensor grad_in(s);
    for (std::size_t b = 0; b < s.batch; ++b) {
        const auto x = input_.item(b);
        const auto g = grad_out.row(b, 0);
        double* gi = grad_in.data().data() + b * in_;
        for (std::size_t j = 0; j < out_; ++j) {
            const double gj = g[j];
            grad_bias[j] += gj;
            double* gw = &grad_weight[j * in_];
            const double* w = &weight[j * in_];
            for (std::size_t f = 0; f < in_; ++f) {
                gw[f] += gj * x[f];
                gi[f] += gj * w[f];
            }
        }
    }
    return grad_in;
}

std::vector<ParamView> Dense::params() {
    return {{"fc.weight", weight, grad_weight}, {"fc.bias", bias, grad_bias}};
}

void Dense::zero_grad() {
    std::ranges::fill(grad_weight, 0.0);
    std::ranges::fill(grad_bias, 0.0);
}

// ---------------------------------------------------------------- loss

LossResult mse_loss(const Tensor& pred, const Tensor& target) {
    if (pred.shape() != target.shape()) {
        throw std::invalid_argument("mse_loss: prediction " + shape_str(pred.shape()) + " vs target " +
                                    shape_str(target.shape()));
    }
    const auto p = pred.data();
    const auto t = target.data();
    const double n = static_cast<double>(p.size());
    Tensor grad(pred.shape());
    auto g = grad.data();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - t[i];
        acc += d * d;
        g[i] = 2.0 * d / n;
    }
    return {acc / n, std::move(grad)};
}

}  // namespace ecglab::neural
