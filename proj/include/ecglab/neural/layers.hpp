#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecglab/neural/tensor.hpp"

namespace ecglab::neural {

enum class Mode { train, inference };

/// A trainable parameter block and its accumulated gradient.
struct ParamView {
    std::string name;
    std::span<double> value;
    std::span<double> grad;
};

/// Stride-1 convolution with "same" zero padding of (kernel-1)/2 per side.
/// Weights laid out (out_channels, in_channels, kernel).
class Conv1d {
public:
    Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel);

    /// Uniform on [-1/sqrt(fan_in), 1/sqrt(fan_in)]; bias zero.
    void init(std::uint64_t seed);

    /// Caches the input for `backward`.
    Tensor forward(const Tensor& input);
    [[nodiscard]] Tensor apply(const Tensor& input) const;
    /// Accumulates parameter gradients and returns the input gradient.
    Tensor backward(const Tensor& grad_out);

    std::vector<ParamView> params();
    void zero_grad();

    [[nodiscard]] std::size_t in_channels() const noexcept { return in_; }
    [[nodiscard]] std::size_t out_channels() const noexcept { return out_; }
    [[nodiscard]] std::size_t kernel() const noexcept { return k_; }

    std::vector<double> weight, bias, grad_weight, grad_bias;

private:
    std::size_t in_, out_, k_;
    Tensor input_;
};

/// Per-channel normalization over (batch, length) with learnable scale/shift.
/// Train mode uses batch statistics and updates the running averages as
/// running = momentum * running + (1 - momentum) * batch (unbiased variance);
/// inference mode uses the running averages.
class BatchNorm1d {
public:
    explicit BatchNorm1d(std::size_t channels, double momentum = 0.9, double eps = 1e-5);

    Tensor forward(const Tensor& input, Mode mode);
    /// Inference-mode normalization without touching caches.
    [[nodiscard]] Tensor apply(const Tensor& input) const;
    Tensor backward(const Tensor& grad_out);

    std::vector<ParamView> params();
    void zero_grad();

    [[nodiscard]] std::size_t channels() const noexcept { return gamma.size(); }

    std::vector<double> gamma, beta, running_mean, running_var, grad_gamma, grad_beta;
    double momentum, eps;

private:
    Mode mode_ = Mode::train;
    Tensor xhat_;
    std::vector<double> inv_std_;
};

/// max(0, x); the gradient at exactly 0 is taken as 0.
class Relu {
public:
    Tensor forward(const Tensor& input);
    [[nodiscard]] static Tensor apply(const Tensor& input);
    Tensor backward(const Tensor& grad_out) const;

private:
    Tensor input_;
};

enum class PoolMode {
    subsample,  ///< window of one sample: keeps positions 0, stride, 2*stride, ...
    mean        ///< averages each stride-wide block (last block may be short)
};

/// Average pooling with output length ceil(length / stride).
class AvgPool1d {
public:
    explicit AvgPool1d(std::size_t stride, PoolMode mode = PoolMode::subsample) : stride_(stride), mode_(mode) {}

    Tensor forward(const Tensor& input);
    [[nodiscard]] Tensor apply(const Tensor& input) const;
    Tensor backward(const Tensor& grad_out) const;

    [[nodiscard]] std::size_t stride() const noexcept { return stride_; }
    [[nodiscard]] PoolMode mode() const noexcept { return mode_; }
    [[nodiscard]] static std::size_t output_length(std::size_t length, std::size_t stride) noexcept {
        return (length + stride - 1) / stride;
    }

private:
    std::size_t stride_;
    PoolMode mode_;
    Shape in_shape_{};
};

/// Flattens (channels, length) and maps it to `out_features` outputs,
/// returned as shape (batch, 1, out_features). Weights laid out (out, in).
class Dense {
public:
    Dense(std::size_t in_features, std::size_t out_features);

    void init(std::uint64_t seed);

    Tensor forward(const Tensor& input);
    [[nodiscard]] Tensor apply(const Tensor& input) const;
    Tensor backward(const Tensor& grad_out);

    std::vector<ParamView> params();
    void zero_grad();

    [[nodiscard]] std::size_t in_features() const noexcept { return in_; }
    [[nodiscard]] std::size_t out_features() const noexcept { return out_; }

    std::vector<double> weight, bias, grad_weight, grad_bias;

private:
    std::size_t in_, out_;
    Tensor input_;
};

struct LossResult {
    double loss;
    Tensor grad;
};

/// Mean over every (batch, channel, position) of the squared error; the
/// gradient is 2 (pred - target) / count.
LossResult mse_loss(const Tensor& pred, const Tensor& target);

}  // namespace ecglab::neural
