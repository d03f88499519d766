#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ecglab/neural/layers.hpp"
#include "ecglab/neural/optim.hpp"
#include "ecglab/neural/tensor.hpp"
#include "ecglab/signal.hpp"

namespace ecglab::neural {

/// Architecture and training regime of the regression network:
/// input -> [conv -> batch-norm -> ReLU -> pool] x num_conv_layers -> dense.
struct CnnConfig {
    std::size_t input_len = 360;
    std::size_t num_conv_layers = 3;
    std::size_t filters_per_layer = 36;
    std::size_t kernel_len = 23;  ///< true 1-D kernel; a "K x K" or "K x 1" kernel maps to K
    std::size_t pool_stride = 4;
    PoolMode pool_mode = PoolMode::subsample;
    double learning_rate = 0.01;
    double grad_clip_norm = 1.0;
    std::size_t batch_size = 200;
    std::size_t epochs = 0;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on an even kernel or a zero size.
    void validate() const;

    /// Sequence length entering the dense layer.
    [[nodiscard]] std::size_t pooled_length() const noexcept;
};

/// Trained (or freshly initialized) network plus the per-position input mean
/// subtracted before the first convolution.
class CnnModel {
public:
    struct Block {
        Conv1d conv;
        BatchNorm1d bn;
        Relu relu;
        AvgPool1d pool;
    };

    /// Seeded initialization; input mean starts at zero.
    explicit CnnModel(const CnnConfig& config);

    /// (batch, 1, input_len) -> (batch, 1, input_len). Caches activations.
    Tensor forward(const Tensor& input, Mode mode);
    /// Accumulates parameter gradients; returns the gradient w.r.t. the raw input.
    Tensor backward(const Tensor& grad_out);

    /// Inference-mode forward pass that leaves the model untouched.
    [[nodiscard]] Tensor predict(const Tensor& input) const;

    std::vector<ParamView> params();
    void zero_grad();

    [[nodiscard]] const CnnConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::size_t parameter_count() const noexcept;

    std::vector<double> input_mean;
    std::vector<Block> blocks;
    Dense fc;

private:
    Tensor normalize(const Tensor& input) const;

    CnnConfig config_;
};

struct EpochStats {
    std::size_t epoch;  ///< 1-based
    double loss;        ///< sample-weighted mean mini-batch MSE
    double rms;         ///< sqrt(loss)
};

struct TrainResult {
    CnnModel model;
    std::vector<EpochStats> trace;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Stacks equal-length signals into a (count, 1, length) tensor.
Tensor stack(std::span<const Signal> signals);
Tensor stack(std::span<const Signal* const> signals);

/// Mini-batch Adam training with global gradient clipping. Batches are drawn
/// from a per-epoch seeded shuffle, so equal configs give bit-identical models.
/// The input mean comes from `noisy` only. Throws on length mismatch or a
/// non-finite loss.
TrainResult train(const CnnConfig& config, const Tensor& noisy, const Tensor& clean,
                  const EpochCallback& on_epoch = {});
TrainResult train(const CnnConfig& config, std::span<const Signal> noisy, std::span<const Signal> clean,
                  const EpochCallback& on_epoch = {});

/// Windows of input_len samples are denoised independently and joined back.
/// Throws unless the length is a whole multiple of input_len.
Signal denoise(const CnnModel& model, const Signal& noisy);
std::vector<Signal> denoise(const CnnModel& model, std::span<const Signal> noisy);

// Flat-binary model file: magic "CNN1", uint32 format version, the config
// block, then float64 LE parameter blocks (input mean; per conv block: kernel,
// bias, gamma, beta, running mean, running var; dense weight, dense bias).
void save(std::ostream& os, const CnnModel& model);
CnnModel load(std::istream& is);
void save(const std::filesystem::path& path, const CnnModel& model);
CnnModel load_model(const std::filesystem::path& path);

}  // namespace ecglab::neural
