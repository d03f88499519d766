#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ecglab/signal.hpp"

namespace ecglab::rbm {

/// Bipartite energy model. `weights` is n_visible x n_hidden, row-major.
struct RbmParams {
    std::size_t n_visible = 0;
    std::size_t n_hidden = 0;
    std::vector<double> weights;
    std::vector<double> visible_bias;  ///< a
    std::vector<double> hidden_bias;   ///< b

    RbmParams() = default;
    RbmParams(std::size_t visible, std::size_t hidden);

    [[nodiscard]] double w(std::size_t v, std::size_t h) const noexcept { return weights[v * n_hidden + h]; }
    [[nodiscard]] double& w(std::size_t v, std::size_t h) noexcept { return weights[v * n_hidden + h]; }

    /// Same machine with the layers swapped (weights transposed, biases exchanged).
    [[nodiscard]] RbmParams transposed() const;
};

double sigmoid(double x) noexcept;

/// E(v, h) = -sum a_k v_k - sum b_m h_m - sum v_k h_m w_km.
double energy(const RbmParams& p, std::span<const double> visible, std::span<const double> hidden);

/// P(h_s = 1 | v) = sigmoid(b_s + sum_t v_t w_ts).
std::vector<double> hidden_given_visible(const RbmParams& p, std::span<const double> visible);

/// sigmoid(a_t + sum_s h_s w_ts). For real-valued data this mean is the reconstruction.
std::vector<double> visible_given_hidden(const RbmParams& p, std::span<const double> hidden);

/// exp(-E(v, h)) / Z with Z summed over every binary (v, h) pair.
/// Only for n_visible + n_hidden <= 20.
double joint_probability(const RbmParams& p, std::span<const double> visible, std::span<const double> hidden);

/// log Z by exhaustive enumeration (same size limit), computed stably.
double log_partition(const RbmParams& p);

struct TrainConfig {
    std::size_t n_hidden = 64;
    double learning_rate = 0.01;
    std::size_t epochs = 20;
    std::size_t batch_size = 10;
    std::uint64_t seed = 0;
};

/// Mean squared reconstruction error (one up-down pass) over a data set.
double reconstruction_error(const RbmParams& p, std::span<const std::vector<double>> data);

using EpochCallback = std::function<void(std::size_t epoch, double reconstruction_error)>;

/// Contrastive divergence with one Gibbs step: hidden states are sampled from
/// their conditional, visibles stay at their mean-field probabilities.
/// Every value must lie in [0, 1] (1e-9 slack) or std::invalid_argument is thrown.
RbmParams train_cd1(std::span<const std::vector<double>> data, const TrainConfig& config,
                    const EpochCallback& on_epoch = {});

/// visible -> hidden means -> visible means.
std::vector<double> reconstruct(const RbmParams& p, std::span<const double> visible);

/// Trained machine plus the affine map taking millivolts into [0, 1].
struct RbmDenoiser {
    RbmParams params;
    ScaleRecord scale;
};

/// Fits a shared [0, 1] scaling to the clean windows, then trains on them.
RbmDenoiser fit_denoiser(std::span<const Signal> clean_windows, const TrainConfig& config,
                         const EpochCallback& on_epoch = {});

/// Scales (clamping into [0, 1]), reconstructs in one up-down pass, and maps
/// back to millivolts. Throws unless the length equals n_visible.
Signal denoise_rbm(const RbmDenoiser& model, const Signal& noisy);

// "RBM1" file: magic, uint32 version, uint32 n_visible, uint32 n_hidden, then
// float64 LE scale record (src_min, src_max, lo, hi), weights, visible bias,
// hidden bias.
void save(std::ostream& os, const RbmDenoiser& model);
RbmDenoiser load(std::istream& is);
void save(const std::filesystem::path& path, const RbmDenoiser& model);
RbmDenoiser load_model(const std::filesystem::path& path);

}  // namespace ecglab::rbm
