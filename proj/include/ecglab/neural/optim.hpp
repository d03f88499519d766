#pragma once

#include <span>
#include <vector>

#include "ecglab/neural/layers.hpp"

namespace ecglab::neural {

/// Global L2 norm over every gradient block.
double gradient_norm(std::span<const ParamView> params) noexcept;

/// Rescales all gradients by max_norm / norm when the global norm exceeds
/// max_norm. Returns the norm measured before clipping.
double clip_gradients(std::span<const ParamView> params, double max_norm) noexcept;

struct AdamOptions {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected Adam. Moment buffers are created lazily on the first step
/// and matched to parameter blocks by position.
class Adam {
public:
    explicit Adam(AdamOptions options = {}) : opt_(options) {}

    /// Applies one update. Throws std::runtime_error on a non-finite gradient,
    /// leaving parameters untouched.
    void step(std::span<const ParamView> params);

    [[nodiscard]] long steps() const noexcept { return t_; }
    [[nodiscard]] const AdamOptions& options() const noexcept { return opt_; }
    [[nodiscard]] const std::vector<std::vector<double>>& first_moment() const noexcept { return m_; }
    [[nodiscard]] const std::vector<std::vector<double>>& second_moment() const noexcept { return v_; }

private:
    AdamOptions opt_;
    long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

}  // namespace ecglab::neural
