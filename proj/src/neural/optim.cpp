#include "ecglab/neural/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace ecglab::neural {

double gradient_norm(std::span<const ParamView> params) noexcept {
    double sq = 0.0;
    for (const auto& p : params) {
        for (double g : p.grad) sq += g * g;
    }
    return std::sqrt(sq);
}

double clip_gradients(std::span<const ParamView> params, double max_norm) noexcept {
    const double norm = gradient_norm(params);
    if (norm > max_norm && norm > 0.0) {
        const double k = max_norm / norm;
        for (const auto& p : params) {
            for (double& g : p.grad) g *= k;
        }
    }
    return norm;
}

void Adam::step(std::span<const ParamView> params) {
    for (const auto& p : params) {
        for (double g : p.grad) {
            if (!std::isfinite(g)) throw std::runtime_error("Adam: non-finite gradient in " + p.name);
        }
    }
    if (m_.empty()) {
        for (const auto& p : params) {
            m_.emplace_back(p.value.size(), 0.0);
            v_.emplace_back(p.value.size(), 0.0);
        }
    }
    if (m_.size() != params.size()) throw std::logic_error("Adam: parameter set changed between steps");
    ++t_;
    const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& m = m_[k];
        auto& v = v_[k];
        const auto& p = params[k];
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.grad[i];
            m[i] = opt_.beta1 * m[i] + (1.0 - opt_.beta1) * g;
            v[i] = opt_.beta2 * v[i] + (1.0 - opt_.beta2) * g * g;
            p.value[i] -= opt_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + opt_.epsilon);
        }
    }
}

}  // namespace ecglab::neural
