#include "ecglab/neural/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ecglab::neural {

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(shape), data_(std::move(values)) {
    if (data_.size() != shape_.count()) {
        throw std::invalid_argument("Tensor: " + std::to_string(data_.size()) + " values for shape of " +
                                    std::to_string(shape_.count()));
    }
}

void Tensor::require_finite(const char* where) const {
    for (double v : data_) {
        if (!std::isfinite(v)) throw std::runtime_error(std::string("non-finite value in ") + where);
    }
}

}  // namespace ecglab::neural
