#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ecglab::neural {

struct Shape {
    std::size_t batch = 0;
    std::size_t channels = 0;
    std::size_t length = 0;

    [[nodiscard]] std::size_t count() const noexcept { return batch * channels * length; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense (batch, channels, length) array, row-major with length fastest.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0) : shape_(shape), data_(shape.count(), fill) {}
    Tensor(Shape shape, std::vector<double> values);

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] double& at(std::size_t b, std::size_t c, std::size_t i) noexcept {
        return data_[(b * shape_.channels + c) * shape_.length + i];
    }
    [[nodiscard]] double at(std::size_t b, std::size_t c, std::size_t i) const noexcept {
        return data_[(b * shape_.channels + c) * shape_.length + i];
    }

    /// One channel of one batch item.
    [[nodiscard]] std::span<double> row(std::size_t b, std::size_t c) noexcept {
        return {data_.data() + (b * shape_.channels + c) * shape_.length, shape_.length};
    }
    [[nodiscard]] std::span<const double> row(std::size_t b, std::size_t c) const noexcept {
        return {data_.data() + (b * shape_.channels + c) * shape_.length, shape_.length};
    }

    /// All channels of one batch item, contiguous.
    [[nodiscard]] std::span<const double> item(std::size_t b) const noexcept {
        const std::size_t n = shape_.channels * shape_.length;
        return {data_.data() + b * n, n};
    }

    /// Throws std::runtime_error naming `where` if any value is NaN or infinite.
    void require_finite(const char* where) const;

private:
    Shape shape_{};
    std::vector<double> data_;
};

}  // namespace ecglab::neural
