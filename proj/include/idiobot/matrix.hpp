#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace idiobot {

/// Raised when operands disagree in shape or an index is out of range.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produces a non-finite value.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles. Rows index antibodies, columns antigens.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw StructuralError("matrix data size does not match " +
                                  std::to_string(rows_) + "x" + std::to_string(cols_));
        }
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace idiobot
