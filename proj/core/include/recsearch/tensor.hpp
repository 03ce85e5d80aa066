#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace recsearch {

// Dense 64-bit float array, row-major, 1 axis (vector) or 2 axes
// (batch x features). Values are plain data; differentiation happens on the
// Tape, which treats tensors as immutable once recorded.
class Tensor {
  public:
    Tensor() = default;

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor full(std::vector<std::size_t> shape, double value);
    static Tensor from(std::vector<std::size_t> shape, std::vector<double> data);
    static Tensor vector(std::vector<double> data);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    static Tensor row_matrix(std::initializer_list<std::initializer_list<double>> rows);
    static Tensor identity(std::size_t n);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t ndim() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    // Rows/cols of the 2-axis view; a vector is treated as a single row.
    std::size_t rows() const { return shape_.size() == 2 ? shape_[0] : 1; }
    std::size_t cols() const { return shape_.size() == 2 ? shape_[1] : shape_.empty() ? 0 : shape_[0]; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }
    const double* raw() const { return data_.data(); }
    double* raw() { return data_.data(); }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

    std::string shape_str() const;

  private:
    Tensor(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {}

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

}  // namespace recsearch
