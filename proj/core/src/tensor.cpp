#include "recsearch/tensor.hpp"

#include <cmath>

#include "recsearch/errors.hpp"

namespace recsearch {

namespace {

std::size_t checked_size(const std::vector<std::size_t>& shape) {
    if (shape.empty() || shape.size() > 2)
        throw DimensionError("tensor must have 1 or 2 axes, got " + std::to_string(shape.size()));
    std::size_t n = 1;
    for (std::size_t e : shape) {
        if (e == 0) throw DimensionError("tensor extents must be positive");
        n *= e;
    }
    return n;
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    const std::size_t n = checked_size(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    const std::size_t n = checked_size(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> data) {
    const std::size_t n = checked_size(shape);
    if (n != data.size())
        throw DimensionError("tensor data length " + std::to_string(data.size()) +
                             " does not match shape product " + std::to_string(n));
    return Tensor(std::move(shape), std::move(data));
}

Tensor Tensor::vector(std::vector<double> data) {
    return from({data.size()}, std::move(data));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
    return from({rows, cols}, std::move(data));
}

Tensor Tensor::row_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<double> data;
    std::size_t ncols = rows.begin() == rows.end() ? 0 : rows.begin()->size();
    for (const auto& r : rows) {
        if (r.size() != ncols) throw DimensionError("row_matrix rows have unequal lengths");
        data.insert(data.end(), r.begin(), r.end());
    }
    return matrix(rows.size(), ncols, std::move(data));
}

Tensor Tensor::identity(std::size_t n) {
    Tensor t = zeros({n, n});
    for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
    return t;
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

}  // namespace recsearch
