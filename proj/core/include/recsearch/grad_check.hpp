#pragma once

#include <functional>
#include <vector>

#include "recsearch/tensor.hpp"

namespace recsearch {

// A scalar function of a flat parameter vector. Implementations typically
// rebuild a Tape at the given point and return the loss value.
using ScalarFn = std::function<double(const std::vector<double>&)>;

// Compares an analytic gradient against central finite differences
// (f(x+h) - f(x-h)) / 2h, coordinate by coordinate. Relative error uses a
// max(1, |analytic|) denominator. Throws NonFiniteError if f evaluates to a
// non-finite value anywhere in the h-neighborhood.
double grad_check(const ScalarFn& f, const std::vector<double>& x0,
                  const std::vector<double>& analytic_grad, double h = 1e-5);

}  // namespace recsearch
