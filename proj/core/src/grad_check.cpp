#include "recsearch/grad_check.hpp"

#include <cmath>

#include "recsearch/errors.hpp"

namespace recsearch {

double grad_check(const ScalarFn& f, const std::vector<double>& x0,
                  const std::vector<double>& analytic_grad, double h) {
    if (analytic_grad.size() != x0.size())
        throw ContractError("grad_check: gradient length " +
                            std::to_string(analytic_grad.size()) + " vs point length " +
                            std::to_string(x0.size()));
    std::vector<double> x = x0;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = x0[i] + h;
        const double fp = f(x);
        x[i] = x0[i] - h;
        const double fm = f(x);
        x[i] = x0[i];
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NonFiniteError("grad_check: f is non-finite near coordinate " +
                                 std::to_string(i));
        const double numeric = (fp - fm) / (2.0 * h);
        const double denom = std::max(1.0, std::abs(analytic_grad[i]));
        max_rel = std::max(max_rel, std::abs(numeric - analytic_grad[i]) / denom);
    }
    return max_rel;
}

}  // namespace recsearch
