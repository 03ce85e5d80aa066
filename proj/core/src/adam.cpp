#include "recsearch/adam.hpp"

#include <cmath>

namespace recsearch {

void adam_update(ParameterStore& params, const GradMap& grads, AdamState& state,
                 const AdamConfig& config) {
    state.t += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));

    for (auto& p : params.items()) {
        if (!p.trainable) continue;
        auto [it, inserted] = state.moments.try_emplace(p.id);
        if (inserted) {
            it->second.m = Tensor::zeros(p.tensor.shape());
            it->second.v = Tensor::zeros(p.tensor.shape());
        }
        Tensor& m = it->second.m;
        Tensor& v = it->second.v;
        const auto g_it = grads.find(p.id);
        const Tensor* g = g_it == grads.end() ? nullptr : &g_it->second;

        for (std::size_t i = 0; i < p.tensor.size(); ++i) {
            const double gi = g ? (*g)[i] : 0.0;
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * gi;
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * gi * gi;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p.tensor[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
    }
}

}  // namespace recsearch
