#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "recsearch/params.hpp"
#include "recsearch/tape.hpp"

namespace recsearch {

// Per-parameter Adam moments plus a shared step counter. Moments start at
// zero and are created lazily on first sight of a parameter.
struct AdamState {
    struct Moments {
        Tensor m;
        Tensor v;
    };
    std::map<std::string, Moments> moments;
    std::uint64_t t = 0;
};

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Bias-corrected Adam step over every trainable parameter in the store.
// Parameters without a gradient entry are treated as having zero gradient.
void adam_update(ParameterStore& params, const GradMap& grads, AdamState& state,
                 const AdamConfig& config);

}  // namespace recsearch
