#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "recsearch/tensor.hpp"

namespace recsearch {

struct Parameter {
    std::string id;
    Tensor tensor;
    bool trainable = true;
};

// Ordered parameter collection. Iteration follows insertion order, which is
// block declaration order, so updates are deterministic.
class ParameterStore {
  public:
    void add(Parameter p);
    bool contains(const std::string& id) const { return index_.count(id) != 0; }
    Parameter& get(const std::string& id);
    const Parameter& get(const std::string& id) const;

    std::size_t size() const { return params_.size(); }
    std::size_t value_count() const;

    std::vector<Parameter>& items() { return params_; }
    const std::vector<Parameter>& items() const { return params_; }

    // Deep copy of all tensors (early-stopping snapshots).
    ParameterStore clone() const;
    void assign_values(const ParameterStore& other);

  private:
    std::vector<Parameter> params_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace recsearch
