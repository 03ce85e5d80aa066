#include "recsearch/params.hpp"

#include "recsearch/errors.hpp"

namespace recsearch {

void ParameterStore::add(Parameter p) {
    if (contains(p.id)) throw ConfigError("duplicate parameter id '" + p.id + "'");
    index_.emplace(p.id, params_.size());
    params_.push_back(std::move(p));
}

Parameter& ParameterStore::get(const std::string& id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw ContractError("unknown parameter id '" + id + "'");
    return params_[it->second];
}

const Parameter& ParameterStore::get(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ContractError("unknown parameter id '" + id + "'");
    return params_[it->second];
}

std::size_t ParameterStore::value_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.tensor.size();
    return n;
}

ParameterStore ParameterStore::clone() const {
    return *this;  // members are value types
}

void ParameterStore::assign_values(const ParameterStore& other) {
    for (auto& p : params_) p.tensor = other.get(p.id).tensor;
}

}  // namespace recsearch
