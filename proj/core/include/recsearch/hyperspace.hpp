#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "recsearch/rng.hpp"

namespace recsearch {

// One hyperparameter value. Strings cover categorical choices like
// interactor type names.
using HpValue = std::variant<bool, std::int64_t, double, std::string>;

std::string hp_to_string(const HpValue& v);
bool hp_equal(const HpValue& a, const HpValue& b);

// Concrete binding of every *active* hyperparameter.
using Assignment = std::map<std::string, HpValue>;

// Canonical "name=value" lines, sorted by name; doubles use shortest
// round-trip formatting. Used for dedup fingerprints and trial logs.
std::string canonical_text(const Assignment& a);

struct ChoiceDomain {
    std::vector<HpValue> values;
};
struct IntRangeDomain {
    std::int64_t lo = 0, hi = 0, step = 1;
};
struct FloatRangeDomain {
    double lo = 0.0, hi = 0.0;
    bool log_scale = false;
};
struct BoolDomain {};
struct FixedDomain {
    HpValue value;
};

using HpDomain =
    std::variant<ChoiceDomain, IntRangeDomain, FloatRangeDomain, BoolDomain, FixedDomain>;

struct HyperParamDecl {
    std::string name;  // globally unique, "blockId/param"
    HpDomain domain;
    // Active only when the parent hyperparameter holds this exact value.
    struct Condition {
        std::string parent;
        HpValue required;
    };
    std::optional<Condition> condition;
};

// Ordered set of declarations. Declaration order is iteration order, and
// condition parents must precede their children.
class HyperSpace {
  public:
    void declare(HyperParamDecl decl);

    const std::vector<HyperParamDecl>& decls() const { return decls_; }
    bool contains(const std::string& name) const;
    const HyperParamDecl& decl(const std::string& name) const;

    // Replace the domain of an existing declaration (config overrides).
    void override_domain(const std::string& name, HpDomain domain);

    bool is_active(const HyperParamDecl& decl, const Assignment& partial) const;

    // Independent uniform draw per active hyperparameter, resolving
    // conditions in declaration order. Log-scaled floats draw uniformly in
    // the log domain.
    Assignment sample(Rng& rng) const;

    // Draw a fresh value for one declaration.
    HpValue sample_value(const HyperParamDecl& decl, Rng& rng) const;

    // Number of coordinates vectorize() produces; constant per space.
    std::size_t vector_width() const;

    // Fixed-width real encoding: Choice -> one-hot, Int/Float -> min-max
    // normalized (log first when log-scaled), Bool -> {0,1}, Fixed -> no
    // slots. Inactive hyperparameters encode as 0.5 everywhere.
    std::vector<double> vectorize(const Assignment& a) const;

    // True when a value lies inside the declared domain.
    bool in_domain(const HyperParamDecl& decl, const HpValue& v) const;

  private:
    std::vector<HyperParamDecl> decls_;
    std::map<std::string, std::size_t> index_;
};

}  // namespace recsearch
