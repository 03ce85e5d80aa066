#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace recsearch {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor shapes incompatible with the requested primitive.
struct DimensionError : Error {
    using Error::Error;
};

// Embedding/row index outside the addressed table.
struct BoundsError : Error {
    using Error::Error;
};

// An operation received an empty input list.
struct ArityError : Error {
    using Error::Error;
};

// Dispatch by name hit a primitive the engine does not implement.
struct UnsupportedPrimitiveError : Error {
    using Error::Error;
};

// A primitive produced NaN/Inf; surfaced instead of propagated.
struct NonFiniteError : Error {
    using Error::Error;
};

// Bad user configuration (duplicate hyperparameter, invalid recipe, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Input data does not match the declared schema.
struct SchemaError : Error {
    using Error::Error;
};

// Input data has invalid values (non-binary label, ragged row, ...).
struct DataError : Error {
    using Error::Error;
};

// API misuse: a stated precondition was violated.
struct ContractError : Error {
    using Error::Error;
};

// Linear algebra gave up (Cholesky failure after jitter escalation, ...).
struct NumericalError : Error {
    using Error::Error;
};

// Graph validation failed; carries every violation found, not just the first.
struct GraphError : Error {
    explicit GraphError(std::vector<std::string> violations_)
        : Error(join(violations_)), violations(std::move(violations_)) {}

    std::vector<std::string> violations;

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "graph validation failed:";
        for (const auto& s : v) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }
};

// A concrete assignment could not be turned into a model.
struct MaterializeError : Error {
    using Error::Error;
};

}  // namespace recsearch
