#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recsearch/data.hpp"
#include "recsearch/hyperspace.hpp"
#include "recsearch/params.hpp"
#include "recsearch/tape.hpp"

namespace recsearch {

enum class BlockKind { kMapper, kInteractor, kHead };

// A mapper's bound feature column.
struct ColumnBinding {
    std::string column;
    std::size_t index = 0;       // into EncodedBatch.categorical or .dense
    std::size_t vocab_size = 0;  // categorical columns only
};

// One block in a graph: type, wiring and per-block domain overrides.
struct BlockInstance {
    std::string id;
    std::string type;
    std::vector<std::string> input_ids;          // upstream blocks (interactors/heads)
    std::vector<std::size_t> input_blocks;       // resolved graph indices
    std::vector<std::string> column_refs;        // mappers: names or $user/$item/$categorical/$dense
    std::vector<ColumnBinding> columns;          // mappers: resolved bindings
    std::map<std::string, HpDomain> hp_overrides;  // keyed by local hp name
};

// Raised by HpView when a requested value is not in the assignment; the
// validator uses it to tell "statically unknown" from "wrong".
struct HpUnresolved : Error {
    using Error::Error;
};

// Typed access to the resolved values of one block, names expanded as
// "<prefix><local>". HyperInteraction gives children a deeper prefix so the
// same block code serves both direct and dispatched use.
class HpView {
  public:
    HpView(const Assignment& a, std::string prefix) : a_(&a), prefix_(std::move(prefix)) {}

    bool has(std::string_view local) const;
    std::int64_t get_int(std::string_view local) const;
    double get_float(std::string_view local) const;
    const std::string& get_str(std::string_view local) const;
    HpView child(std::string_view segment) const;  // appends "segment_"

  private:
    const HpValue& raw(std::string_view local) const;
    const Assignment* a_;
    std::string prefix_;
};

// Declares "<block>/<local>" hyperparameters, applying per-block overrides
// and an optional activation condition (used for HyperInteraction children).
class HpDeclarer {
  public:
    HpDeclarer(HyperSpace& space, const std::map<std::string, HpDomain>& overrides,
               std::string block_prefix)
        : space_(&space), overrides_(&overrides), block_prefix_(std::move(block_prefix)) {}

    void declare(std::string_view local, HpDomain default_domain);
    HpDeclarer child(std::string_view segment, HyperParamDecl::Condition condition) const;
    const std::string& block_prefix() const { return block_prefix_; }

  private:
    HyperSpace* space_;
    const std::map<std::string, HpDomain>* overrides_;
    std::string block_prefix_;
    std::string local_prefix_;
    std::optional<HyperParamDecl::Condition> condition_;
};

enum class ParamInit { kNormalScaled, kZeros };  // Normal(0, 0.05^2) or zeros

struct ParamSpec {
    std::string id;
    std::vector<std::size_t> shape;
    ParamInit init = ParamInit::kNormalScaled;
};

class ParamDeclarer {
  public:
    ParamDeclarer(std::vector<ParamSpec>& out, std::string prefix)
        : out_(&out), prefix_(std::move(prefix)) {}

    void declare(std::string_view local, std::vector<std::size_t> shape, ParamInit init);

  private:
    std::vector<ParamSpec>* out_;
    std::string prefix_;
};

// Per-batch forward state. Parameter leaves are cached so a table consumed
// twice becomes one tape node.
struct ForwardContext {
    Tape& tape;
    const ParameterStore& params;
    const EncodedBatch& batch;
    std::unordered_map<std::string, NodeId> param_cache;

    NodeId param(const std::string& id);
};

// A block type: hyperparameter declarations, static shape rules, parameter
// declarations and the forward computation. Implementations are stateless
// singletons owned by the registry.
class BlockType {
  public:
    virtual ~BlockType() = default;
    virtual std::string_view name() const = 0;
    virtual BlockKind kind() const = 0;
    virtual void declare_hparams(const BlockInstance& block, HpDeclarer declarer) const = 0;
    // Validates inputs and returns one extent per output tensor. Heads
    // return {1} (the prediction column).
    virtual std::vector<std::size_t> output_dims(
        const BlockInstance& block, const HpView& hp,
        const std::vector<std::size_t>& input_dims) const = 0;
    virtual void declare_parameters(const BlockInstance& block, const HpView& hp,
                                    const std::vector<std::size_t>& input_dims,
                                    ParamDeclarer declarer) const = 0;
    // Heads return {prediction, loss}; everything else returns its
    // embedding set in wiring order.
    virtual std::vector<NodeId> forward(ForwardContext& ctx, const BlockInstance& block,
                                        const HpView& hp,
                                        const std::vector<NodeId>& inputs) const = 0;
};

const BlockType& block_type(std::string_view name);  // throws ConfigError on unknown
std::vector<std::string_view> block_type_names();

}  // namespace recsearch
