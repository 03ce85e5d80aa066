#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recsearch/tensor.hpp"

namespace recsearch {

using NodeId = std::size_t;

// Gradients keyed by parameter id. std::map keeps iteration deterministic.
using GradMap = std::map<std::string, Tensor>;

enum class Prim : std::uint8_t {
    kLeaf,          // constant or parameter input
    kMatmul,        // [m x k] . [k x n]
    kGather,        // table rows by integer index
    kAdd, kSub, kMul, kMax, kMin,
    kRelu, kSigmoid, kTanh,
    kScale,         // x * c, scalar constant c
    kConcatLast,
    kSliceLast,
    kReduceSumLast, kReduceMeanLast,
    kSoftmaxLast,
    kBiasAdd,       // [m x d] + row vector [d]
    kRowScale,      // [m x d] * per-row scalar [m x 1]
    kRowwiseDot,    // per-row dot of two [m x d] -> [m x 1]
    kReduceSumAll, kReduceMeanAll,
    kMseLoss,       // mean squared error vs constant targets
    kBceLoss,       // clipped binary cross entropy vs constant labels
};

// Reverse-mode tape over a closed primitive set. Every recorded application
// checks its output for NaN/Inf and throws NonFiniteError instead of letting
// bad values propagate. Nodes are append-only and topologically ordered by
// construction.
class Tape {
  public:
    struct Node {
        Prim prim;
        std::vector<NodeId> inputs;
        Tensor value;
        // Per-primitive saved state (only the relevant members are used).
        std::vector<std::int64_t> indices;  // kGather
        double scalar = 0.0;                // kScale constant
        std::size_t offset = 0, extent = 0; // kSliceLast
        Tensor aux;                         // loss targets/labels
        std::string param_id;               // kLeaf parameters
        bool trainable = false;
    };

    // Leaves ------------------------------------------------------------
    NodeId constant(Tensor value);
    NodeId parameter(std::string id, Tensor value, bool trainable = true);

    // Primitives ----------------------------------------------------------
    NodeId matmul(NodeId a, NodeId b);
    NodeId gather(NodeId table, std::vector<std::int64_t> indices);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId max(NodeId a, NodeId b);
    NodeId min(NodeId a, NodeId b);
    NodeId relu(NodeId x);
    NodeId sigmoid(NodeId x);
    NodeId tanh(NodeId x);
    NodeId scale(NodeId x, double c);
    NodeId concat_last(std::span<const NodeId> xs);
    NodeId slice_last(NodeId x, std::size_t offset, std::size_t extent);
    NodeId reduce_sum_last(NodeId x);
    NodeId reduce_mean_last(NodeId x);
    NodeId softmax_last(NodeId x);
    NodeId bias_add(NodeId x, NodeId bias);
    NodeId row_scale(NodeId x, NodeId per_row);
    NodeId rowwise_dot(NodeId a, NodeId b);
    NodeId reduce_sum_all(NodeId x);
    NodeId reduce_mean_all(NodeId x);
    NodeId mse_loss(NodeId predictions, Tensor targets);
    NodeId bce_loss(NodeId probabilities, Tensor labels);

    // Name dispatch used by the block layer and the config surface.
    // Unknown names raise UnsupportedPrimitiveError.
    NodeId pointwise(std::string_view name, std::span<const NodeId> inputs, double c = 0.0);
    NodeId shape_op(std::string_view name, std::span<const NodeId> inputs);

    // Reverse sweep from a scalar loss node. Returns d loss / d parameter for
    // every trainable parameter leaf reachable from the loss.
    GradMap backprop(NodeId loss) const;

    const Tensor& value(NodeId id) const { return nodes_[id].value; }
    std::size_t size() const { return nodes_.size(); }
    const Node& node(NodeId id) const { return nodes_[id]; }

    // Clipping applied inside bce_loss; exposed for the evaluation path so
    // full-split scores use the identical definition.
    static constexpr double kProbClip = 1e-7;

  private:
    NodeId push(Node node);
    const Tensor& val(NodeId id) const { return nodes_[id].value; }

    std::vector<Node> nodes_;
};

}  // namespace recsearch
