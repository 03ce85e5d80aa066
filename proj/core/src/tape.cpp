#include "recsearch/tape.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

#include "recsearch/errors.hpp"

namespace recsearch {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatRM>;
using MapCM = Eigen::Map<const MatRM>;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        throw DimensionError(std::string(op) + ": shapes " + a.shape_str() + " and " +
                             b.shape_str() + " differ");
}

void require_matrix(const Tensor& t, const char* op) {
    if (t.ndim() != 2)
        throw DimensionError(std::string(op) + ": expected 2-axis tensor, got " + t.shape_str());
}

}  // namespace

NodeId Tape::push(Node node) {
    if (!node.value.all_finite())
        throw NonFiniteError("primitive produced a non-finite value (node " +
                             std::to_string(nodes_.size()) + ")");
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
}

NodeId Tape::constant(Tensor value) {
    Node n;
    n.prim = Prim::kLeaf;
    n.value = std::move(value);
    return push(std::move(n));
}

NodeId Tape::parameter(std::string id, Tensor value, bool trainable) {
    Node n;
    n.prim = Prim::kLeaf;
    n.value = std::move(value);
    n.param_id = std::move(id);
    n.trainable = trainable;
    return push(std::move(n));
}

NodeId Tape::matmul(NodeId a, NodeId b) {
    const Tensor& A = val(a);
    const Tensor& B = val(b);
    require_matrix(A, "matmul");
    require_matrix(B, "matmul");
    if (A.cols() != B.rows())
        throw DimensionError("matmul: inner extents differ, " + A.shape_str() + " x " +
                             B.shape_str());
    Tensor out = Tensor::zeros({A.rows(), B.cols()});
    MapM(out.raw(), out.rows(), out.cols()).noalias() =
        MapCM(A.raw(), A.rows(), A.cols()) * MapCM(B.raw(), B.rows(), B.cols());
    Node n;
    n.prim = Prim::kMatmul;
    n.inputs = {a, b};
    n.value = std::move(out);
    return push(std::move(n));
}

NodeId Tape::gather(NodeId table, std::vector<std::int64_t> indices) {
    const Tensor& T = val(table);
    require_matrix(T, "gather");
    const std::size_t v = T.rows(), d = T.cols();
    Tensor out = Tensor::zeros({indices.size(), d});
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::int64_t ix = indices[i];
        if (ix < 0 || static_cast<std::size_t>(ix) >= v)
            throw BoundsError("gather: index " + std::to_string(ix) + " at row " +
                              std::to_string(i) + " outside table of " + std::to_string(v) +
                              " rows");
        std::copy_n(T.raw() + static_cast<std::size_t>(ix) * d, d, out.raw() + i * d);
    }
    Node n;
    n.prim = Prim::kGather;
    n.inputs = {table};
    n.value = std::move(out);
    n.indices = std::move(indices);
    return push(std::move(n));
}

namespace {

Tensor binary_eval(Prim p, const Tensor& a, const Tensor& b) {
    Tensor out = Tensor::zeros(a.shape());
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        switch (p) {
            case Prim::kAdd: out[i] = a[i] + b[i]; break;
            case Prim::kSub: out[i] = a[i] - b[i]; break;
            case Prim::kMul: out[i] = a[i] * b[i]; break;
            case Prim::kMax: out[i] = a[i] >= b[i] ? a[i] : b[i]; break;
            case Prim::kMin: out[i] = a[i] <= b[i] ? a[i] : b[i]; break;
            default: break;
        }
    }
    return out;
}

}  // namespace

NodeId Tape::add(NodeId a, NodeId b) {
    require_same_shape(val(a), val(b), "add");
    Node n;
    n.prim = Prim::kAdd;
    n.inputs = {a, b};
    n.value = binary_eval(Prim::kAdd, val(a), val(b));
    return push(std::move(n));
}

NodeId Tape::sub(NodeId a, NodeId b) {
    require_same_shape(val(a), val(b), "sub");
    Node n;
    n.prim = Prim::kSub;
    n.inputs = {a, b};
    n.value = binary_eval(Prim::kSub, val(a), val(b));
    return push(std::move(n));
}

NodeId Tape::mul(NodeId a, NodeId b) {
    require_same_shape(val(a), val(b), "mul");
    Node n;
    n.prim = Prim::kMul;
    n.inputs = {a, b};
    n.value = binary_eval(Prim::kMul, val(a), val(b));
    return push(std::move(n));
}

NodeId Tape::max(NodeId a, NodeId b) {
    require_same_shape(val(a), val(b), "max");
    Node n;
    n.prim = Prim::kMax;
    n.inputs = {a, b};
    n.value = binary_eval(Prim::kMax, val(a), val(b));
    return push(std::move(n));
}

NodeId Tape::min(NodeId a, NodeId b) {
    require_same_shape(val(a), val(b), "min");
    Node n;
    n.prim = Prim::kMin;
    n.inputs = {a, b};
    n.value = binary_eval(Prim::kMin, val(a), val(b));
    return push(std::move(n));
}

NodeId Tape::relu(NodeId x) {
    const Tensor& X = val(x);
    Tensor out = Tensor::zeros(X.shape());
    for (std::size_t i = 0; i < X.size(); ++i) out[i] = X[i] > 0.0 ? X[i] : 0.0;
    Node n;
    n.prim = Prim::kRelu;
    n.inputs = {x};
    n.value = std::move(out);
    return push(std::move(n));
}

NodeId Tape::sigmoid(NodeId x) {
    const Tensor& X = val(x);
    Tensor out = Tensor::zeros(X.shape());
    for (std::size_t i = 0; i < X.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-X[i]));
    Node n;
    n.prim = Prim::kSigmoid;
    n.inputs = {x};
    n.value = std::move(out);
    return push(std::move(n));
}

NodeId Tape::tanh(NodeId x) {
    const Tensor& X = val(x);
    Tensor out = Tensor::zeros(X.shape());
    for (std::size_t i = 0; i < X.size(); ++i) out[i] = std::tanh(X[i]);
    Node n;
    n.prim = Prim::kTanh;
    n.inputs = {x};
    n.value = std::move(out);
    return push(std::move(n));
}

NodeId Tape::scale(NodeId x, double c) {
    const Tensor& X = val(x);
    Tensor out = Tensor::zeros(X.shape());
    for (std::size_t i = 0; i < X.size(); ++i) out[i] = X[i] * c;
    Node n;
    n.prim = Prim::kScale;
    n.inputs = {x};
    n.value = std::move(out);
    n.scalar = c;
    return push(std::move(n));
}

NodeId Tape::concat_last(std::span<const NodeId> xs) {
    if (xs.empty()) throw ArityError("concat_last: empty input list");
    if (xs.size() == 1) return xs[0];
    const std::size_t ndim = val(xs[0]).ndim();
    std::size_t total = 0;
    const std::size_t rows = val(xs[0]).rows();
    for (NodeId id : xs) {
        const Tensor& t = val(id);
        if (t.ndim() != ndim)
            throw DimensionError("concat_last: mixed 1- and 2-axis inputs");
        if (ndim == 2 && t.rows() != rows)
            throw DimensionError("concat_last: batch extents differ, " +
                                 val(xs[0]).shape_str() + " vs " + t.shape_str());
        total += t.cols();
    }
    Tensor out = ndim == 2 ? Tensor::zeros({rows, total}) : Tensor::zeros({total});
    std::size_t off = 0;
    for (NodeId id : xs) {
        const Tensor& t = val(id);
        const std::size_t d = t.cols();
        for (std::size_t r = 0; r < rows; ++r)
            std::copy_n(t.raw() + r * d, d, out.raw() + r * total + off);
        off += d;
    }
    Node n;
    n.prim = Prim::kConcatLast;
    n.inputs.assign(xs.begin(), xs.end());
    n.value = std::move(out);
    return push(std::move(n));
}

NodeId Tape::slice_last(NodeId x, std::size_t offset, std::size_t extent) {
    const Tensor& X = val(x);
    const std::size_t d = X.cols();
    if (extent == 0 || offset + extent > d)
        throw DimensionError("slice_last: range [" + std::to_string(offset) + ", " +
                             std::to_string(offset + extent) + ") outside " + X.shape_str());
    const std::size_t rows = X.rows();
    Tensor out = X.ndim() == 2 ? Tensor::zeros({rows, extent}) : Tensor::zeros({extent});
    for (std::size_t r = 0; r < rows; ++r)
        std::copy_n(X.raw() + r * d + offset, extent, out.raw() + r * extent);
    Node n;
    n.prim = Prim::kSliceLast;
    n.inputs = {x};
    n.value = std::move(out);
    n.offset = offset;
    n.extent = extent;
    return push(std::move(n));
}

NodeId Tape::reduce_sum_last(NodeId x) {
    const Tensor& X = val(x);
    const std::size_t rows = X.rows(), d = X.cols();
    Tensor out = X.ndim() == 2 ? Tensor::zeros({rows, 1}) : Tensor::zeros({1});
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += X.at(r, c);
        out[r] = s;
    }
    Node n;
    n.prim = Prim::kReduceSumLast;
    n.inputs = {x};
    n.value = std::move(out);
    return push(std::move(n));
}

NodeId Tape::reduce_mean_last(NodeId x) {
    NodeId s = reduce_sum_last(x);
    // Recorded as sum followed by scale; gradient composes for free.
    return scale(s, 1.0 / static_cast<double>(val(x).cols()));
}

NodeId Tape::softmax_last(NodeId x) {
    const Tensor& X = val(x);
    const std::size_t rows = X.rows(), d = X.cols();
    Tensor out = Tensor::zeros(X.shape());
    for (std::size_t r = 0; r < rows; ++r) {
        double m = X.at(r, 0);
        for (std::size_t c = 1; c < d; ++c) m = std::max(m, X.at(r, c));
        double z = 0.0;
        for (std::size_t c = 0; c < d; ++c) z += std::exp(X.at(r, c) - m);
        for (std::size_t c = 0; c < d; ++c) out.raw()[r * d + c] = std::exp(X.at(r, c) - m) / z;
    }
    Node n;
    n.prim = Prim::kSoftmaxLast;
    n.inputs = {x};
    n.value = std::move(out);
    return push(std::move(n));
}

NodeId Tape::bias_add(NodeId x, NodeId bias) {
    const Tensor& X = val(x);
    const Tensor& B = val(bias);
    require_matrix(X, "bias_add");
    if (B.ndim() != 1 || B.size() != X.cols())
        throw DimensionError("bias_add: bias " + B.shape_str() + " does not match " +
                             X.shape_str());
    Tensor out = Tensor::zeros(X.shape());
    const std::size_t rows = X.rows(), d = X.cols();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < d; ++c) out.raw()[r * d + c] = X.at(r, c) + B[c];
    Node n;
    n.prim = Prim::kBiasAdd;
    n.inputs = {x, bias};
    n.value = std::move(out);
    return push(std::move(n));
}

NodeId Tape::row_scale(NodeId x, NodeId per_row) {
    const Tensor& X = val(x);
    const Tensor& S = val(per_row);
    require_matrix(X, "row_scale");
    if (S.ndim() != 2 || S.cols() != 1 || S.rows() != X.rows())
        throw DimensionError("row_scale: scales " + S.shape_str() + " must be [" +
                             std::to_string(X.rows()) + "x1]");
    Tensor out = Tensor::zeros(X.shape());
    const std::size_t rows = X.rows(), d = X.cols();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < d; ++c) out.raw()[r * d + c] = X.at(r, c) * S[r];
    Node n;
    n.prim = Prim::kRowScale;
    n.inputs = {x, per_row};
    n.value = std::move(out);
    return push(std::move(n));
}

NodeId Tape::rowwise_dot(NodeId a, NodeId b) {
    const Tensor& A = val(a);
    const Tensor& B = val(b);
    require_matrix(A, "rowwise_dot");
    require_same_shape(A, B, "rowwise_dot");
    const std::size_t rows = A.rows(), d = A.cols();
    Tensor out = Tensor::zeros({rows, 1});
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += A.at(r, c) * B.at(r, c);
        out[r] = s;
    }
    Node n;
    n.prim = Prim::kRowwiseDot;
    n.inputs = {a, b};
    n.value = std::move(out);
    return push(std::move(n));
}

NodeId Tape::reduce_sum_all(NodeId x) {
    const Tensor& X = val(x);
    double s = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) s += X[i];
    Node n;
    n.prim = Prim::kReduceSumAll;
    n.inputs = {x};
    n.value = Tensor::vector({s});
    return push(std::move(n));
}

NodeId Tape::reduce_mean_all(NodeId x) {
    NodeId s = reduce_sum_all(x);
    return scale(s, 1.0 / static_cast<double>(val(x).size()));
}

NodeId Tape::mse_loss(NodeId predictions, Tensor targets) {
    const Tensor& P = val(predictions);
    if (P.size() != targets.size())
        throw DimensionError("mse_loss: predictions " + P.shape_str() + " vs targets " +
                             targets.shape_str());
    double s = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double d = P[i] - targets[i];
        s += d * d;
    }
    Node n;
    n.prim = Prim::kMseLoss;
    n.inputs = {predictions};
    n.value = Tensor::vector({s / static_cast<double>(P.size())});
    n.aux = std::move(targets);
    return push(std::move(n));
}

NodeId Tape::bce_loss(NodeId probabilities, Tensor labels) {
    const Tensor& P = val(probabilities);
    if (P.size() != labels.size())
        throw DimensionError("bce_loss: probabilities " + P.shape_str() + " vs labels " +
                             labels.shape_str());
    double s = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double y = labels[i];
        if (y != 0.0 && y != 1.0)
            throw DataError("bce_loss: label at position " + std::to_string(i) +
                            " is not binary: " + std::to_string(y));
        const double p = std::clamp(P[i], kProbClip, 1.0 - kProbClip);
        s -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    }
    Node n;
    n.prim = Prim::kBceLoss;
    n.inputs = {probabilities};
    n.value = Tensor::vector({s / static_cast<double>(P.size())});
    n.aux = std::move(labels);
    return push(std::move(n));
}

NodeId Tape::pointwise(std::string_view name, std::span<const NodeId> inputs, double c) {
    auto want = [&](std::size_t k) {
        if (inputs.size() != k)
            throw ArityError("pointwise " + std::string(name) + ": expected " +
                             std::to_string(k) + " inputs, got " + std::to_string(inputs.size()));
    };
    if (name == "add") { want(2); return add(inputs[0], inputs[1]); }
    if (name == "sub") { want(2); return sub(inputs[0], inputs[1]); }
    if (name == "mul") { want(2); return mul(inputs[0], inputs[1]); }
    if (name == "max") { want(2); return max(inputs[0], inputs[1]); }
    if (name == "min") { want(2); return min(inputs[0], inputs[1]); }
    if (name == "relu") { want(1); return relu(inputs[0]); }
    if (name == "sigmoid") { want(1); return sigmoid(inputs[0]); }
    if (name == "tanh") { want(1); return tanh(inputs[0]); }
    if (name == "scale") { want(1); return scale(inputs[0], c); }
    throw UnsupportedPrimitiveError("pointwise: unknown primitive '" + std::string(name) + "'");
}

NodeId Tape::shape_op(std::string_view name, std::span<const NodeId> inputs) {
    if (inputs.empty())
        throw ArityError("shape_op " + std::string(name) + ": empty input list");
    if (name == "concat_last") return concat_last(inputs);
    auto want1 = [&] {
        if (inputs.size() != 1)
            throw ArityError("shape_op " + std::string(name) + ": expected 1 input, got " +
                             std::to_string(inputs.size()));
    };
    if (name == "reduce_sum_last") { want1(); return reduce_sum_last(inputs[0]); }
    if (name == "reduce_mean_last") { want1(); return reduce_mean_last(inputs[0]); }
    if (name == "softmax_last") { want1(); return softmax_last(inputs[0]); }
    throw UnsupportedPrimitiveError("shape_op: unknown primitive '" + std::string(name) + "'");
}

GradMap Tape::backprop(NodeId loss) const {
    if (loss >= nodes_.size()) throw ContractError("backprop: loss node does not exist");
    if (val(loss).size() != 1)
        throw ContractError("backprop: loss must be a 1-element tensor, got " +
                            val(loss).shape_str());

    std::vector<Tensor> grads(nodes_.size());
    std::vector<bool> has_grad(nodes_.size(), false);
    auto accum = [&](NodeId id, const Tensor& g) {
        if (!has_grad[id]) {
            grads[id] = g;
            has_grad[id] = true;
        } else {
            Tensor& dst = grads[id];
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
        }
    };

    grads[loss] = Tensor::full(val(loss).shape(), 1.0);
    has_grad[loss] = true;

    GradMap out;
    for (std::size_t step = loss + 1; step-- > 0;) {
        const Node& n = nodes_[step];
        if (!has_grad[step]) continue;
        const Tensor& g = grads[step];
        switch (n.prim) {
            case Prim::kLeaf: {
                if (n.trainable && !n.param_id.empty()) {
                    auto [it, inserted] = out.emplace(n.param_id, g);
                    if (!inserted)
                        for (std::size_t i = 0; i < it->second.size(); ++i)
                            it->second[i] += g[i];
                }
                break;
            }
            case Prim::kMatmul: {
                const Tensor& A = val(n.inputs[0]);
                const Tensor& B = val(n.inputs[1]);
                Tensor da = Tensor::zeros(A.shape());
                Tensor db = Tensor::zeros(B.shape());
                MapCM G(g.raw(), g.rows(), g.cols());
                MapM(da.raw(), da.rows(), da.cols()).noalias() =
                    G * MapCM(B.raw(), B.rows(), B.cols()).transpose();
                MapM(db.raw(), db.rows(), db.cols()).noalias() =
                    MapCM(A.raw(), A.rows(), A.cols()).transpose() * G;
                accum(n.inputs[0], da);
                accum(n.inputs[1], db);
                break;
            }
            case Prim::kGather: {
                const Tensor& T = val(n.inputs[0]);
                Tensor dt = Tensor::zeros(T.shape());
                const std::size_t d = T.cols();
                // Scatter-add: duplicate indices accumulate.
                for (std::size_t i = 0; i < n.indices.size(); ++i) {
                    double* dst = dt.raw() + static_cast<std::size_t>(n.indices[i]) * d;
                    const double* src = g.raw() + i * d;
                    for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
                }
                accum(n.inputs[0], dt);
                break;
            }
            case Prim::kAdd: {
                accum(n.inputs[0], g);
                accum(n.inputs[1], g);
                break;
            }
            case Prim::kSub: {
                accum(n.inputs[0], g);
                Tensor db = Tensor::zeros(g.shape());
                for (std::size_t i = 0; i < g.size(); ++i) db[i] = -g[i];
                accum(n.inputs[1], db);
                break;
            }
            case Prim::kMul: {
                const Tensor& A = val(n.inputs[0]);
                const Tensor& B = val(n.inputs[1]);
                Tensor da = Tensor::zeros(A.shape());
                Tensor db = Tensor::zeros(B.shape());
                for (std::size_t i = 0; i < g.size(); ++i) {
                    da[i] = g[i] * B[i];
                    db[i] = g[i] * A[i];
                }
                accum(n.inputs[0], da);
                accum(n.inputs[1], db);
                break;
            }
            case Prim::kMax:
            case Prim::kMin: {
                const Tensor& A = val(n.inputs[0]);
                const Tensor& B = val(n.inputs[1]);
                Tensor da = Tensor::zeros(A.shape());
                Tensor db = Tensor::zeros(B.shape());
                for (std::size_t i = 0; i < g.size(); ++i) {
                    // Ties route to the first operand.
                    const bool first = n.prim == Prim::kMax ? A[i] >= B[i] : A[i] <= B[i];
                    (first ? da[i] : db[i]) = g[i];
                }
                accum(n.inputs[0], da);
                accum(n.inputs[1], db);
                break;
            }
            case Prim::kRelu: {
                const Tensor& X = val(n.inputs[0]);
                Tensor dx = Tensor::zeros(X.shape());
                for (std::size_t i = 0; i < g.size(); ++i) dx[i] = X[i] > 0.0 ? g[i] : 0.0;
                accum(n.inputs[0], dx);
                break;
            }
            case Prim::kSigmoid: {
                const Tensor& Y = n.value;
                Tensor dx = Tensor::zeros(Y.shape());
                for (std::size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * Y[i] * (1.0 - Y[i]);
                accum(n.inputs[0], dx);
                break;
            }
            case Prim::kTanh: {
                const Tensor& Y = n.value;
                Tensor dx = Tensor::zeros(Y.shape());
                for (std::size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * (1.0 - Y[i] * Y[i]);
                accum(n.inputs[0], dx);
                break;
            }
            case Prim::kScale: {
                Tensor dx = Tensor::zeros(g.shape());
                for (std::size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * n.scalar;
                accum(n.inputs[0], dx);
                break;
            }
            case Prim::kConcatLast: {
                const std::size_t rows = n.value.rows(), total = n.value.cols();
                std::size_t off = 0;
                for (NodeId in : n.inputs) {
                    const Tensor& t = val(in);
                    const std::size_t d = t.cols();
                    Tensor dx = Tensor::zeros(t.shape());
                    for (std::size_t r = 0; r < rows; ++r)
                        std::copy_n(g.raw() + r * total + off, d, dx.raw() + r * d);
                    accum(in, dx);
                    off += d;
                }
                break;
            }
            case Prim::kSliceLast: {
                const Tensor& X = val(n.inputs[0]);
                Tensor dx = Tensor::zeros(X.shape());
                const std::size_t rows = X.rows(), d = X.cols();
                for (std::size_t r = 0; r < rows; ++r)
                    std::copy_n(g.raw() + r * n.extent, n.extent,
                                dx.raw() + r * d + n.offset);
                accum(n.inputs[0], dx);
                break;
            }
            case Prim::kReduceSumLast: {
                const Tensor& X = val(n.inputs[0]);
                Tensor dx = Tensor::zeros(X.shape());
                const std::size_t rows = X.rows(), d = X.cols();
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t c = 0; c < d; ++c) dx.raw()[r * d + c] = g[r];
                accum(n.inputs[0], dx);
                break;
            }
            case Prim::kSoftmaxLast: {
                const Tensor& Y = n.value;
                Tensor dx = Tensor::zeros(Y.shape());
                const std::size_t rows = Y.rows(), d = Y.cols();
                for (std::size_t r = 0; r < rows; ++r) {
                    double dot = 0.0;
                    for (std::size_t c = 0; c < d; ++c) dot += g[r * d + c] * Y[r * d + c];
                    for (std::size_t c = 0; c < d; ++c)
                        dx.raw()[r * d + c] = Y[r * d + c] * (g[r * d + c] - dot);
                }
                accum(n.inputs[0], dx);
                break;
            }
            case Prim::kBiasAdd: {
                accum(n.inputs[0], g);
                const Tensor& B = val(n.inputs[1]);
                Tensor db = Tensor::zeros(B.shape());
                const std::size_t rows = g.rows(), d = g.cols();
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t c = 0; c < d; ++c) db[c] += g.at(r, c);
                accum(n.inputs[1], db);
                break;
            }
            case Prim::kRowScale: {
                const Tensor& X = val(n.inputs[0]);
                const Tensor& S = val(n.inputs[1]);
                Tensor dx = Tensor::zeros(X.shape());
                Tensor ds = Tensor::zeros(S.shape());
                const std::size_t rows = X.rows(), d = X.cols();
                for (std::size_t r = 0; r < rows; ++r) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < d; ++c) {
                        dx.raw()[r * d + c] = g.at(r, c) * S[r];
                        acc += g.at(r, c) * X.at(r, c);
                    }
                    ds[r] = acc;
                }
                accum(n.inputs[0], dx);
                accum(n.inputs[1], ds);
                break;
            }
            case Prim::kRowwiseDot: {
                const Tensor& A = val(n.inputs[0]);
                const Tensor& B = val(n.inputs[1]);
                Tensor da = Tensor::zeros(A.shape());
                Tensor db = Tensor::zeros(B.shape());
                const std::size_t rows = A.rows(), d = A.cols();
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t c = 0; c < d; ++c) {
                        da.raw()[r * d + c] = g[r] * B.at(r, c);
                        db.raw()[r * d + c] = g[r] * A.at(r, c);
                    }
                accum(n.inputs[0], da);
                accum(n.inputs[1], db);
                break;
            }
            case Prim::kReduceSumAll: {
                const Tensor& X = val(n.inputs[0]);
                accum(n.inputs[0], Tensor::full(X.shape(), g[0]));
                break;
            }
            case Prim::kReduceMeanAll: {
                // Never recorded directly (composed of sum + scale).
                break;
            }
            case Prim::kReduceMeanLast: {
                break;  // composed of sum + scale as well
            }
            case Prim::kMseLoss: {
                const Tensor& P = val(n.inputs[0]);
                Tensor dp = Tensor::zeros(P.shape());
                const double inv = 1.0 / static_cast<double>(P.size());
                for (std::size_t i = 0; i < P.size(); ++i)
                    dp[i] = g[0] * 2.0 * (P[i] - n.aux[i]) * inv;
                accum(n.inputs[0], dp);
                break;
            }
            case Prim::kBceLoss: {
                const Tensor& P = val(n.inputs[0]);
                Tensor dp = Tensor::zeros(P.shape());
                const double inv = 1.0 / static_cast<double>(P.size());
                for (std::size_t i = 0; i < P.size(); ++i) {
                    // Constant (zero slope) inside the clipped region.
                    if (P[i] <= kProbClip || P[i] >= 1.0 - kProbClip) continue;
                    dp[i] = g[0] * (P[i] - n.aux[i]) / (P[i] * (1.0 - P[i])) * inv;
                }
                accum(n.inputs[0], dp);
                break;
            }
        }
    }
    return out;
}

}  // namespace recsearch
