#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "rignn/array.hpp"
#include "rignn/rng.hpp"

// Reverse-mode tape. Nodes are created in topological order; backward()
// walks the tape in reverse. All node values are 2-D internally (scalars
// are 1x1, vectors 1xn). 64-bit throughout.
namespace rignn::ad {

using NodeId = std::int32_t;

class Tape {
public:
    NodeId leaf(const Array& value);

    const Array& value(NodeId id) const { return nodes_[id].value; }
    const Array& grad(NodeId id) const { return nodes_[id].grad; }
    double scalar_value(NodeId id) const;

    std::size_t size() const { return nodes_.size(); }

    // C = A * B
    NodeId matmul(NodeId a, NodeId b);
    // C = A * B^T (used for scoring against the full embedding table)
    NodeId matmul_nt(NodeId a, NodeId b);
    NodeId add(NodeId a, NodeId b);           // same shape
    NodeId add_rowvec(NodeId a, NodeId v);    // (r x c) + (1 x c)
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);           // elementwise
    NodeId scale(NodeId a, double c);
    NodeId mul_scalar(NodeId a, NodeId s);    // s is 1x1
    NodeId sigmoid(NodeId a);
    NodeId tanh_(NodeId a);
    NodeId softmax_rows(NodeId a);
    NodeId mean_rows(NodeId a);               // (r x c) -> (1 x c)
    NodeId sum(NodeId a);                     // -> 1x1
    NodeId concat_cols(const std::vector<NodeId>& parts);
    NodeId concat_rows(const std::vector<NodeId>& parts);
    NodeId stack_scalars(const std::vector<NodeId>& scalars);  // -> 1xK
    NodeId gather_rows(NodeId a, std::vector<std::size_t> idx);
    NodeId slice_cols(NodeId a, std::size_t start, std::size_t len);
    NodeId row(NodeId a, std::size_t i);
    NodeId cosine(NodeId u, NodeId v);        // 1xn, 1xn -> 1x1; zero norm -> 0
    NodeId dropout(NodeId a, double p, bool train, Rng& rng);
    // -log(max(value[i], floor)); bumps *clamp_count when the floor fires
    NodeId neg_log_pick(NodeId a, std::size_t i, double floor = 1e-12,
                        std::size_t* clamp_count = nullptr);

    void backward(NodeId output);  // output must be 1x1

private:
    struct Node {
        Array value;
        Array grad;
        std::function<void()> backprop;  // empty for leaves
    };

    NodeId push(Array value, std::function<void()> backprop);
    void check_2d(NodeId id, const char* op) const;

    std::vector<Node> nodes_;
};

// Central finite differences against an analytic gradient.
struct FdEntry {
    std::string name;
    double max_rel_err = 0.0;
};
struct FdReport {
    std::vector<FdEntry> entries;
    double max_rel_err = 0.0;
    bool pass(double tol) const { return max_rel_err < tol; }
};

struct ParamView {
    std::string name;
    Array* value;         // mutated in place during probing, restored after
    const Array* grad;    // analytic gradient to compare against
};

// samples_per_param == 0 means every entry
FdReport fd_check(const std::function<double()>& loss,
                  const std::vector<ParamView>& params, double eps,
                  std::size_t samples_per_param, Rng& rng);

}  // namespace rignn::ad
