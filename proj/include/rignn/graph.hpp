#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rignn/array.hpp"
#include "rignn/topics.hpp"

namespace rignn::graph {

// Both per-session graphs. Repeated items collapse to one node
// (first-occurrence order); RIG temporal order uses first occurrences.
struct SessionGraph {
    std::vector<std::uint32_t> nodes;      // dedup item indices
    std::vector<std::size_t> node_of;      // session position -> node slot
    Array a_out, a_in;                     // n' x n', outdegree/indegree normalized
    std::vector<std::pair<std::size_t, std::size_t>> re_edges;  // node slots, u -> w
    Array b_out, b_in;
    std::vector<std::vector<std::size_t>> re_neighbors;  // in+out union, ascending

    std::size_t num_nodes() const { return nodes.size(); }
};

// Adjacency graph only (a_out / a_in); RIG fields left empty.
SessionGraph build_aig(const std::vector<std::uint32_t>& session);

// Full graph. topics maps item index -> dominant topic (kNoReview allowed).
// ignore_topics keeps every ordered pair (the -topic ablation).
SessionGraph build_session_graph(const std::vector<std::uint32_t>& session,
                                 const std::vector<std::uint32_t>& topics,
                                 bool ignore_topics = false);

}  // namespace rignn::graph
