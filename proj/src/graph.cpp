#include "rignn/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace rignn::graph {
namespace {

void normalize_rows(Array& a) {
    const std::size_t n = a.shape[0];
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) total += a.at(i, j);
        if (total == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) a.at(i, j) /= total;
    }
}

void dedup_nodes(const std::vector<std::uint32_t>& session, SessionGraph& g) {
    std::unordered_map<std::uint32_t, std::size_t> slot;
    for (auto item : session) {
        auto [it, inserted] = slot.emplace(item, g.nodes.size());
        if (inserted) g.nodes.push_back(item);
        g.node_of.push_back(it->second);
    }
}

void fill_aig(const std::vector<std::uint32_t>& session, SessionGraph& g) {
    const std::size_t n = g.num_nodes();
    Array out_counts({n, n}), in_counts({n, n});
    for (std::size_t i = 0; i + 1 < session.size(); ++i) {
        const std::size_t u = g.node_of[i], w = g.node_of[i + 1];
        if (u == w) continue;
        out_counts.at(u, w) += 1.0;
        in_counts.at(w, u) += 1.0;
    }
    normalize_rows(out_counts);
    normalize_rows(in_counts);
    g.a_out = std::move(out_counts);
    g.a_in = std::move(in_counts);
}

}  // namespace

SessionGraph build_aig(const std::vector<std::uint32_t>& session) {
    if (session.empty()) throw std::invalid_argument("empty session");
    SessionGraph g;
    dedup_nodes(session, g);
    fill_aig(session, g);
    return g;
}

SessionGraph build_session_graph(const std::vector<std::uint32_t>& session,
                                 const std::vector<std::uint32_t>& topics,
                                 bool ignore_topics) {
    SessionGraph g = build_aig(session);
    const std::size_t n = g.num_nodes();

    // first occurrence position per node slot = index of its first session hit
    // (slots are assigned in first-occurrence order, so slot order is temporal)
    Array bo({n, n}), bi({n, n});
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t u = 0; u < n; ++u) {
        const std::uint32_t tu = topics.empty() ? topics::kNoReview : topics[g.nodes[u]];
        for (std::size_t w = u + 1; w < n; ++w) {
            const std::uint32_t tw = topics.empty() ? topics::kNoReview : topics[g.nodes[w]];
            const bool keep =
                ignore_topics || (tu != topics::kNoReview && tu == tw);
            if (!keep) continue;
            edges.emplace(u, w);
            bo.at(u, w) += 1.0;
            bi.at(w, u) += 1.0;
        }
    }
    normalize_rows(bo);
    normalize_rows(bi);
    g.re_edges.assign(edges.begin(), edges.end());
    g.b_out = std::move(bo);
    g.b_in = std::move(bi);

    g.re_neighbors.assign(n, {});
    std::vector<std::set<std::size_t>> nbrs(n);
    for (const auto& [u, w] : g.re_edges) {
        nbrs[u].insert(w);
        nbrs[w].insert(u);
    }
    for (std::size_t u = 0; u < n; ++u)
        g.re_neighbors[u].assign(nbrs[u].begin(), nbrs[u].end());
    return g;
}

}  // namespace rignn::graph
