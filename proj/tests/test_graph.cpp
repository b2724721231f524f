#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "rignn/graph.hpp"
#include "rignn/rng.hpp"

using namespace rignn;

namespace {

// Brute-force enumerator, written independently of the production builder.
// Nodes in first-occurrence order; adjacency counted pair by pair; refined
// edges enumerated over all first-occurrence-ordered same-topic pairs.
struct Oracle {
    std::vector<std::uint32_t> nodes;
    std::vector<std::vector<double>> a_out, a_in;
    std::set<std::pair<std::size_t, std::size_t>> rig;
};

Oracle brute_force(const std::vector<std::uint32_t>& session,
                   const std::vector<std::uint32_t>& topics, bool ignore_topics) {
    Oracle o;
    std::map<std::uint32_t, std::size_t> slot;
    for (auto item : session)
        if (!slot.count(item)) {
            slot[item] = o.nodes.size();
            o.nodes.push_back(item);
        }
    const std::size_t n = o.nodes.size();
    std::vector<std::vector<double>> out_count(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i + 1 < session.size(); ++i) {
        const std::size_t u = slot[session[i]], w = slot[session[i + 1]];
        if (u != w) out_count[u][w] += 1.0;
    }
    o.a_out.assign(n, std::vector<double>(n, 0.0));
    o.a_in.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t u = 0; u < n; ++u) {
        double deg = 0.0;
        for (std::size_t w = 0; w < n; ++w) deg += out_count[u][w];
        for (std::size_t w = 0; w < n; ++w)
            if (deg > 0.0) o.a_out[u][w] = out_count[u][w] / deg;
    }
    for (std::size_t w = 0; w < n; ++w) {
        double deg = 0.0;
        for (std::size_t u = 0; u < n; ++u) deg += out_count[u][w];
        for (std::size_t u = 0; u < n; ++u)
            if (deg > 0.0) o.a_in[w][u] = out_count[u][w] / deg;
    }
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t w = u + 1; w < n; ++w) {
            if (ignore_topics) {
                o.rig.emplace(u, w);
                continue;
            }
            const std::uint32_t tu = topics[o.nodes[u]];
            const std::uint32_t tw = topics[o.nodes[w]];
            if (tu != topics::kNoReview && tu == tw) o.rig.emplace(u, w);
        }
    return o;
}

void check_against_oracle(const std::vector<std::uint32_t>& session,
                          const std::vector<std::uint32_t>& topics,
                          bool ignore_topics) {
    const auto g = graph::build_session_graph(session, topics, ignore_topics);
    const auto o = brute_force(session, topics, ignore_topics);
    REQUIRE(g.nodes == o.nodes);
    const std::size_t n = o.nodes.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(g.a_out.at(i, j) == doctest::Approx(o.a_out[i][j]).epsilon(1e-12));
            CHECK(g.a_in.at(i, j) == doctest::Approx(o.a_in[i][j]).epsilon(1e-12));
        }
    const std::set<std::pair<std::size_t, std::size_t>> got(g.re_edges.begin(),
                                                            g.re_edges.end());
    CHECK(got == o.rig);
}

}  // namespace

TEST_CASE("adjacency graph for a session with a revisited item") {
    // a b c b d with indices 0 1 2 1 3
    const auto g = graph::build_aig({0, 1, 2, 1, 3});
    REQUIRE(g.nodes == std::vector<std::uint32_t>{0, 1, 2, 3});
    CHECK(g.node_of == std::vector<std::size_t>{0, 1, 2, 1, 3});
    CHECK(g.a_out.at(0, 1) == 1.0);
    CHECK(g.a_out.at(1, 2) == 0.5);
    CHECK(g.a_out.at(1, 3) == 0.5);
    CHECK(g.a_out.at(2, 1) == 1.0);
    CHECK(g.a_in.at(1, 0) == 0.5);
    CHECK(g.a_in.at(1, 2) == 0.5);
    CHECK(g.a_in.at(2, 1) == 1.0);
    CHECK(g.a_in.at(3, 1) == 1.0);
    CHECK_THROWS(graph::build_aig({}));
}

TEST_CASE("three items with topics (t, t', t) keep only the skip edge") {
    const std::vector<std::uint32_t> topics{7, 3, 7};
    const auto g = graph::build_session_graph({0, 1, 2}, topics);
    REQUIRE(g.re_edges.size() == 1);
    CHECK(g.re_edges[0] == std::pair<std::size_t, std::size_t>{0, 2});
    CHECK(g.b_out.at(0, 2) == 1.0);
    CHECK(g.b_in.at(2, 0) == 1.0);
    // both adjacent pairs cross topics, so neither appears
    CHECK(g.b_out.at(0, 1) == 0.0);
    CHECK(g.b_out.at(1, 2) == 0.0);
    CHECK(g.re_neighbors[0] == std::vector<std::size_t>{2});
    CHECK(g.re_neighbors[1].empty());
    CHECK(g.re_neighbors[2] == std::vector<std::size_t>{0});
}

TEST_CASE("refined edges respect temporal order and skip the sentinel") {
    const std::vector<std::uint32_t> topics{1, 1, topics::kNoReview, 1};
    const auto g = graph::build_session_graph({3, 0, 2, 1}, topics);
    // first occurrences: 3 then 0 then 2 then 1; same topic pairs in order
    std::set<std::pair<std::size_t, std::size_t>> expect{{0, 1}, {0, 3}, {1, 3}};
    CHECK(std::set<std::pair<std::size_t, std::size_t>>(g.re_edges.begin(),
                                                        g.re_edges.end()) == expect);
    for (const auto& [u, w] : g.re_edges) CHECK(u < w);  // no self loops either way
}

TEST_CASE("ignoring topics connects every ordered pair") {
    const std::vector<std::uint32_t> topics{0, 1, 2};
    const auto g = graph::build_session_graph({2, 0, 1}, topics, /*ignore_topics=*/true);
    CHECK(g.re_edges.size() == 3);
}

TEST_CASE("all-sentinel topics yield an empty refined graph") {
    const std::vector<std::uint32_t> topics(4, topics::kNoReview);
    const auto g = graph::build_session_graph({0, 1, 2, 3}, topics);
    CHECK(g.re_edges.empty());
    for (const auto& nbrs : g.re_neighbors) CHECK(nbrs.empty());
}

TEST_CASE("nonzero rows of every matrix sum to one") {
    Rng rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 1 + rng.next_below(8);
        std::vector<std::uint32_t> session(len);
        for (auto& v : session) v = static_cast<std::uint32_t>(rng.next_below(6));
        std::vector<std::uint32_t> topics(6);
        for (auto& t : topics) t = static_cast<std::uint32_t>(rng.next_below(4));
        const auto g = graph::build_session_graph(session, topics);
        for (const Array* m : {&g.a_out, &g.a_in, &g.b_out, &g.b_in})
            for (std::size_t i = 0; i < g.num_nodes(); ++i) {
                double row = 0.0;
                for (std::size_t j = 0; j < g.num_nodes(); ++j) row += m->at(i, j);
                CHECK((row == doctest::Approx(0.0) || row == doctest::Approx(1.0)));
            }
    }
}

TEST_CASE("random sessions match the brute-force enumerator") {
    Rng rng(23);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t len = 1 + rng.next_below(8);
        std::vector<std::uint32_t> session(len);
        for (auto& v : session) v = static_cast<std::uint32_t>(rng.next_below(10));
        std::vector<std::uint32_t> topics(10);
        for (auto& t : topics) {
            const auto r = rng.next_below(5);
            t = r == 4 ? topics::kNoReview : static_cast<std::uint32_t>(r);
        }
        check_against_oracle(session, topics, trial % 7 == 0);
    }
}

TEST_CASE("item relabeling permutes the graph consistently") {
    const std::vector<std::uint32_t> session{0, 3, 1, 3, 2};
    std::vector<std::uint32_t> topics{5, 5, 6, 5};
    const auto g = graph::build_session_graph(session, topics);

    // relabel items i -> i + 100
    std::vector<std::uint32_t> shifted;
    for (auto v : session) shifted.push_back(v + 100);
    std::vector<std::uint32_t> shifted_topics(104, topics::kNoReview);
    for (std::size_t i = 0; i < topics.size(); ++i) shifted_topics[i + 100] = topics[i];
    const auto h = graph::build_session_graph(shifted, shifted_topics);

    REQUIRE(g.num_nodes() == h.num_nodes());
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        CHECK(h.nodes[i] == g.nodes[i] + 100);
        for (std::size_t j = 0; j < g.num_nodes(); ++j) {
            CHECK(g.a_out.at(i, j) == h.a_out.at(i, j));
            CHECK(g.b_out.at(i, j) == h.b_out.at(i, j));
        }
    }
    CHECK(g.re_edges == h.re_edges);
}
