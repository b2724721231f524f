#include "rignn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace rignn::eval {
namespace {

// appends popularity-ranked items not already present until `n` slots
void backfill_by_popularity(std::vector<std::uint32_t>& out,
                            const std::vector<std::size_t>& global_counts,
                            std::size_t n) {
    if (out.size() >= n) {
        out.resize(n);
        return;
    }
    std::set<std::uint32_t> have(out.begin(), out.end());
    std::vector<std::uint32_t> order(global_counts.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (global_counts[a] != global_counts[b])
            return global_counts[a] > global_counts[b];
        return a < b;
    });
    for (std::uint32_t item : order) {
        if (out.size() >= n) break;
        if (!have.count(item)) out.push_back(item);
    }
}

}  // namespace

std::vector<std::uint32_t> top_n_from_scores(const std::vector<double>& scores,
                                             std::size_t n) {
    std::vector<std::uint32_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0u);
    n = std::min(n, order.size());
    std::partial_sort(order.begin(), order.begin() + n, order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });
    order.resize(n);
    return order;
}

double precision_at_k(const std::vector<RankedResult>& results, std::size_t k) {
    if (results.empty()) throw std::invalid_argument("empty result set");
    std::size_t hits = 0;
    for (const auto& r : results) {
        const std::size_t limit = std::min(k, r.top.size());
        for (std::size_t i = 0; i < limit; ++i)
            if (r.top[i] == r.label) {
                ++hits;
                break;
            }
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(results.size());
}

double mrr_at_k(const std::vector<RankedResult>& results, std::size_t k) {
    if (results.empty()) throw std::invalid_argument("empty result set");
    double total = 0.0;
    for (const auto& r : results) {
        const std::size_t limit = std::min(k, r.top.size());
        for (std::size_t i = 0; i < limit; ++i)
            if (r.top[i] == r.label) {
                total += 1.0 / static_cast<double>(i + 1);
                break;
            }
    }
    return 100.0 * total / static_cast<double>(results.size());
}

std::vector<std::uint32_t> s_pop(const std::vector<std::uint32_t>& prefix,
                                 const std::vector<std::size_t>& global_counts,
                                 std::size_t n) {
    if (prefix.empty()) throw std::invalid_argument("empty prefix");
    std::unordered_map<std::uint32_t, std::size_t> counts;
    for (auto v : prefix) ++counts[v];
    std::vector<std::uint32_t> session_items;
    for (const auto& [item, _] : counts) session_items.push_back(item);
    std::sort(session_items.begin(), session_items.end());
    std::stable_sort(session_items.begin(), session_items.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                         return counts[a] > counts[b];
                     });
    if (session_items.size() > n) session_items.resize(n);
    backfill_by_popularity(session_items, global_counts, n);
    return session_items;
}

KnnIndex KnnIndex::build(const std::vector<ingest::Session>& train,
                         std::size_t num_items) {
    KnnIndex index;
    index.global_counts.assign(num_items, 0);
    for (const auto& s : train) {
        std::vector<std::uint32_t> set(s.items.begin(), s.items.end());
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        index.session_sets.push_back(std::move(set));
        for (auto v : s.items) ++index.global_counts[v];
    }
    return index;
}

std::vector<std::uint32_t> s_knn(const std::vector<std::uint32_t>& prefix,
                                 const KnnIndex& index, std::size_t k_nn,
                                 std::size_t n) {
    std::vector<std::uint32_t> pset(prefix.begin(), prefix.end());
    std::sort(pset.begin(), pset.end());
    pset.erase(std::unique(pset.begin(), pset.end()), pset.end());

    struct Neighbor {
        double sim;
        std::size_t idx;
    };
    std::vector<Neighbor> neighbors;
    for (std::size_t i = 0; i < index.session_sets.size(); ++i) {
        const auto& s = index.session_sets[i];
        std::size_t inter = 0;
        auto a = pset.begin();
        auto b = s.begin();
        while (a != pset.end() && b != s.end()) {
            if (*a < *b)
                ++a;
            else if (*b < *a)
                ++b;
            else {
                ++inter;
                ++a;
                ++b;
            }
        }
        if (inter == 0) continue;
        const double sim = static_cast<double>(inter) /
                           std::sqrt(static_cast<double>(pset.size()) *
                                     static_cast<double>(s.size()));
        neighbors.push_back({sim, i});
    }
    std::stable_sort(neighbors.begin(), neighbors.end(),
                     [](const Neighbor& a, const Neighbor& b) {
                         if (a.sim != b.sim) return a.sim > b.sim;
                         return a.idx < b.idx;
                     });
    if (neighbors.size() > k_nn) neighbors.resize(k_nn);

    std::unordered_map<std::uint32_t, double> votes;
    for (const auto& nb : neighbors)
        for (auto item : index.session_sets[nb.idx]) votes[item] += nb.sim;

    std::vector<std::uint32_t> ranked;
    for (const auto& [item, _] : votes) ranked.push_back(item);
    std::sort(ranked.begin(), ranked.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                         return votes[a] > votes[b];
                     });
    if (ranked.size() > n) ranked.resize(n);
    backfill_by_popularity(ranked, index.global_counts, n);
    return ranked;
}

Summary summarize(const std::vector<RankedResult>& results) {
    Summary s;
    s.p10 = precision_at_k(results, 10);
    s.p20 = precision_at_k(results, 20);
    s.mrr10 = mrr_at_k(results, 10);
    s.mrr20 = mrr_at_k(results, 20);
    return s;
}

std::vector<RankedResult> rank_examples(
    const model::ModelConfig& cfg, model::ParameterSet& params,
    const model::ItemData& items,
    const std::vector<ingest::SequenceExample>& examples, std::size_t top_n) {
    std::vector<RankedResult> results;
    results.reserve(examples.size());
    constexpr std::size_t kChunk = 64;  // bound tape growth
    for (std::size_t start = 0; start < examples.size(); start += kChunk) {
        model::BatchGraph bg(cfg, params, items, /*train=*/false, 0);
        const std::size_t end = std::min(start + kChunk, examples.size());
        for (std::size_t i = start; i < end; ++i) {
            const ad::NodeId y = bg.predict(examples[i].prefix);
            RankedResult r;
            r.top = top_n_from_scores(bg.value(y).data, top_n);
            r.label = examples[i].label;
            results.push_back(std::move(r));
        }
    }
    return results;
}

double paired_t_test_p(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("paired t-test needs matched samples, n >= 2");
    const std::size_t n = a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(n - 1);
    if (var == 0.0) return mean == 0.0 ? 1.0 : 0.0;
    const double t = mean / std::sqrt(var / static_cast<double>(n));
    const double nu = static_cast<double>(n - 1);

    // two-sided p via the regularized incomplete beta function
    const double x = nu / (nu + t * t);
    // I_x(nu/2, 1/2) by continued fraction (Lentz)
    auto betacf = [](double aa, double bb, double xx) {
        const double tiny = 1e-300;
        double c = 1.0, d = 1.0 - (aa + bb) * xx / (aa + 1.0);
        if (std::fabs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= 200; ++m) {
            const double m2 = 2.0 * m;
            double num = m * (bb - m) * xx / ((aa + m2 - 1.0) * (aa + m2));
            d = 1.0 + num * d;
            if (std::fabs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1.0 / d;
            h *= d * c;
            num = -(aa + m) * (aa + bb + m) * xx / ((aa + m2) * (aa + m2 + 1.0));
            d = 1.0 + num * d;
            if (std::fabs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double delta = d * c;
            h *= delta;
            if (std::fabs(delta - 1.0) < 1e-12) break;
        }
        return h;
    };
    auto ibeta = [&](double aa, double bb, double xx) {
        if (xx <= 0.0) return 0.0;
        if (xx >= 1.0) return 1.0;
        const double ln_front = std::lgamma(aa + bb) - std::lgamma(aa) -
                                std::lgamma(bb) + aa * std::log(xx) +
                                bb * std::log(1.0 - xx);
        if (xx < (aa + 1.0) / (aa + bb + 2.0))
            return std::exp(ln_front) * betacf(aa, bb, xx) / aa;
        return 1.0 - std::exp(std::lgamma(aa + bb) - std::lgamma(bb) -
                              std::lgamma(aa) + bb * std::log(1.0 - xx) +
                              aa * std::log(xx)) *
                         betacf(bb, aa, 1.0 - xx) / bb;
    };
    return ibeta(nu / 2.0, 0.5, x);
}

}  // namespace rignn::eval
