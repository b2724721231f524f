#pragma once

#include <cstdint>
#include <vector>

#include "rignn/ingest.hpp"
#include "rignn/model.hpp"

namespace rignn::eval {

struct RankedResult {
    std::vector<std::uint32_t> top;  // descending score, ties ascending index
    std::uint32_t label = 0;
};

// Top-N by descending score with ties broken by ascending item index.
std::vector<std::uint32_t> top_n_from_scores(const std::vector<double>& scores,
                                             std::size_t n);

// Hit rate within top K, as a percentage.
double precision_at_k(const std::vector<RankedResult>& results, std::size_t k);
// Mean reciprocal rank (0 beyond K), as a percentage.
double mrr_at_k(const std::vector<RankedResult>& results, std::size_t k);

// In-session frequency ranking; remaining slots filled by global popularity.
std::vector<std::uint32_t> s_pop(const std::vector<std::uint32_t>& prefix,
                                 const std::vector<std::size_t>& global_counts,
                                 std::size_t n);

// Binary-set cosine vote over the k_nn most similar train sessions.
// Prefix items are not excluded. Falls back to global popularity.
struct KnnIndex {
    std::vector<std::vector<std::uint32_t>> session_sets;  // sorted unique items
    std::vector<std::size_t> global_counts;
    static KnnIndex build(const std::vector<ingest::Session>& train,
                          std::size_t num_items);
};
std::vector<std::uint32_t> s_knn(const std::vector<std::uint32_t>& prefix,
                                 const KnnIndex& index, std::size_t k_nn,
                                 std::size_t n);

struct Summary {
    double p10 = 0.0, p20 = 0.0, mrr10 = 0.0, mrr20 = 0.0;
};

Summary summarize(const std::vector<RankedResult>& results);

// Runs the model over every example and ranks the top `top_n` items.
std::vector<RankedResult> rank_examples(
    const model::ModelConfig& cfg, model::ParameterSet& params,
    const model::ItemData& items,
    const std::vector<ingest::SequenceExample>& examples, std::size_t top_n = 20);

// Paired t-test over per-seed metric differences (two-sided p-value).
double paired_t_test_p(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace rignn::eval
