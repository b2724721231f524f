#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rignn/autodiff.hpp"
#include "rignn/graph.hpp"
#include "rignn/params.hpp"
#include "rignn/topics.hpp"

namespace rignn::model {

// Per-item side information shared across all forwards.
struct ItemData {
    std::vector<std::vector<std::uint32_t>> review_tokens;  // word-emb row ids
    std::vector<std::uint32_t> topics;                      // dominant, kNoReview ok

    std::size_t num_items() const { return topics.size(); }
};

ItemData item_data_from_topics(const topics::TopicModel& m);

// One tape covering one mini-batch. Parameter leaves are created once;
// review encodings are cached per distinct item. Gradients flow back into
// the shared ParameterSet via accumulate_grads().
class BatchGraph {
public:
    BatchGraph(const ModelConfig& cfg, ParameterSet& params, const ItemData& items,
               bool train, std::uint64_t dropout_seed);

    // probability vector over all items, 1 x m
    ad::NodeId predict(const std::vector<std::uint32_t>& prefix);
    ad::NodeId example_loss(const std::vector<std::uint32_t>& prefix,
                            std::uint32_t label);
    // mean of example losses plus (l2/2) * sum of squared parameters
    ad::NodeId batch_loss(const std::vector<ad::NodeId>& losses, double l2);

    void accumulate_grads(ad::NodeId loss);

    const Array& value(ad::NodeId id) const { return tape_.value(id); }
    ad::Tape& tape() { return tape_; }
    std::size_t clamp_count() const { return clamp_count_; }
    std::size_t truncation_count() const { return truncation_count_; }

private:
    ad::NodeId param(const std::string& name);
    ad::NodeId review_encoding(std::uint32_t item);
    ad::NodeId ail_layer(const graph::SessionGraph& g, ad::NodeId states);
    ad::NodeId ril_layer(const graph::SessionGraph& g, ad::NodeId states,
                         ad::NodeId base);

    const ModelConfig& cfg_;
    ParameterSet& params_;
    const ItemData& items_;
    bool train_;
    Rng dropout_rng_;
    ad::Tape tape_;
    std::vector<ad::NodeId> leaves_;                      // aligned to params_
    std::unordered_map<std::string, ad::NodeId> leaf_by_name_;
    std::unordered_map<std::uint32_t, ad::NodeId> review_cache_;
    std::size_t clamp_count_ = 0;
    std::size_t truncation_count_ = 0;
};

// Convenience: probabilities for one prefix on a throwaway tape.
Array predict_scores(const ModelConfig& cfg, ParameterSet& params,
                     const ItemData& items, const std::vector<std::uint32_t>& prefix);

}  // namespace rignn::model
