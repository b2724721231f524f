#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rignn/ingest.hpp"

namespace rignn::synth {

// Planted-dependency corpus: each session interleaves two intent threads
// drawn from distinct topics. Within-thread ordered pairs are the true
// dependencies; cross-thread adjacency is noise.
struct SynthSpec {
    std::size_t num_topics = 8;
    std::size_t items_per_topic = 12;
    std::size_t vocab_per_topic = 30;
    std::size_t session_count = 2000;
    std::size_t len_min = 6;
    std::size_t len_max = 10;
    double interleave_prob = 0.5;  // chance the next item switches thread
    std::size_t review_tokens = 20;
    double test_fraction = 0.2;
    std::uint64_t seed = 1;

    void validate() const;
};

using EdgeSet = std::vector<std::pair<std::uint32_t, std::uint32_t>>;  // item ids

struct SynthOut {
    ingest::Bundle bundle;          // train sessions first, then test
    std::vector<EdgeSet> truth;     // per session, train order then test order
    std::vector<std::uint32_t> topic_labels;  // oracle topic per item
};

SynthOut generate(const SynthSpec& spec);

struct Recovery {
    double aig_precision = 0.0, aig_recall = 0.0;
    double rig_precision = 0.0, rig_recall = 0.0;
};

// Micro-averaged edge precision/recall of both constructions against the
// planted ground truth.
Recovery dependency_recovery(const std::vector<ingest::Session>& sessions,
                             const std::vector<EdgeSet>& truth,
                             const std::vector<std::uint32_t>& topics);

void save_truth(const SynthOut& out, const std::string& path);
// loads truth + labels previously saved alongside a bundle
void load_truth(const std::string& path, std::vector<EdgeSet>& truth,
                std::vector<std::uint32_t>& topic_labels);

// key = value text file; unknown keys are an error
SynthSpec parse_spec_file(const std::string& path);

}  // namespace rignn::synth
