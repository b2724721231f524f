#include <cstdio>
#include <fstream>
#include <set>

#include "doctest.h"
#include "rignn/synth.hpp"

using namespace rignn;

namespace {

synth::SynthSpec small_spec() {
    synth::SynthSpec spec;
    spec.num_topics = 4;
    spec.items_per_topic = 8;
    spec.vocab_per_topic = 10;
    spec.session_count = 60;
    spec.len_min = 4;
    spec.len_max = 8;
    spec.review_tokens = 6;
    spec.seed = 3;
    return spec;
}

std::vector<ingest::Session> all_sessions(const synth::SynthOut& out) {
    std::vector<ingest::Session> all = out.bundle.train;
    all.insert(all.end(), out.bundle.test.begin(), out.bundle.test.end());
    return all;
}

}  // namespace

TEST_CASE("generation is deterministic and structurally sound") {
    const auto spec = small_spec();
    const auto a = synth::generate(spec);
    const auto b = synth::generate(spec);
    REQUIRE(a.bundle.train.size() + a.bundle.test.size() == spec.session_count);
    CHECK(a.topic_labels == b.topic_labels);
    CHECK(a.truth.size() == b.truth.size());
    for (std::size_t i = 0; i < a.bundle.train.size(); ++i)
        CHECK(a.bundle.train[i].items == b.bundle.train[i].items);

    CHECK(a.bundle.catalog.size() == spec.num_topics * spec.items_per_topic);
    for (std::size_t i = 0; i < a.topic_labels.size(); ++i)
        CHECK(a.topic_labels[i] == i / spec.items_per_topic);
    for (const auto& s : all_sessions(a)) {
        CHECK(s.items.size() >= 2);
        // two threads with distinct topics: every session spans at most 2 topics
        std::set<std::uint32_t> topics;
        for (auto v : s.items) topics.insert(a.topic_labels[v]);
        CHECK(topics.size() <= 2);
        // no repeated items inside a session
        std::set<std::uint32_t> uniq(s.items.begin(), s.items.end());
        CHECK(uniq.size() == s.items.size());
    }
    // review vocabulary is topic-disjoint by construction
    for (std::size_t i = 0; i < a.bundle.catalog.size(); ++i) {
        const std::string tag = "topic" + std::to_string(a.topic_labels[i]);
        CHECK(a.bundle.catalog.review_doc[i].find(tag) != std::string::npos);
    }
}

TEST_CASE("no interleaving: adjacency is pure signal") {
    auto spec = small_spec();
    spec.interleave_prob = 0.0;
    const auto out = synth::generate(spec);
    const auto rec =
        synth::dependency_recovery(all_sessions(out), out.truth, out.topic_labels);
    CHECK(rec.aig_precision == doctest::Approx(1.0));
    CHECK(rec.rig_precision == doctest::Approx(1.0));
    CHECK(rec.rig_recall == doctest::Approx(1.0));
    // adjacency only sees consecutive pairs, truth holds all ordered pairs
    CHECK(rec.aig_recall < 1.0);
}

TEST_CASE("full interleaving: adjacency is pure noise, refinement is exact") {
    auto spec = small_spec();
    spec.interleave_prob = 1.0;
    const auto out = synth::generate(spec);
    const auto rec =
        synth::dependency_recovery(all_sessions(out), out.truth, out.topic_labels);
    CHECK(rec.aig_precision == 0.0);
    CHECK(rec.aig_recall == 0.0);
    CHECK(rec.rig_precision == doctest::Approx(1.0));
    CHECK(rec.rig_recall == doctest::Approx(1.0));
}

TEST_CASE("half interleaving: refinement beats adjacency with oracle topics") {
    auto spec = small_spec();
    spec.session_count = 200;
    spec.interleave_prob = 0.5;
    const auto out = synth::generate(spec);
    const auto rec =
        synth::dependency_recovery(all_sessions(out), out.truth, out.topic_labels);
    CHECK(rec.rig_recall == doctest::Approx(1.0));
    CHECK(rec.rig_precision > rec.aig_precision);
    CHECK(rec.aig_precision > 0.0);
    CHECK(rec.aig_precision < 1.0);
}

TEST_CASE("scrambled topic labels break refinement recall") {
    auto spec = small_spec();
    spec.interleave_prob = 1.0;
    const auto out = synth::generate(spec);
    std::vector<std::uint32_t> same_topic(out.topic_labels.size(), 0);
    const auto rec =
        synth::dependency_recovery(all_sessions(out), out.truth, same_topic);
    // collapsing every item into one topic floods the refined graph
    CHECK(rec.rig_recall == doctest::Approx(1.0));
    CHECK(rec.rig_precision < 1.0);
}

TEST_CASE("truth file round-trip") {
    const auto out = synth::generate(small_spec());
    const std::string path = "/tmp/rignn_test_truth.bin";
    synth::save_truth(out, path);
    std::vector<synth::EdgeSet> truth;
    std::vector<std::uint32_t> labels;
    synth::load_truth(path, truth, labels);
    CHECK(labels == out.topic_labels);
    REQUIRE(truth.size() == out.truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) CHECK(truth[i] == out.truth[i]);
    std::remove(path.c_str());
}

TEST_CASE("spec file parsing") {
    const std::string path = "/tmp/rignn_test_spec.txt";
    {
        std::ofstream f(path);
        f << "# planted corpus\n"
          << "num_topics = 3\n"
          << "items_per_topic = 5\n"
          << "session_count = 10\n"
          << "len_min = 3\n"
          << "len_max = 5\n"
          << "interleave_prob = 0.25\n"
          << "seed = 99\n";
    }
    const auto spec = synth::parse_spec_file(path);
    CHECK(spec.num_topics == 3);
    CHECK(spec.items_per_topic == 5);
    CHECK(spec.session_count == 10);
    CHECK(spec.interleave_prob == doctest::Approx(0.25));
    CHECK(spec.seed == 99);
    {
        std::ofstream f(path);
        f << "bogus_key = 1\n";
    }
    CHECK_THROWS(synth::parse_spec_file(path));
    std::remove(path.c_str());

    synth::SynthSpec bad;
    bad.num_topics = 1;
    CHECK_THROWS(bad.validate());
    bad = {};
    bad.interleave_prob = 1.5;
    CHECK_THROWS(bad.validate());
}
