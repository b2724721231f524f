#include "rignn/synth.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rignn/graph.hpp"
#include "rignn/rng.hpp"
#include "rignn/serialize.hpp"

namespace rignn::synth {
namespace {
constexpr char kTruthMagic[4] = {'R', 'I', 'G', 'S'};
constexpr std::uint32_t kTruthVersion = 1;
}  // namespace

void SynthSpec::validate() const {
    if (num_topics < 2 || items_per_topic < 2 || vocab_per_topic == 0 ||
        session_count == 0 || review_tokens == 0)
        throw std::invalid_argument("synth spec counts must be positive");
    if (interleave_prob < 0.0 || interleave_prob > 1.0)
        throw std::invalid_argument("interleave_prob must be in [0, 1]");
    if (len_min < 2 || len_max < len_min || len_max > 2 * items_per_topic)
        throw std::invalid_argument("session length range invalid");
    if (test_fraction < 0.0 || test_fraction >= 1.0)
        throw std::invalid_argument("test_fraction must be in [0, 1)");
}

SynthOut generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    SynthOut out;

    const std::size_t m = spec.num_topics * spec.items_per_topic;
    out.topic_labels.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        out.topic_labels[i] = static_cast<std::uint32_t>(i / spec.items_per_topic);

    // catalog with topic-vocabulary reviews
    Rng review_rng = rng.fork(100);
    for (std::size_t i = 0; i < m; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "item%05zu", i);
        out.bundle.catalog.index_of.emplace(id, static_cast<std::uint32_t>(i));
        out.bundle.catalog.ids.emplace_back(id);
        const std::size_t topic = out.topic_labels[i];
        std::string review;
        for (std::size_t w = 0; w < spec.review_tokens; ++w) {
            const std::size_t word = review_rng.next_below(spec.vocab_per_topic);
            if (!review.empty()) review += ' ';
            review += "topic" + std::to_string(topic) + "word" + std::to_string(word);
        }
        out.bundle.catalog.review_doc.push_back(std::move(review));
    }

    struct Thread {
        std::size_t topic;
        std::size_t start;    // offset into the topic's item ring
        std::size_t used = 0;
        std::size_t stride = 1;
    };

    // Each thread walks its topic's item ring with a per-thread stride, so the
    // thread's continuation depends on history beyond the last item alone.
    // Strides are coprime with the ring size, keeping session items distinct.
    const std::size_t alt_stride =
        (spec.items_per_topic > 5 && spec.items_per_topic % 5 != 0)
            ? 5
            : spec.items_per_topic - 1;

    Rng session_rng = rng.fork(200);
    std::vector<ingest::Session> sessions;
    for (std::size_t s = 0; s < spec.session_count; ++s) {
        Rng r = session_rng.fork(s);
        const std::size_t len =
            spec.len_min + r.next_below(spec.len_max - spec.len_min + 1);
        const std::size_t topic_a = r.next_below(spec.num_topics);
        std::size_t topic_b = r.next_below(spec.num_topics - 1);
        if (topic_b >= topic_a) ++topic_b;
        Thread threads[2] = {{topic_a, r.next_below(spec.items_per_topic)},
                             {topic_b, r.next_below(spec.items_per_topic)}};
        for (Thread& t : threads) t.stride = r.next_below(2) ? alt_stride : 1;

        ingest::Session session;
        session.start_time = static_cast<std::int64_t>(s + 1);
        std::vector<std::size_t> thread_of_pos;
        std::size_t active = 0;
        for (std::size_t p = 0; p < len; ++p) {
            if (p > 0 && r.next_double() < spec.interleave_prob) active = 1 - active;
            if (threads[active].used == spec.items_per_topic) active = 1 - active;
            if (threads[active].used == spec.items_per_topic) break;
            Thread& t = threads[active];
            const std::uint32_t item = static_cast<std::uint32_t>(
                t.topic * spec.items_per_topic +
                (t.start + t.used * t.stride) % spec.items_per_topic);
            ++t.used;
            session.items.push_back(item);
            thread_of_pos.push_back(active);
        }

        EdgeSet truth;
        for (std::size_t i = 0; i < session.items.size(); ++i)
            for (std::size_t j = i + 1; j < session.items.size(); ++j)
                if (thread_of_pos[i] == thread_of_pos[j])
                    truth.emplace_back(session.items[i], session.items[j]);

        sessions.push_back(std::move(session));
        out.truth.push_back(std::move(truth));
    }

    const std::size_t n_test = static_cast<std::size_t>(
        spec.test_fraction * static_cast<double>(sessions.size()));
    const std::size_t n_train = sessions.size() - n_test;
    out.bundle.train.assign(sessions.begin(), sessions.begin() + n_train);
    out.bundle.test.assign(sessions.begin() + n_train, sessions.end());
    out.bundle.case_id = 1;
    out.bundle.min_count = 1;
    return out;
}

Recovery dependency_recovery(const std::vector<ingest::Session>& sessions,
                             const std::vector<EdgeSet>& truth,
                             const std::vector<std::uint32_t>& topics) {
    if (sessions.size() != truth.size())
        throw std::invalid_argument("truth/session count mismatch");
    std::size_t aig_tp = 0, aig_total = 0, rig_tp = 0, rig_total = 0, truth_total = 0;
    for (std::size_t s = 0; s < sessions.size(); ++s) {
        const auto g = graph::build_session_graph(sessions[s].items, topics);
        std::set<std::pair<std::uint32_t, std::uint32_t>> truth_set(
            truth[s].begin(), truth[s].end());
        truth_total += truth_set.size();

        const std::size_t n = g.num_nodes();
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t w = 0; w < n; ++w)
                if (g.a_out.at(u, w) > 0.0) {
                    ++aig_total;
                    if (truth_set.count({g.nodes[u], g.nodes[w]})) ++aig_tp;
                }
        for (const auto& [u, w] : g.re_edges) {
            ++rig_total;
            if (truth_set.count({g.nodes[u], g.nodes[w]})) ++rig_tp;
        }
    }
    Recovery r;
    r.aig_precision = aig_total ? static_cast<double>(aig_tp) / aig_total : 0.0;
    r.aig_recall = truth_total ? static_cast<double>(aig_tp) / truth_total : 0.0;
    r.rig_precision = rig_total ? static_cast<double>(rig_tp) / rig_total : 0.0;
    r.rig_recall = truth_total ? static_cast<double>(rig_tp) / truth_total : 0.0;
    return r;
}

void save_truth(const SynthOut& out, const std::string& path) {
    io::Writer w(path);
    w.magic(kTruthMagic, kTruthVersion);
    w.u32_vec(out.topic_labels);
    w.u64(out.truth.size());
    for (const auto& edges : out.truth) {
        w.u64(edges.size());
        for (const auto& [u, v] : edges) {
            w.u32(u);
            w.u32(v);
        }
    }
}

void load_truth(const std::string& path, std::vector<EdgeSet>& truth,
                std::vector<std::uint32_t>& topic_labels) {
    io::Reader r(path);
    if (r.magic(kTruthMagic) != kTruthVersion)
        throw std::runtime_error("unsupported truth file version");
    topic_labels = r.u32_vec();
    truth.resize(r.u64());
    for (auto& edges : truth) {
        edges.resize(r.u64());
        for (auto& [u, v] : edges) {
            u = r.u32();
            v = r.u32();
        }
    }
}

SynthSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file: " + path);
    SynthSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key, eq, value;
        if (!(ls >> key)) continue;
        if (!(ls >> eq >> value) || eq != "=")
            throw std::runtime_error("bad spec line " + std::to_string(line_no));
        if (key == "num_topics") spec.num_topics = std::stoul(value);
        else if (key == "items_per_topic") spec.items_per_topic = std::stoul(value);
        else if (key == "vocab_per_topic") spec.vocab_per_topic = std::stoul(value);
        else if (key == "session_count") spec.session_count = std::stoul(value);
        else if (key == "len_min") spec.len_min = std::stoul(value);
        else if (key == "len_max") spec.len_max = std::stoul(value);
        else if (key == "interleave_prob") spec.interleave_prob = std::stod(value);
        else if (key == "review_tokens") spec.review_tokens = std::stoul(value);
        else if (key == "test_fraction") spec.test_fraction = std::stod(value);
        else if (key == "seed") spec.seed = std::stoull(value);
        else throw std::runtime_error("unknown spec key: " + key);
    }
    spec.validate();
    return spec;
}

}  // namespace rignn::synth
