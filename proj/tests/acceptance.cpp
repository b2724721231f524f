// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any gating criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "rignn/eval.hpp"
#include "rignn/graph.hpp"
#include "rignn/ingest.hpp"
#include "rignn/synth.hpp"
#include "rignn/topics.hpp"
#include "rignn/train.hpp"

using namespace rignn;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void report(int criterion, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::printf("criterion %2d: %s  %s\n", criterion, ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// independent brute-force graph enumerator (duplicated on purpose; the unit
// suite has its own copy)
struct BruteGraph {
    std::vector<std::uint32_t> nodes;
    std::vector<std::vector<double>> a_out, a_in;
    std::set<std::pair<std::size_t, std::size_t>> rig;
};

BruteGraph brute_force(const std::vector<std::uint32_t>& session,
                       const std::vector<std::uint32_t>& topics) {
    BruteGraph o;
    std::map<std::uint32_t, std::size_t> slot;
    for (auto item : session)
        if (!slot.count(item)) {
            slot[item] = o.nodes.size();
            o.nodes.push_back(item);
        }
    const std::size_t n = o.nodes.size();
    std::vector<std::vector<double>> count(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i + 1 < session.size(); ++i) {
        const std::size_t u = slot[session[i]], w = slot[session[i + 1]];
        if (u != w) count[u][w] += 1.0;
    }
    o.a_out.assign(n, std::vector<double>(n, 0.0));
    o.a_in.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t u = 0; u < n; ++u) {
        double deg = 0.0;
        for (std::size_t w = 0; w < n; ++w) deg += count[u][w];
        for (std::size_t w = 0; w < n; ++w)
            if (deg > 0.0) o.a_out[u][w] = count[u][w] / deg;
    }
    for (std::size_t w = 0; w < n; ++w) {
        double deg = 0.0;
        for (std::size_t u = 0; u < n; ++u) deg += count[u][w];
        for (std::size_t u = 0; u < n; ++u)
            if (deg > 0.0) o.a_in[w][u] = count[u][w] / deg;
    }
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t w = u + 1; w < n; ++w) {
            const std::uint32_t tu = topics[o.nodes[u]];
            const std::uint32_t tw = topics[o.nodes[w]];
            if (tu != topics::kNoReview && tu == tw) o.rig.emplace(u, w);
        }
    return o;
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t len = 1 + rng.next_below(8);
        std::vector<std::uint32_t> session(len);
        for (auto& v : session) v = static_cast<std::uint32_t>(rng.next_below(12));
        std::vector<std::uint32_t> topics(12);
        for (auto& t : topics) {
            const auto r = rng.next_below(5);
            t = r == 4 ? topics::kNoReview : static_cast<std::uint32_t>(r);
        }
        const auto g = graph::build_session_graph(session, topics);
        const auto o = brute_force(session, topics);
        bool ok = g.nodes == o.nodes;
        if (ok)
            for (std::size_t i = 0; i < o.nodes.size() && ok; ++i)
                for (std::size_t j = 0; j < o.nodes.size(); ++j)
                    if (std::fabs(g.a_out.at(i, j) - o.a_out[i][j]) > 1e-12 ||
                        std::fabs(g.a_in.at(i, j) - o.a_in[i][j]) > 1e-12) {
                        ok = false;
                        break;
                    }
        if (ok)
            ok = std::set<std::pair<std::size_t, std::size_t>>(
                     g.re_edges.begin(), g.re_edges.end()) == o.rig;
        if (!ok) ++mismatches;
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "graph builders vs brute force, 10000 sessions, " << mismatches
      << " mismatches, " << secs << " s";
    report(1, mismatches == 0 && secs < 30.0, d.str());
}

void criterion_2() {
    const std::vector<std::uint32_t> topics{7, 3, 7};
    const auto g = graph::build_session_graph({0, 1, 2}, topics);
    const bool only_skip_edge =
        g.re_edges.size() == 1 &&
        g.re_edges[0] == std::pair<std::size_t, std::size_t>{0, 2};
    const bool adjacents_dropped = g.b_out.at(0, 1) == 0.0 && g.b_out.at(1, 2) == 0.0;
    report(2, only_skip_edge && adjacents_dropped,
           "topics (t,t',t) refine to exactly the first-to-third edge");
}

model::ModelConfig small_model() {
    model::ModelConfig cfg;
    cfg.d = 4;
    cfg.d_w = 4;
    cfg.heads = 2;
    cfg.d_head = 3;
    cfg.k = 2;
    cfg.dropout = 0.0;
    cfg.n_max = 8;
    return cfg;
}

model::ItemData small_items() {
    model::ItemData items;
    items.review_tokens = {{0, 1}, {1, 2}, {3}, {0, 3}, {2}, {}};
    items.topics = {0, 0, 0, 1, 1, topics::kNoReview};
    return items;
}

void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = small_model();
    const auto items = small_items();
    Rng rng(103);
    model::ParameterSet params(cfg, items.num_items(), 4, rng);
    const std::vector<ingest::SequenceExample> batch{
        {{0, 1, 2}, 3}, {{4, 3}, 0}, {{5, 0, 1, 0}, 2}};
    // central differences with a 1e-4 step: a smaller step leaves the
    // difference quotient dominated by cancellation on the flattest entries
    const auto fd =
        train::model_fd_check(cfg, params, items, batch, 1e-5, 1e-4, 0, 7);
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "finite differences over every parameter entry, max rel err "
      << fd.max_rel_err << ", " << secs << " s";
    report(3, fd.max_rel_err < 1e-4 && secs < 120.0, d.str());
}

void criterion_4() {
    const auto cfg = small_model();
    const auto items = small_items();
    Rng rng(104);
    model::ParameterSet params(cfg, items.num_items(), 4, rng);
    bool sums_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        Rng r(1000 + trial);
        std::vector<std::uint32_t> prefix;
        const std::size_t len = 1 + r.next_below(5);
        for (std::size_t i = 0; i < len; ++i)
            prefix.push_back(
                static_cast<std::uint32_t>(r.next_below(items.num_items())));
        const Array y = model::predict_scores(cfg, params, items, prefix);
        double total = 0.0;
        for (double v : y.data) total += v;
        if (std::fabs(total - 1.0) > 1e-9) sums_ok = false;
    }

    bool metrics_ok = true;
    Rng mr(105);
    std::vector<eval::RankedResult> results;
    for (int i = 0; i < 1000; ++i) {
        eval::RankedResult r;
        std::vector<std::uint32_t> pool(25);
        for (std::size_t j = 0; j < pool.size(); ++j)
            pool[j] = static_cast<std::uint32_t>(j);
        for (std::size_t j = pool.size(); j > 1; --j)
            std::swap(pool[j - 1], pool[mr.next_below(j)]);
        r.top.assign(pool.begin(), pool.begin() + 20);
        r.label = static_cast<std::uint32_t>(mr.next_below(25));
        results.push_back(std::move(r));
    }
    for (std::size_t k : {10, 20}) {
        double hits = 0.0, rr = 0.0;
        for (const auto& r : results)
            for (std::size_t i = 0; i < std::min(k, r.top.size()); ++i)
                if (r.top[i] == r.label) {
                    hits += 1.0;
                    rr += 1.0 / static_cast<double>(i + 1);
                    break;
                }
        const double n = static_cast<double>(results.size());
        if (eval::precision_at_k(results, k) != 100.0 * hits / n) metrics_ok = false;
        if (eval::mrr_at_k(results, k) != 100.0 * rr / n) metrics_ok = false;
    }

    eval::RankedResult hand;
    hand.top = {4, 5, 9, 1, 2, 3, 6, 7, 8, 0};
    hand.label = 9;  // rank 3
    const bool hand_ok =
        eval::precision_at_k({hand}, 10) == 100.0 &&
        std::fabs(eval::mrr_at_k({hand}, 10) - 100.0 / 3.0) < 1e-9;
    report(4, sums_ok && metrics_ok && hand_ok,
           "probability normalization, metric oracle on 1000 lists, hand cases");
}

void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = small_model();
    cfg.d = 8;
    model::ItemData items;
    const std::size_t m = 10;
    for (std::size_t i = 0; i < m; ++i) {
        items.review_tokens.push_back({static_cast<std::uint32_t>(i % 4)});
        items.topics.push_back(static_cast<std::uint32_t>(i % 3));
    }
    std::vector<ingest::SequenceExample> examples;
    for (std::uint32_t i = 0; i < m; ++i) {
        examples.push_back({{i}, (i + 1) % static_cast<std::uint32_t>(m)});
        examples.push_back({{i, (i + 1) % static_cast<std::uint32_t>(m)},
                            (i + 2) % static_cast<std::uint32_t>(m)});
    }

    train::TrainConfig tc;
    tc.learning_rate = 0.05;
    tc.batch_size = 20;
    tc.l2 = 0.0;
    tc.epochs = 200;
    tc.seed = 105;
    const auto result = train::train_on_examples(cfg, items, examples, {}, tc);
    auto params = result.best_params;
    const auto ranked = eval::rank_examples(cfg, params, items, examples, 1);
    const double p1 = eval::precision_at_k(ranked, 1);
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "20-example corpus, train P@1 " << p1 << "%, " << secs << " s";
    report(5, !result.diverged && p1 >= 90.0 && secs < 60.0, d.str());
}

void criterion_6() {
    std::vector<std::string> docs;
    for (int d = 0; d < 20; ++d) {
        std::string doc;
        for (int w = 0; w < 12; ++w) doc += "alpha" + std::to_string((d + w) % 8) + " ";
        docs.push_back(doc);
    }
    for (int d = 0; d < 20; ++d) {
        std::string doc;
        for (int w = 0; w < 12; ++w) doc += "bravo" + std::to_string((d + w) % 8) + " ";
        docs.push_back(doc);
    }
    const auto corpus = topics::tokenize_corpus(docs, 0);

    bool purity_ok = true;
    double worst = 1.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto m = topics::fit_lda(corpus, 2, 1.0, 0.01, 200, seed);
        std::size_t match = 0, swapped = 0;
        for (std::size_t d = 0; d < m.dominant.size(); ++d) {
            const std::uint32_t truth = d < 20 ? 0 : 1;
            if (m.dominant[d] == truth) ++match;
            if (m.dominant[d] == 1 - truth) ++swapped;
        }
        const double purity = static_cast<double>(std::max(match, swapped)) / 40.0;
        worst = std::min(worst, purity);
        if (purity < 0.95) purity_ok = false;
    }
    const auto a = topics::fit_lda(corpus, 2, 1.0, 0.01, 50, 42);
    const auto b = topics::fit_lda(corpus, 2, 1.0, 0.01, 50, 42);
    const bool repeat_ok = a.assignments == b.assignments &&
                           a.topic_word_counts == b.topic_word_counts &&
                           a.dominant == b.dominant;
    std::ostringstream d;
    d << "two-topic corpus, worst purity " << worst
      << ", repeated seed bit-identical " << (repeat_ok ? "yes" : "no");
    report(6, purity_ok && repeat_ok, d.str());
}

struct AblationScores {
    std::map<std::string, std::vector<double>> mrr10;
};

AblationScores run_ablations(const synth::SynthOut& corpus, double& recovery_gap,
                             double& rig_recall) {
    std::vector<ingest::Session> all = corpus.bundle.train;
    all.insert(all.end(), corpus.bundle.test.begin(), corpus.bundle.test.end());
    const auto rec =
        synth::dependency_recovery(all, corpus.truth, corpus.topic_labels);
    recovery_gap = rec.rig_precision - rec.aig_precision;
    rig_recall = rec.rig_recall;

    model::ItemData items;
    items.topics = corpus.topic_labels;
    // oracle reviews: two tokens identify the item's topic, and position
    // tokens overlap for ring neighbors at the two walk strides, so review
    // similarity carries which same-topic items precede one another
    const std::uint32_t num_topics =
        corpus.topic_labels.empty() ? 0 : corpus.topic_labels.back() + 1;
    const std::uint32_t ring = static_cast<std::uint32_t>(
        corpus.topic_labels.size() / std::max<std::uint32_t>(num_topics, 1));
    for (std::uint32_t i = 0; i < corpus.topic_labels.size(); ++i) {
        const std::uint32_t t = corpus.topic_labels[i];
        const std::uint32_t o = i % ring;
        items.review_tokens.push_back(
            {t * 2, t * 2 + 1, 2 * num_topics + o, 2 * num_topics + (o + 1) % ring,
             2 * num_topics + ring + o, 2 * num_topics + ring + (o + 5) % ring});
    }

    std::vector<ingest::SequenceExample> test_ex;
    for (const auto& s : corpus.bundle.test) {
        auto ex = ingest::sequence_split(s, 1);
        test_ex.insert(test_ex.end(), ex.begin(), ex.end());
    }

    model::ModelConfig cfg;
    cfg.d = 16;
    cfg.d_w = 8;
    cfg.heads = 1;
    cfg.d_head = 8;
    cfg.k = 2;
    cfg.dropout = 0.0;
    cfg.n_max = 16;

    AblationScores scores;
    for (const model::Variant v :
         {model::Variant::full, model::Variant::no_ril, model::Variant::no_topic,
          model::Variant::no_review}) {
        auto c = cfg;
        c.variant = v;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            train::TrainConfig tc;
            tc.learning_rate = 0.01;
            tc.batch_size = 100;
            tc.l2 = 1e-5;
            tc.epochs = 12;
            tc.seed = seed;
            tc.val_fraction = 0.1;
            auto result = train::train_on_sessions(c, items, corpus.bundle.train,
                                                   1, tc);
            const auto summary = eval::summarize(
                eval::rank_examples(c, result.best_params, items, test_ex));
            scores.mrr10[model::to_string(v)].push_back(summary.mrr10);
        }
    }
    return scores;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

void criteria_7_8() {
    const auto t0 = std::chrono::steady_clock::now();
    synth::SynthSpec spec;
    spec.num_topics = 8;
    spec.items_per_topic = 12;
    spec.session_count = 2000;
    spec.interleave_prob = 0.5;
    spec.len_min = 6;
    spec.len_max = 10;
    spec.seed = 7;
    const auto corpus = synth::generate(spec);

    double gap = 0.0, recall = 0.0;
    const auto scores = run_ablations(corpus, gap, recall);
    const double secs = seconds_since(t0);

    const auto& full = scores.mrr10.at("full");
    const auto& no_ril = scores.mrr10.at("no-ril");
    const double p = eval::paired_t_test_p(full, no_ril);
    const bool beats = mean(full) > mean(no_ril) && p < 0.05;
    std::ostringstream d7;
    d7 << "rig recall " << recall << ", precision gap " << gap << "; full MRR@10 "
       << mean(full) << " vs -ril " << mean(no_ril) << ", p " << p << ", " << secs
       << " s";
    report(7, recall == 1.0 && gap > 0.0 && beats && secs < 1800.0, d7.str());

    bool ordering = true;
    std::ostringstream d8;
    d8 << "mean MRR@10 full " << mean(full);
    for (const auto& name : {"no-ril", "no-topic", "no-review"}) {
        const double m = mean(scores.mrr10.at(name));
        d8 << ", " << name << " " << m;
        if (mean(full) < m) ordering = false;
    }
    report(8, ordering, d8.str());
}

void criterion_9() {
    const auto cfg = small_model();
    const auto items = small_items();
    std::vector<ingest::SequenceExample> examples;
    for (std::uint32_t i = 0; i < 6; ++i)
        examples.push_back({{i}, (i + 1) % 6});
    std::vector<ingest::SequenceExample> val(examples.begin(), examples.begin() + 3);

    train::TrainConfig tc;
    tc.epochs = 4;
    tc.seed = 109;
    tc.batch_size = 3;
    const auto a = train::train_on_examples(cfg, items, examples, val, tc);
    const auto b = train::train_on_examples(cfg, items, examples, val, tc);
    bool logs_ok = a.log.size() == b.log.size();
    for (std::size_t i = 0; logs_ok && i < a.log.size(); ++i)
        logs_ok = a.log[i].loss == b.log[i].loss &&
                  a.log[i].val.p10 == b.log[i].val.p10 &&
                  a.log[i].val.mrr20 == b.log[i].val.mrr20;

    const std::string c1 = "/tmp/rignn_acc_ckpt1.bin";
    const std::string c2 = "/tmp/rignn_acc_ckpt2.bin";
    a.best_params.save(c1);
    model::ParameterSet::load(c1).save(c2);
    const bool ckpt_ok = read_file(c1) == read_file(c2);
    std::remove(c1.c_str());
    std::remove(c2.c_str());

    const auto corpus = synth::generate(synth::SynthSpec{});
    const std::string b1 = "/tmp/rignn_acc_bundle1.bin";
    const std::string b2 = "/tmp/rignn_acc_bundle2.bin";
    ingest::save_bundle(corpus.bundle, b1);
    ingest::save_bundle(ingest::load_bundle(b1), b2);
    const bool bundle_ok = read_file(b1) == read_file(b2);
    std::remove(b1.c_str());
    std::remove(b2.c_str());

    report(9, logs_ok && ckpt_ok && bundle_ok,
           "repeated-seed logs identical, checkpoint and bundle round-trips bit-exact");
}

void criterion_10() {
    // informational only: the real-data ingest protocol is exercised end to
    // end on a miniature dump and the stats fields are cross-checked
    std::ostringstream dump;
    for (int u = 0; u < 6; ++u)
        for (int i = 0; i < 4; ++i)
            dump << "{\"reviewerID\":\"u" << u << "\",\"asin\":\"item" << (u + i) % 8
                 << "\",\"unixReviewTime\":" << 1000000 + u * 100 * 86400 + i * 10
                 << ",\"reviewText\":\"sample review text number " << i << "\"}\n";
    std::istringstream in(dump.str());
    const auto parsed = ingest::parse_reviews(in);
    const auto kept = ingest::filter_min_count(parsed.interactions, 2);
    const auto cat = ingest::build_catalog(kept);
    const auto sessions = ingest::build_sessions(kept, cat, 7 * 86400);
    const auto split = ingest::split_train_test(sessions);

    ingest::Bundle bundle;
    bundle.catalog = cat;
    bundle.train = split.train;
    bundle.test = split.test;
    bundle.case_id = 1;
    const auto st = ingest::compute_stats(bundle);
    const double expect_mean =
        st.train_sessions + st.test_sessions == 0
            ? 0.0
            : static_cast<double>(st.interactions) /
                  static_cast<double>(st.train_sessions + st.test_sessions);
    const bool consistent = std::fabs(st.mean_session_length - expect_mean) < 1e-12;
    std::ostringstream d;
    d << "(informational) ingest protocol smoke: " << st.interactions
      << " interactions, mean session length consistent "
      << (consistent ? "yes" : "no");
    // documented comparison only; does not gate
    std::printf("criterion 10: %s  %s\n", consistent ? "PASS" : "NOTE", d.str().c_str());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criteria_7_8();
    criterion_9();
    criterion_10();
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all gating criteria passed\n");
    return 0;
}
