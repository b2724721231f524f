#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rignn/eval.hpp"
#include "rignn/graph.hpp"
#include "rignn/ingest.hpp"
#include "rignn/kernels.hpp"
#include "rignn/model.hpp"
#include "rignn/synth.hpp"
#include "rignn/topics.hpp"
#include "rignn/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return 0;
    std::uint64_t h = 0xCBF29CE484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount())
        for (std::streamsize i = 0; i < in.gcount(); ++i)
            h = (h ^ static_cast<unsigned char>(buf[i])) * 0x100000001B3ull;
    return h;
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::map<std::string, std::string> kv;
    if (path.empty()) return kv;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("config", "cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key, eq, value;
        if (!(ls >> key)) continue;
        if (!(ls >> eq >> value) || eq != "=")
            throw CLI::ValidationError("config", "bad line in " + path + ": " + line);
        kv[key] = value;
    }
    return kv;
}

struct RunConfig {
    rignn::model::ModelConfig model;
    rignn::train::TrainConfig train;
};

// flags > config file > defaults
RunConfig resolve_config(const std::string& config_path,
                         const std::map<std::string, std::string>& overrides) {
    auto kv = read_kv_file(config_path);
    for (const auto& [k, v] : overrides) kv[k] = v;
    RunConfig rc;
    for (const auto& [k, v] : kv) {
        if (k == "d") rc.model.d = std::stoul(v);
        else if (k == "d_w") rc.model.d_w = std::stoul(v);
        else if (k == "heads") rc.model.heads = std::stoul(v);
        else if (k == "d_head") rc.model.d_head = std::stoul(v);
        else if (k == "k") rc.model.k = std::stoul(v);
        else if (k == "steps") rc.model.steps = std::stoul(v);
        else if (k == "dropout") rc.model.dropout = std::stod(v);
        else if (k == "n_max") rc.model.n_max = std::stoul(v);
        else if (k == "max_review_tokens") rc.model.max_review_tokens = std::stoul(v);
        else if (k == "ril_uses_base") rc.model.ril_uses_base = (v == "1" || v == "true");
        else if (k == "variant") rc.model.variant = rignn::model::variant_from_string(v);
        else if (k == "lr") rc.train.learning_rate = std::stod(v);
        else if (k == "batch_size") rc.train.batch_size = std::stoul(v);
        else if (k == "l2") rc.train.l2 = std::stod(v);
        else if (k == "epochs") rc.train.epochs = std::stoul(v);
        else if (k == "seed") rc.train.seed = std::stoull(v);
        else if (k == "val_fraction") rc.train.val_fraction = std::stod(v);
        else throw CLI::ValidationError("config", "unknown config key: " + k);
    }
    return rc;
}

json config_json(const RunConfig& rc) {
    return json{{"d", rc.model.d},
                {"d_w", rc.model.d_w},
                {"heads", rc.model.heads},
                {"d_head", rc.model.d_head},
                {"k", rc.model.k},
                {"steps", rc.model.steps},
                {"dropout", rc.model.dropout},
                {"n_max", rc.model.n_max},
                {"max_review_tokens", rc.model.max_review_tokens},
                {"ril_uses_base", rc.model.ril_uses_base},
                {"variant", rignn::model::to_string(rc.model.variant)},
                {"lr", rc.train.learning_rate},
                {"batch_size", rc.train.batch_size},
                {"l2", rc.train.l2},
                {"epochs", rc.train.epochs},
                {"seed", rc.train.seed},
                {"val_fraction", rc.train.val_fraction}};
}

class Manifest {
public:
    Manifest(std::string command, const fs::path& out_dir)
        : out_dir_(out_dir), start_(std::chrono::steady_clock::now()) {
        doc_["command"] = std::move(command);
        doc_["artifact_version"] = 1;
        fs::create_directories(out_dir);
    }
    void config(const json& j) { doc_["config"] = j; }
    void input(const std::string& name, const std::string& path) {
        doc_["inputs"][name] = {{"path", path}, {"fnv1a", fnv1a_file(path)}};
    }
    void output(const std::string& name, const std::string& path) {
        outputs_[name] = path;
    }
    void extra(const std::string& key, const json& j) { doc_[key] = j; }
    void write() {
        for (const auto& [name, path] : outputs_)
            doc_["outputs"][name] = {{"path", path}, {"fnv1a", fnv1a_file(path)}};
        doc_["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                .count();
        std::ofstream out(out_dir_ / "manifest.json");
        out << doc_.dump(2) << "\n";
    }

private:
    fs::path out_dir_;
    json doc_;
    std::map<std::string, std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

json summary_json(const rignn::eval::Summary& s) {
    return json{{"P@10", s.p10}, {"P@20", s.p20}, {"MRR@10", s.mrr10}, {"MRR@20", s.mrr20}};
}

std::vector<std::uint32_t> parse_u32_list(const std::string& csv) {
    std::vector<std::uint32_t> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) out.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
    return out;
}

rignn::topics::TopicModel fit_topics_for_bundle(const rignn::ingest::Bundle& bundle,
                                                std::uint32_t num_topics,
                                                double alpha, double beta,
                                                std::uint32_t sweeps,
                                                std::uint64_t seed,
                                                std::size_t max_tokens) {
    const auto corpus =
        rignn::topics::tokenize_corpus(bundle.catalog.review_doc, max_tokens);
    return rignn::topics::fit_lda(corpus, num_topics, alpha, beta, sweeps, seed);
}

int cmd_ingest(const std::string& input, std::uint32_t min_count, int window_days,
               int case_id, const std::string& out_dir) {
    Manifest manifest("ingest", out_dir);
    manifest.input("reviews", input);
    auto parsed = rignn::ingest::parse_reviews_file(input);
    auto filtered = rignn::ingest::filter_min_count(parsed.interactions, min_count);
    auto catalog = rignn::ingest::build_catalog(filtered);
    auto sessions = rignn::ingest::build_sessions(filtered, catalog,
                                                  std::int64_t(window_days) * 86400);
    auto split = rignn::ingest::split_train_test(sessions);

    rignn::ingest::Bundle bundle;
    bundle.catalog = std::move(catalog);
    bundle.train = std::move(split.train);
    bundle.test = std::move(split.test);
    bundle.case_id = case_id;
    bundle.min_count = min_count;
    bundle.window_seconds = std::int64_t(window_days) * 86400;
    const std::string bundle_path = (fs::path(out_dir) / "bundle.bin").string();
    rignn::ingest::save_bundle(bundle, bundle_path);

    const auto stats = rignn::ingest::compute_stats(bundle);
    manifest.extra("stats",
                   json{{"parse_errors", parsed.error_count},
                        {"raw_interactions", parsed.interactions.size()},
                        {"interactions", stats.interactions},
                        {"train_sessions", stats.train_sessions},
                        {"test_sessions", stats.test_sessions},
                        {"train_examples", stats.train_examples},
                        {"test_examples", stats.test_examples},
                        {"items", stats.items},
                        {"mean_session_length", stats.mean_session_length}});
    manifest.output("bundle", bundle_path);
    manifest.write();
    std::cerr << "ingest: " << stats.items << " items, " << stats.train_sessions
              << " train / " << stats.test_sessions << " test sessions ("
              << parsed.error_count << " parse errors)\n";
    return 0;
}

int cmd_stats(const std::string& bundle_dir) {
    const auto bundle =
        rignn::ingest::load_bundle((fs::path(bundle_dir) / "bundle.bin").string());
    const auto st = rignn::ingest::compute_stats(bundle);
    json out{{"interactions", st.interactions},
             {"train_sessions", st.train_sessions},
             {"test_sessions", st.test_sessions},
             {"train_examples_after_splitting", st.train_examples},
             {"test_examples_after_splitting", st.test_examples},
             {"items", st.items},
             {"mean_session_length", st.mean_session_length},
             {"case", bundle.case_id}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_graph(const std::string& session_csv, const std::string& topics_csv) {
    const auto session = parse_u32_list(session_csv);
    auto topic_list = parse_u32_list(topics_csv);
    std::vector<std::uint32_t> topics;
    if (!topic_list.empty()) {
        std::uint32_t max_item = 0;
        for (auto v : session) max_item = std::max(max_item, v);
        topics.assign(max_item + 1, rignn::topics::kNoReview);
        if (topic_list.size() != session.size())
            throw CLI::ValidationError("--topics", "need one topic per session item");
        for (std::size_t i = 0; i < session.size(); ++i)
            topics[session[i]] = topic_list[i];
    }
    const auto g = rignn::graph::build_session_graph(session, topics);
    std::cout << "nodes:";
    for (auto v : g.nodes) std::cout << " " << v;
    std::cout << "\naig edges (u -> w, weight):\n";
    for (std::size_t u = 0; u < g.num_nodes(); ++u)
        for (std::size_t w = 0; w < g.num_nodes(); ++w)
            if (g.a_out.at(u, w) > 0.0)
                std::cout << "  " << g.nodes[u] << " -> " << g.nodes[w] << "  "
                          << g.a_out.at(u, w) << "\n";
    std::cout << "rig edges (u -> w, b_out weight):\n";
    for (const auto& [u, w] : g.re_edges)
        std::cout << "  " << g.nodes[u] << " -> " << g.nodes[w] << "  "
                  << g.b_out.at(u, w) << "\n";
    return 0;
}

int cmd_topics(const std::string& corpus_dir, std::uint32_t num_topics, double alpha,
               double beta, std::uint32_t sweeps, std::uint64_t seed,
               const std::string& out_path) {
    const auto bundle =
        rignn::ingest::load_bundle((fs::path(corpus_dir) / "bundle.bin").string());
    if (alpha <= 0.0) alpha = 50.0 / num_topics;
    const auto model =
        fit_topics_for_bundle(bundle, num_topics, alpha, beta, sweeps, seed, 256);
    rignn::topics::save_model(model, out_path);
    std::cerr << "topics: " << model.vocab_size() << " words, " << num_topics
              << " topics, " << sweeps << " sweeps\n";
    return 0;
}

int cmd_train(const std::string& bundle_dir, const std::string& topics_path,
              const std::string& config_path,
              const std::map<std::string, std::string>& overrides,
              const std::string& out_dir) {
    const RunConfig rc = resolve_config(config_path, overrides);
    Manifest manifest("train", out_dir);
    const std::string bundle_path = (fs::path(bundle_dir) / "bundle.bin").string();
    manifest.input("bundle", bundle_path);
    manifest.input("topics", topics_path);
    manifest.config(config_json(rc));

    const auto bundle = rignn::ingest::load_bundle(bundle_path);
    const auto topic_model = rignn::topics::load_model(topics_path);
    const auto items = rignn::model::item_data_from_topics(topic_model);

    const auto result = rignn::train::train_on_sessions(rc.model, items, bundle.train,
                                                        bundle.case_id, rc.train);

    const std::string log_path = (fs::path(out_dir) / "metrics.log").string();
    {
        std::ofstream log(log_path);
        for (const auto& e : result.log)
            log << json{{"epoch", e.epoch},
                        {"loss", e.loss},
                        {"P@10", e.val.p10},
                        {"P@20", e.val.p20},
                        {"MRR@10", e.val.mrr10},
                        {"MRR@20", e.val.mrr20}}
                       .dump()
                << "\n";
    }
    const std::string ckpt_path = (fs::path(out_dir) / "checkpoint.bin").string();
    result.best_params.save(ckpt_path);
    manifest.output("checkpoint", ckpt_path);
    manifest.output("metrics_log", log_path);
    manifest.extra("best_epoch", result.best_epoch);
    manifest.extra("diverged", result.diverged);
    manifest.write();
    if (result.diverged) {
        std::cerr << "train: diverged, kept last good checkpoint\n";
        return 2;
    }
    std::cerr << "train: best epoch " << result.best_epoch << "\n";
    return 0;
}

int cmd_eval(const std::string& bundle_dir, const std::string& ckpt_path,
             const std::string& topics_path, const std::string& config_path,
             const std::map<std::string, std::string>& overrides,
             const std::string& out_path, const std::string& cutoffs_csv,
             bool with_baselines) {
    const auto cutoffs = parse_u32_list(cutoffs_csv);
    if (cutoffs.empty()) throw CLI::ValidationError("--k", "need at least one cutoff");
    std::size_t depth = 0;
    for (auto k : cutoffs) {
        if (k == 0) throw CLI::ValidationError("--k", "cutoffs must be positive");
        depth = std::max<std::size_t>(depth, k);
    }
    const auto metrics_at = [&](const std::vector<rignn::eval::RankedResult>& r) {
        json j;
        for (auto k : cutoffs) {
            j["P@" + std::to_string(k)] = rignn::eval::precision_at_k(r, k);
            j["MRR@" + std::to_string(k)] = rignn::eval::mrr_at_k(r, k);
        }
        return j;
    };
    const RunConfig rc = resolve_config(config_path, overrides);
    const std::string bundle_path = (fs::path(bundle_dir) / "bundle.bin").string();
    const auto bundle = rignn::ingest::load_bundle(bundle_path);
    const auto topic_model = rignn::topics::load_model(topics_path);
    const auto items = rignn::model::item_data_from_topics(topic_model);
    auto params = rignn::model::ParameterSet::load(ckpt_path);

    std::vector<rignn::ingest::SequenceExample> test_ex;
    for (const auto& s : bundle.test) {
        auto ex = rignn::ingest::sequence_split(s, bundle.case_id);
        test_ex.insert(test_ex.end(), ex.begin(), ex.end());
    }
    if (test_ex.empty()) throw CLI::ValidationError("bundle", "no test examples");

    json out;
    out["config"] = config_json(rc);
    out["inputs"] = {{"bundle_fnv1a", fnv1a_file(bundle_path)},
                     {"checkpoint_fnv1a", fnv1a_file(ckpt_path)},
                     {"topics_fnv1a", fnv1a_file(topics_path)}};
    out["model"] = metrics_at(
        rignn::eval::rank_examples(rc.model, params, items, test_ex, depth));

    if (with_baselines) {
        const auto index =
            rignn::eval::KnnIndex::build(bundle.train, bundle.catalog.size());
        std::vector<rignn::eval::RankedResult> pop_results, knn_results;
        for (const auto& ex : test_ex) {
            pop_results.push_back(
                {rignn::eval::s_pop(ex.prefix, index.global_counts, depth),
                 ex.label});
            knn_results.push_back(
                {rignn::eval::s_knn(ex.prefix, index, 500, depth), ex.label});
        }
        out["s_pop"] = metrics_at(pop_results);
        out["s_knn"] = metrics_at(knn_results);
    }

    std::ofstream f(out_path);
    f << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_ablate(const std::string& bundle_dir, const std::string& topics_path,
               const std::string& config_path,
               const std::map<std::string, std::string>& overrides,
               std::size_t num_seeds, const std::string& out_dir) {
    const RunConfig base = resolve_config(config_path, overrides);
    Manifest manifest("ablate", out_dir);
    const std::string bundle_path = (fs::path(bundle_dir) / "bundle.bin").string();
    manifest.input("bundle", bundle_path);
    manifest.input("topics", topics_path);
    manifest.config(config_json(base));

    const auto bundle = rignn::ingest::load_bundle(bundle_path);
    const auto topic_model = rignn::topics::load_model(topics_path);
    const auto items = rignn::model::item_data_from_topics(topic_model);

    std::vector<rignn::ingest::SequenceExample> test_ex;
    for (const auto& s : bundle.test) {
        auto ex = rignn::ingest::sequence_split(s, bundle.case_id);
        test_ex.insert(test_ex.end(), ex.begin(), ex.end());
    }

    using rignn::model::Variant;
    const Variant variants[] = {Variant::full, Variant::no_ril, Variant::no_topic,
                                Variant::no_review};
    json out;
    std::map<std::string, std::vector<double>> mrr10_by_variant;
    for (const Variant v : variants) {
        RunConfig rc = base;
        rc.model.variant = v;
        json per_seed = json::array();
        for (std::size_t s = 0; s < num_seeds; ++s) {
            rc.train.seed = base.train.seed + s;
            auto result = rignn::train::train_on_sessions(
                rc.model, items, bundle.train, bundle.case_id, rc.train);
            const auto summary = rignn::eval::summarize(rignn::eval::rank_examples(
                rc.model, result.best_params, items, test_ex));
            per_seed.push_back(summary_json(summary));
            mrr10_by_variant[rignn::model::to_string(v)].push_back(summary.mrr10);
        }
        out["variants"][rignn::model::to_string(v)] = per_seed;
        std::cerr << "ablate: " << rignn::model::to_string(v) << " done\n";
    }
    for (const auto& [name, scores] : mrr10_by_variant) {
        if (name == "full") continue;
        out["paired_p_vs_full"][name] =
            rignn::eval::paired_t_test_p(mrr10_by_variant["full"], scores);
    }
    const std::string out_path = (fs::path(out_dir) / "ablation.json").string();
    std::ofstream f(out_path);
    f << out.dump(2) << "\n";
    manifest.output("ablation", out_path);
    manifest.write();
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    Manifest manifest("synth", out_dir);
    rignn::synth::SynthSpec spec;
    if (!spec_path.empty()) {
        manifest.input("spec", spec_path);
        spec = rignn::synth::parse_spec_file(spec_path);
    }
    const auto out = rignn::synth::generate(spec);
    const std::string bundle_path = (fs::path(out_dir) / "bundle.bin").string();
    const std::string truth_path = (fs::path(out_dir) / "truth.bin").string();
    rignn::ingest::save_bundle(out.bundle, bundle_path);
    rignn::synth::save_truth(out, truth_path);

    std::vector<rignn::ingest::Session> all = out.bundle.train;
    all.insert(all.end(), out.bundle.test.begin(), out.bundle.test.end());
    const auto rec =
        rignn::synth::dependency_recovery(all, out.truth, out.topic_labels);
    manifest.extra("recovery_oracle_topics",
                   json{{"aig_precision", rec.aig_precision},
                        {"aig_recall", rec.aig_recall},
                        {"rig_precision", rec.rig_precision},
                        {"rig_recall", rec.rig_recall}});
    manifest.output("bundle", bundle_path);
    manifest.output("truth", truth_path);
    manifest.write();
    std::cerr << "synth: AIG p/r " << rec.aig_precision << "/" << rec.aig_recall
              << ", RIG p/r " << rec.rig_precision << "/" << rec.rig_recall << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RI-GNN session-based recommendation pipeline"};
    app.require_subcommand(1);
    std::string kernels = "auto";
    app.add_option("--kernels", kernels, "kernel set: auto|scalar|avx2");

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "parse reviews into a corpus bundle");
    std::string in_path, out_dir;
    std::uint32_t min_count = 5;
    int window_days = 7, case_id = 1;
    ingest_cmd->add_option("--input", in_path, "review dump (.json or .json.gz)")->required();
    ingest_cmd->add_option("--min-count", min_count);
    ingest_cmd->add_option("--window-days", window_days);
    ingest_cmd->add_option("--case", case_id)->check(CLI::Range(1, 2));
    ingest_cmd->add_option("--out", out_dir)->required();

    // topics
    auto* topics_cmd = app.add_subcommand("topics", "fit the LDA topic model");
    std::string corpus_dir, topics_out;
    std::uint32_t num_topics = 24, sweeps = 500;
    double alpha = 0.0, beta = 0.01;
    std::uint64_t topics_seed = 1;
    topics_cmd->add_option("--corpus", corpus_dir, "bundle directory")->required();
    topics_cmd->add_option("--num-topics", num_topics);
    topics_cmd->add_option("--alpha", alpha, "default 50/T");
    topics_cmd->add_option("--beta", beta);
    topics_cmd->add_option("--sweeps", sweeps);
    topics_cmd->add_option("--seed", topics_seed);
    topics_cmd->add_option("--out", topics_out)->required();

    // graph
    auto* graph_cmd = app.add_subcommand("graph", "print both graphs for a session");
    std::string session_csv, topics_csv;
    graph_cmd->add_option("--session", session_csv, "comma-separated item indices")->required();
    graph_cmd->add_option("--topics", topics_csv, "comma-separated topic per item");

    // shared train/eval options
    std::string bundle_dir, topics_path, config_path, ckpt_path, metrics_out = "metrics.json";
    std::map<std::string, std::string> overrides;
    auto add_override_opt = [&overrides](CLI::App* cmd) {
        cmd->add_option_function<std::vector<std::string>>(
            "--set",
            [&overrides](const std::vector<std::string>& kvs) {
                for (const auto& kv : kvs) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos)
                        throw CLI::ValidationError("--set", "expected key=value");
                    overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
                }
            },
            "config overrides, key=value");
    };

    auto* train_cmd = app.add_subcommand("train", "train a model");
    train_cmd->add_option("--bundle", bundle_dir)->required();
    train_cmd->add_option("--topics", topics_path)->required();
    train_cmd->add_option("--config", config_path);
    train_cmd->add_option("--out", out_dir)->required();
    add_override_opt(train_cmd);

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
    bool with_baselines = false;
    std::string cutoffs_csv = "10,20";
    eval_cmd->add_option("--k", cutoffs_csv, "comma-separated ranking cutoffs");
    eval_cmd->add_option("--bundle", bundle_dir)->required();
    eval_cmd->add_option("--checkpoint", ckpt_path)->required();
    eval_cmd->add_option("--topics", topics_path)->required();
    eval_cmd->add_option("--config", config_path);
    eval_cmd->add_option("--out", metrics_out);
    eval_cmd->add_flag("--baselines", with_baselines, "also score S-POP and S-KNN");
    add_override_opt(eval_cmd);

    auto* ablate_cmd = app.add_subcommand("ablate", "train and compare ablation variants");
    std::size_t num_seeds = 5;
    ablate_cmd->add_option("--bundle", bundle_dir)->required();
    ablate_cmd->add_option("--topics", topics_path)->required();
    ablate_cmd->add_option("--config", config_path);
    ablate_cmd->add_option("--seeds", num_seeds);
    ablate_cmd->add_option("--out", out_dir)->required();
    add_override_opt(ablate_cmd);

    auto* synth_cmd = app.add_subcommand("synth", "generate a planted-dependency corpus");
    std::string spec_path;
    synth_cmd->add_option("--spec", spec_path, "key = value spec file");
    synth_cmd->add_option("--out", out_dir)->required();

    auto* stats_cmd = app.add_subcommand("stats", "print corpus statistics");
    stats_cmd->add_option("--bundle", bundle_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        rignn::kernels::force(kernels.c_str());
        if (app.got_subcommand(ingest_cmd))
            return cmd_ingest(in_path, min_count, window_days, case_id, out_dir);
        if (app.got_subcommand(topics_cmd))
            return cmd_topics(corpus_dir, num_topics, alpha, beta, sweeps, topics_seed,
                              topics_out);
        if (app.got_subcommand(graph_cmd)) return cmd_graph(session_csv, topics_csv);
        if (app.got_subcommand(train_cmd))
            return cmd_train(bundle_dir, topics_path, config_path, overrides, out_dir);
        if (app.got_subcommand(eval_cmd))
            return cmd_eval(bundle_dir, ckpt_path, topics_path, config_path, overrides,
                            metrics_out, cutoffs_csv, with_baselines);
        if (app.got_subcommand(ablate_cmd))
            return cmd_ablate(bundle_dir, topics_path, config_path, overrides,
                              num_seeds, out_dir);
        if (app.got_subcommand(synth_cmd)) return cmd_synth(spec_path, out_dir);
        if (app.got_subcommand(stats_cmd)) return cmd_stats(bundle_dir);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
