#include "rignn/model.hpp"

#include <cmath>
#include <stdexcept>

#include "rignn/kernels.hpp"

namespace rignn::model {

ItemData item_data_from_topics(const topics::TopicModel& m) {
    ItemData data;
    data.review_tokens = m.docs;
    data.topics = m.dominant;
    return data;
}

BatchGraph::BatchGraph(const ModelConfig& cfg, ParameterSet& params,
                       const ItemData& items, bool train,
                       std::uint64_t dropout_seed)
    : cfg_(cfg),
      params_(params),
      items_(items),
      train_(train),
      dropout_rng_(dropout_seed) {
    cfg_.validate();
    for (std::size_t i = 0; i < params_.count(); ++i) {
        const ad::NodeId id = tape_.leaf(params_.value_at(i));
        leaves_.push_back(id);
        leaf_by_name_.emplace(params_.name_at(i), id);
    }
}

ad::NodeId BatchGraph::param(const std::string& name) {
    auto it = leaf_by_name_.find(name);
    if (it == leaf_by_name_.end()) throw std::out_of_range("no leaf for " + name);
    return it->second;
}

ad::NodeId BatchGraph::review_encoding(std::uint32_t item) {
    auto cached = review_cache_.find(item);
    if (cached != review_cache_.end()) return cached->second;

    ad::NodeId r;
    const auto& tokens = items_.review_tokens[item];
    if (tokens.empty()) {
        r = tape_.leaf(Array({1, cfg_.d_w}));
    } else {
        std::vector<std::size_t> rows(tokens.begin(), tokens.end());
        if (rows.size() > cfg_.max_review_tokens) rows.resize(cfg_.max_review_tokens);
        const ad::NodeId E = tape_.gather_rows(param("word_emb"), rows);
        const double inv_scale = 1.0 / std::sqrt(static_cast<double>(cfg_.d_head));
        std::vector<ad::NodeId> heads;
        for (std::size_t h = 0; h < cfg_.heads; ++h) {
            const std::string tag = std::to_string(h);
            const ad::NodeId q = tape_.matmul(E, param("att_q_" + tag));
            const ad::NodeId k = tape_.matmul(E, param("att_k_" + tag));
            const ad::NodeId v = tape_.matmul(E, param("att_v_" + tag));
            const ad::NodeId att =
                tape_.softmax_rows(tape_.scale(tape_.matmul_nt(q, k), inv_scale));
            heads.push_back(tape_.matmul(att, v));
        }
        const ad::NodeId joined = tape_.matmul(tape_.concat_cols(heads), param("W_1"));
        r = tape_.mean_rows(joined);
    }
    review_cache_.emplace(item, r);
    return r;
}

ad::NodeId BatchGraph::ail_layer(const graph::SessionGraph& g, ad::NodeId states) {
    const std::size_t d = cfg_.d;
    const ad::NodeId a_out = tape_.leaf(g.a_out);
    const ad::NodeId a_in = tape_.leaf(g.a_in);
    ad::NodeId s = states;
    for (std::size_t step = 0; step < cfg_.steps; ++step) {
        const ad::NodeId t = tape_.matmul(s, param("H"));
        const ad::NodeId agg = tape_.concat_cols(
            {tape_.matmul(a_out, tape_.slice_cols(t, 0, d)),
             tape_.matmul(a_in, tape_.slice_cols(t, d, d))});
        const ad::NodeId a = tape_.add_rowvec(agg, param("b_1"));
        const ad::NodeId z = tape_.sigmoid(
            tape_.add(tape_.matmul_nt(a, param("W_z")), tape_.matmul_nt(s, param("U_z"))));
        const ad::NodeId r = tape_.sigmoid(
            tape_.add(tape_.matmul_nt(a, param("W_r")), tape_.matmul_nt(s, param("U_r"))));
        const ad::NodeId cand = tape_.tanh_(
            tape_.add(tape_.matmul_nt(a, param("W_o")),
                      tape_.matmul_nt(tape_.mul(r, s), param("U_o"))));
        // h = (1 - z) ⊙ h_prev + z ⊙ cand
        s = tape_.add(tape_.sub(s, tape_.mul(z, s)), tape_.mul(z, cand));
    }
    return s;
}

ad::NodeId BatchGraph::ril_layer(const graph::SessionGraph& g, ad::NodeId states,
                                 ad::NodeId base) {
    const ad::NodeId src = cfg_.ril_uses_base ? base : states;
    std::vector<ad::NodeId> rows;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        const auto& nbrs = g.re_neighbors[i];
        if (nbrs.empty()) {
            rows.push_back(tape_.row(states, i));
            continue;
        }
        const ad::NodeId neighbor_states = tape_.gather_rows(src, nbrs);
        if (cfg_.variant == Variant::no_review) {
            rows.push_back(tape_.mean_rows(neighbor_states));
            continue;
        }
        const ad::NodeId ri = review_encoding(g.nodes[i]);
        std::vector<ad::NodeId> sims;
        for (std::size_t j : nbrs)
            sims.push_back(tape_.cosine(ri, review_encoding(g.nodes[j])));
        const ad::NodeId weights = tape_.softmax_rows(tape_.stack_scalars(sims));
        rows.push_back(tape_.matmul(weights, neighbor_states));
    }
    return tape_.concat_rows(rows);
}

ad::NodeId BatchGraph::predict(const std::vector<std::uint32_t>& prefix) {
    if (prefix.empty()) throw std::invalid_argument("empty prefix");
    std::vector<std::uint32_t> session = prefix;
    if (session.size() > cfg_.n_max) {
        session.assign(prefix.end() - cfg_.n_max, prefix.end());
        ++truncation_count_;
    }

    const graph::SessionGraph g = graph::build_session_graph(
        session, items_.topics, cfg_.variant == Variant::no_topic);

    std::vector<std::size_t> node_rows(g.nodes.begin(), g.nodes.end());
    const ad::NodeId base = tape_.gather_rows(param("item_emb"), node_rows);

    std::vector<ad::NodeId> outputs{base};
    for (std::size_t l = 1; l <= cfg_.k; ++l) {
        const ad::NodeId input = tape_.matmul(
            outputs.size() == 1 ? outputs[0] : tape_.concat_cols(outputs),
            param("stack_proj_" + std::to_string(l)));
        ad::NodeId h;
        const bool is_ail = (l % 2 == 1);
        if (is_ail)
            h = ail_layer(g, input);
        else if (cfg_.variant == Variant::no_ril)
            h = input;
        else
            h = ril_layer(g, input, base);
        h = tape_.dropout(h, cfg_.dropout, train_, dropout_rng_);
        outputs.push_back(h);
    }
    const ad::NodeId hidden =
        tape_.matmul(tape_.concat_cols(outputs), param("stack_proj_out"));

    // session representation with reversed position indexing
    const std::size_t n = session.size();
    const ad::NodeId positions = tape_.gather_rows(hidden, g.node_of);
    const ad::NodeId mean_state = tape_.mean_rows(positions);
    ad::NodeId session_vec = 0;
    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
        const ad::NodeId h_row = tape_.row(positions, i);
        const ad::NodeId p_row = tape_.row(param("P"), n - 1 - i);
        const ad::NodeId zi = tape_.tanh_(tape_.add_rowvec(
            tape_.matmul_nt(tape_.concat_cols({h_row, p_row}), param("W_2")),
            param("b_2")));
        const ad::NodeId gate = tape_.sigmoid(tape_.add_rowvec(
            tape_.add(tape_.matmul_nt(zi, param("W_3")),
                      tape_.matmul_nt(mean_state, param("W_4"))),
            param("b_3")));
        const ad::NodeId beta = tape_.sum(tape_.mul(gate, param("q")));
        const ad::NodeId term = tape_.mul_scalar(h_row, beta);
        session_vec = first ? term : tape_.add(session_vec, term);
        first = false;
    }

    const ad::NodeId logits = tape_.matmul_nt(session_vec, param("item_emb"));
    return tape_.softmax_rows(logits);
}

ad::NodeId BatchGraph::example_loss(const std::vector<std::uint32_t>& prefix,
                                    std::uint32_t label) {
    if (label >= items_.num_items()) throw std::invalid_argument("label out of range");
    return tape_.neg_log_pick(predict(prefix), label, 1e-12, &clamp_count_);
}

ad::NodeId BatchGraph::batch_loss(const std::vector<ad::NodeId>& losses, double l2) {
    if (losses.empty()) throw std::invalid_argument("batch_loss: empty batch");
    ad::NodeId total = losses[0];
    for (std::size_t i = 1; i < losses.size(); ++i)
        total = tape_.add(total, losses[i]);
    total = tape_.scale(total, 1.0 / static_cast<double>(losses.size()));
    if (l2 > 0.0) {
        ad::NodeId reg = 0;
        bool first = true;
        for (const ad::NodeId leaf : leaves_) {
            const ad::NodeId sq = tape_.sum(tape_.mul(leaf, leaf));
            reg = first ? sq : tape_.add(reg, sq);
            first = false;
        }
        total = tape_.add(total, tape_.scale(reg, l2 / 2.0));
    }
    return total;
}

void BatchGraph::accumulate_grads(ad::NodeId loss) {
    tape_.backward(loss);
    for (std::size_t i = 0; i < params_.count(); ++i) {
        const Array& g = tape_.grad(leaves_[i]);
        kernels::active().axpy(g.size(), 1.0, g.data.data(),
                               params_.grad_at(i).data.data());
    }
}

Array predict_scores(const ModelConfig& cfg, ParameterSet& params,
                     const ItemData& items,
                     const std::vector<std::uint32_t>& prefix) {
    BatchGraph bg(cfg, params, items, /*train=*/false, /*dropout_seed=*/0);
    const ad::NodeId y = bg.predict(prefix);
    return bg.value(y);
}

}  // namespace rignn::model
