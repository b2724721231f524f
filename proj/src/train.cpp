#include "rignn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rignn::train {

void TrainConfig::validate() const {
    if (learning_rate <= 0.0 || batch_size == 0 || l2 < 0.0 || beta1 <= 0.0 ||
        beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0 || adam_eps <= 0.0)
        throw std::invalid_argument("invalid train config");
    if (val_fraction < 0.0 || val_fraction >= 1.0)
        throw std::invalid_argument("val_fraction must be in [0, 1)");
}

Adam::Adam(const model::ParameterSet& params) {
    for (std::size_t i = 0; i < params.count(); ++i) {
        m_.emplace_back(params.value_at(i).shape);
        v_.emplace_back(params.value_at(i).shape);
    }
}

void Adam::step(model::ParameterSet& params, const TrainConfig& cfg) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.count(); ++i) {
        Array& val = params.value_at(i);
        const Array& g = params.grad_at(i);
        Array& m = m_[i];
        Array& v = v_[i];
        for (std::size_t j = 0; j < val.size(); ++j) {
            m.data[j] = cfg.beta1 * m.data[j] + (1.0 - cfg.beta1) * g.data[j];
            v.data[j] = cfg.beta2 * v.data[j] + (1.0 - cfg.beta2) * g.data[j] * g.data[j];
            const double mhat = m.data[j] / bc1;
            const double vhat = v.data[j] / bc2;
            val.data[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
        }
    }
}

namespace {

// length-bucketed batches in a seeded shuffled order
std::vector<std::vector<std::size_t>> make_batches(
    const std::vector<ingest::SequenceExample>& examples, std::size_t batch_size,
    Rng& rng) {
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return examples[a].prefix.size() < examples[b].prefix.size();
    });
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t i = 0; i < order.size(); i += batch_size) {
        const std::size_t end = std::min(i + batch_size, order.size());
        batches.emplace_back(order.begin() + i, order.begin() + end);
    }
    // Fisher-Yates over batch order
    for (std::size_t i = batches.size(); i > 1; --i)
        std::swap(batches[i - 1], batches[rng.next_below(i)]);
    return batches;
}

}  // namespace

TrainResult train_on_examples(const model::ModelConfig& cfg,
                              const model::ItemData& items,
                              const std::vector<ingest::SequenceExample>& train_ex,
                              const std::vector<ingest::SequenceExample>& val_ex,
                              const TrainConfig& tc) {
    tc.validate();
    if (train_ex.empty()) throw std::invalid_argument("no training examples");

    std::size_t vocab = 1;
    for (const auto& doc : items.review_tokens)
        for (auto w : doc) vocab = std::max<std::size_t>(vocab, w + 1);
    Rng rng(tc.seed);
    model::ParameterSet params(cfg, items.num_items(), vocab, rng);

    Adam adam(params);
    TrainResult result;
    result.best_params = params;
    double best_mrr = -1.0;

    Rng shuffle_rng = rng.fork(1);
    Rng dropout_rng = rng.fork(2);

    for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
        const auto batches = make_batches(train_ex, tc.batch_size, shuffle_rng);
        double loss_sum = 0.0;
        std::size_t batch_count = 0;
        try {
            for (const auto& batch : batches) {
                params.zero_grads();
                model::BatchGraph bg(cfg, params, items, /*train=*/true,
                                     dropout_rng.next_u64());
                std::vector<ad::NodeId> losses;
                for (std::size_t idx : batch)
                    losses.push_back(
                        bg.example_loss(train_ex[idx].prefix, train_ex[idx].label));
                const ad::NodeId loss = bg.batch_loss(losses, tc.l2);
                bg.accumulate_grads(loss);
                adam.step(params, tc);
                loss_sum += bg.tape().scalar_value(loss);
                ++batch_count;
            }
        } catch (const std::runtime_error&) {
            result.diverged = true;  // non-finite value tripped the tape
            break;
        }

        EpochLog log;
        log.epoch = epoch;
        log.loss = batch_count ? loss_sum / static_cast<double>(batch_count) : 0.0;
        if (!val_ex.empty()) {
            log.val = eval::summarize(eval::rank_examples(cfg, params, items, val_ex));
            if (log.val.mrr20 > best_mrr) {
                best_mrr = log.val.mrr20;
                result.best_params = params;
                result.best_epoch = epoch;
            }
        } else {
            result.best_params = params;
            result.best_epoch = epoch;
        }
        result.log.push_back(log);
    }
    return result;
}

TrainResult train_on_sessions(const model::ModelConfig& cfg,
                              const model::ItemData& items,
                              const std::vector<ingest::Session>& sessions,
                              int case_id, const TrainConfig& tc) {
    std::vector<std::size_t> order(sessions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sessions[a].start_time < sessions[b].start_time;
    });
    const std::size_t n_val =
        static_cast<std::size_t>(tc.val_fraction * static_cast<double>(sessions.size()));
    std::vector<ingest::SequenceExample> train_ex, val_ex;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto ex = ingest::sequence_split(sessions[order[i]], case_id);
        auto& dst = (i + n_val >= order.size()) ? val_ex : train_ex;
        dst.insert(dst.end(), ex.begin(), ex.end());
    }
    if (train_ex.empty()) {  // tiny corpora: train on everything
        train_ex.swap(val_ex);
    }
    return train_on_examples(cfg, items, train_ex, val_ex, tc);
}

double batch_loss_value(const model::ModelConfig& cfg, model::ParameterSet& params,
                        const model::ItemData& items,
                        const std::vector<ingest::SequenceExample>& batch,
                        double l2) {
    model::BatchGraph bg(cfg, params, items, /*train=*/false, 0);
    std::vector<ad::NodeId> losses;
    for (const auto& ex : batch)
        losses.push_back(bg.example_loss(ex.prefix, ex.label));
    return bg.tape().scalar_value(bg.batch_loss(losses, l2));
}

ad::FdReport model_fd_check(const model::ModelConfig& cfg,
                            model::ParameterSet& params,
                            const model::ItemData& items,
                            const std::vector<ingest::SequenceExample>& batch,
                            double l2, double eps, std::size_t samples_per_param,
                            std::uint64_t seed) {
    params.zero_grads();
    {
        model::BatchGraph bg(cfg, params, items, /*train=*/false, 0);
        std::vector<ad::NodeId> losses;
        for (const auto& ex : batch)
            losses.push_back(bg.example_loss(ex.prefix, ex.label));
        bg.accumulate_grads(bg.batch_loss(losses, l2));
    }
    std::vector<ad::ParamView> views;
    for (std::size_t i = 0; i < params.count(); ++i)
        views.push_back({params.name_at(i), &params.value_at(i), &params.grad_at(i)});
    Rng rng(seed);
    return ad::fd_check(
        [&] { return batch_loss_value(cfg, params, items, batch, l2); }, views, eps,
        samples_per_param, rng);
}

}  // namespace rignn::train
