#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rignn/eval.hpp"
#include "rignn/ingest.hpp"
#include "rignn/model.hpp"

namespace rignn::train {

struct TrainConfig {
    double learning_rate = 0.001;
    std::size_t batch_size = 100;
    double l2 = 1e-5;
    std::size_t epochs = 10;
    std::uint64_t seed = 42;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double val_fraction = 0.1;  // last slice of train sessions by time

    void validate() const;
};

class Adam {
public:
    explicit Adam(const model::ParameterSet& params);
    // standard bias-corrected update from the accumulated gradients
    void step(model::ParameterSet& params, const TrainConfig& cfg);
    std::size_t t() const { return t_; }

private:
    std::vector<Array> m_;
    std::vector<Array> v_;
    std::size_t t_ = 0;
};

struct EpochLog {
    std::size_t epoch = 0;
    double loss = 0.0;
    eval::Summary val;
};

struct TrainResult {
    model::ParameterSet best_params;
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0;
    bool diverged = false;
};

// Core loop over pre-split examples. Validation examples may be empty, in
// which case the final epoch's parameters are retained.
TrainResult train_on_examples(const model::ModelConfig& cfg,
                              const model::ItemData& items,
                              const std::vector<ingest::SequenceExample>& train_ex,
                              const std::vector<ingest::SequenceExample>& val_ex,
                              const TrainConfig& tc);

// Splits off the last val_fraction of sessions by start_time for model
// selection, sequence-splits both parts, and trains.
TrainResult train_on_sessions(const model::ModelConfig& cfg,
                              const model::ItemData& items,
                              const std::vector<ingest::Session>& sessions,
                              int case_id, const TrainConfig& tc);

// Mean cross-entropy + L2 of the batch, no gradients. Dropout off.
double batch_loss_value(const model::ModelConfig& cfg, model::ParameterSet& params,
                        const model::ItemData& items,
                        const std::vector<ingest::SequenceExample>& batch,
                        double l2);

// Analytic gradients vs central finite differences on the full model.
ad::FdReport model_fd_check(const model::ModelConfig& cfg,
                            model::ParameterSet& params,
                            const model::ItemData& items,
                            const std::vector<ingest::SequenceExample>& batch,
                            double l2, double eps, std::size_t samples_per_param,
                            std::uint64_t seed);

}  // namespace rignn::train
