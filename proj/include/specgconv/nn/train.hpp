#pragma once

#include "specgconv/nn/loss.hpp"
#include "specgconv/nn/network.hpp"
#include "specgconv/nn/optimizer.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace specgconv::nn {

struct TrainConfig {
    double learning_rate = 0.01;
    int epochs = 200;
    int batch_size = 1;
    double weight_decay = 0.0;
    double depthwise_weight_decay = 0.0;
    double input_dropout = 0.0;
    double kernel_dropout = 0.0;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::SoftmaxCrossEntropy;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    void validate() const;
    DropoutConfig dropout() const { return {input_dropout, kernel_dropout}; }
    AdamSettings adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_epsilon}; }
};

/// Per-epoch record. Validation fields are NaN when there is no validation set.
struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double train_score = 0.0;
    double val_loss = std::numeric_limits<double>::quiet_NaN();
    double val_score = std::numeric_limits<double>::quiet_NaN();
};

/// Loss on `rows` plus weight decay, with the analytic gradient accumulated
/// into `grads` when given. Dropout applies when `dropout` is active, with
/// masks drawn from an RNG seeded by `dropout_seed`, so repeated calls with
/// the same seed see identical masks.
struct Objective {
    double loss = 0.0;     ///< data term
    double penalty = 0.0;  ///< weight-decay term
    Matrix outputs;
    double total() const { return loss + penalty; }
};

Objective evaluate_objective(const Network& net, const Parameters& params, const Matrix& x,
                             std::span<const Matrix> supports, const Targets& targets, std::span<const Index> rows,
                             LossKind kind, double weight_decay, double depthwise_weight_decay,
                             const DropoutConfig& dropout, std::uint64_t dropout_seed, Parameters* grads);

/// Node classification within one graph (full-graph updates).
struct NodeTask {
    Matrix features;
    std::vector<Matrix> supports;
    Targets targets;
    std::vector<Index> train_rows;
    std::vector<Index> val_rows;
    std::vector<Index> test_rows;
};

struct TrainResult {
    Parameters params;
    std::vector<EpochMetrics> history;
    double test_loss = std::numeric_limits<double>::quiet_NaN();
    double test_score = std::numeric_limits<double>::quiet_NaN();
    /// Epoch (1-based) with the lowest validation loss, 0 without validation.
    int best_val_loss_epoch = 0;
};

TrainResult train_transductive(const ModelSpec& spec, const NodeTask& task, const TrainConfig& config);

/// One graph of an inductive task. `target` holds a single row.
struct GraphSample {
    Matrix features;
    std::vector<Matrix> supports;
    Targets target;
};

/// Graph-level training: gradients of the graphs in a batch are averaged and
/// the model is updated once per batch. Training order is reshuffled each
/// epoch. `test` may be empty.
TrainResult train_inductive(const ModelSpec& spec, std::span<const GraphSample> graphs,
                            std::span<const std::size_t> train, std::span<const std::size_t> val,
                            std::span<const std::size_t> test, const TrainConfig& config);

struct CrossValidationResult {
    double mean = 0.0;
    double std = 0.0;
    bool std_defined = false;          ///< false for a single repeat (std reported as 0)
    std::vector<double> per_repeat;    ///< score at the selected epoch
    std::vector<int> selected_epochs;  ///< 1-based
};

/// k-fold cross-validation with a fixed epoch budget. Per repeat, the k
/// validation curves are averaged and the epoch with the highest mean
/// validation score is reported. Repeat r uses seed + r for folds and init.
CrossValidationResult crossvalidate(const ModelSpec& spec, std::span<const GraphSample> graphs,
                                    std::span<const int> labels, const TrainConfig& config, int folds = 10,
                                    int repeats = 1);

} // namespace specgconv::nn
