#include "specgconv/nn/train.hpp"

#include "specgconv/datasets.hpp"
#include "specgconv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace specgconv::nn {
namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double decay_penalty(const Parameters& params, double weight_decay, double depthwise_weight_decay) {
    double penalty = 0.0;
    for_each_tensor(params, [&](const auto& t, TensorRole role) {
        if (role == TensorRole::Weight) penalty += 0.5 * weight_decay * t.squaredNorm();
        if (role == TensorRole::Depthwise) penalty += 0.5 * depthwise_weight_decay * t.squaredNorm();
    });
    return penalty;
}

void check_finite(double loss, int epoch) {
    if (!std::isfinite(loss)) {
        throw numerical_error("training diverged: non-finite loss at epoch " + std::to_string(epoch));
    }
}

void check_rows(std::span<const Index> rows, Index n, const char* what) {
    for (Index r : rows)
        if (r < 0 || r >= n) throw invalid_argument(std::string(what) + " row " + std::to_string(r) + " out of range");
}

/// Stacks the single-row targets of the selected graphs.
Targets stack_targets(std::span<const GraphSample> graphs, std::span<const std::size_t> ids, LossKind kind) {
    Targets out;
    if (kind == LossKind::SoftmaxCrossEntropy) {
        for (std::size_t id : ids) out.classes.push_back(graphs[id].target.classes.at(0));
    } else {
        const Index width = graphs[ids.front()].target.binary.cols();
        out.binary.resize(static_cast<Index>(ids.size()), width);
        for (std::size_t i = 0; i < ids.size(); ++i) out.binary.row(static_cast<Index>(i)) = graphs[ids[i]].target.binary.row(0);
    }
    return out;
}

std::vector<Index> all_rows(std::size_t n) {
    std::vector<Index> rows(n);
    std::iota(rows.begin(), rows.end(), Index{0});
    return rows;
}

struct SetEvaluation {
    double loss = 0.0;
    double score = 0.0;
};

SetEvaluation evaluate_graphs(const Network& net, const Parameters& params, std::span<const GraphSample> graphs,
                              std::span<const std::size_t> ids, LossKind kind) {
    Matrix outputs(static_cast<Index>(ids.size()), net.spec().output_width());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const GraphSample& g = graphs[ids[i]];
        outputs.row(static_cast<Index>(i)) = net.forward(params, g.features, g.supports).row(0);
    }
    const Targets targets = stack_targets(graphs, ids, kind);
    const std::vector<Index> rows = all_rows(ids.size());
    return {compute_loss(outputs, targets, rows, kind).value, score(outputs, targets, rows, kind)};
}

} // namespace

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw config_error("learning rate must be >= 0");
    if (epochs < 0) throw config_error("epochs must be >= 0");
    if (batch_size < 1) throw config_error("batch size must be >= 1");
    if (!(weight_decay >= 0.0) || !(depthwise_weight_decay >= 0.0)) throw config_error("weight decay must be >= 0");
    if (!(input_dropout >= 0.0 && input_dropout < 1.0)) throw config_error("input dropout must lie in [0,1)");
    if (!(kernel_dropout >= 0.0 && kernel_dropout < 1.0)) throw config_error("kernel dropout must lie in [0,1)");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw config_error("Adam decay constants must lie in [0,1)");
    }
    if (!(adam_epsilon > 0.0)) throw config_error("Adam epsilon must be > 0");
}

Objective evaluate_objective(const Network& net, const Parameters& params, const Matrix& x,
                             std::span<const Matrix> supports, const Targets& targets, std::span<const Index> rows,
                             LossKind kind, double weight_decay, double depthwise_weight_decay,
                             const DropoutConfig& dropout, std::uint64_t dropout_seed, Parameters* grads) {
    std::mt19937_64 rng(dropout_seed);
    std::mt19937_64* rng_ptr = dropout.active() ? &rng : nullptr;
    Tape tape;
    Objective obj;
    obj.outputs = net.forward(params, x, supports, dropout, rng_ptr, grads ? &tape : nullptr);
    const LossResult loss = compute_loss(obj.outputs, targets, rows, kind);
    obj.loss = loss.value;
    if (grads) {
        net.backward(params, supports, tape, loss.grad, *grads);
        obj.penalty = apply_weight_decay(params, *grads, weight_decay, depthwise_weight_decay);
    } else {
        obj.penalty = decay_penalty(params, weight_decay, depthwise_weight_decay);
    }
    return obj;
}

TrainResult train_transductive(const ModelSpec& spec, const NodeTask& task, const TrainConfig& config) {
    config.validate();
    if (spec.graph_level()) throw config_error("node classification needs a model without a readout");
    if (task.train_rows.empty()) throw invalid_argument("no training nodes");
    const Index n = task.features.rows();
    check_rows(task.train_rows, n, "train");
    check_rows(task.val_rows, n, "validation");
    check_rows(task.test_rows, n, "test");

    const Network net(spec);
    std::mt19937_64 init_rng(config.seed);
    std::mt19937_64 dropout_rng(mix_seed(config.seed, 1));

    TrainResult result;
    result.params = init_parameters(spec, init_rng);
    Adam adam(result.params, config.adam());
    double best_val_loss = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        Parameters grads = result.params.zeros_like();
        const Objective obj = evaluate_objective(net, result.params, task.features, task.supports, task.targets,
                                                 task.train_rows, config.loss, config.weight_decay,
                                                 config.depthwise_weight_decay, config.dropout(), dropout_rng(),
                                                 &grads);
        check_finite(obj.total(), epoch);
        adam.step(result.params, grads);

        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = obj.loss;
        m.train_score = score(obj.outputs, task.targets, task.train_rows, config.loss);
        if (!task.val_rows.empty()) {
            const Matrix out = net.forward(result.params, task.features, task.supports);
            m.val_loss = compute_loss(out, task.targets, task.val_rows, config.loss).value;
            m.val_score = score(out, task.targets, task.val_rows, config.loss);
            if (m.val_loss < best_val_loss) {
                best_val_loss = m.val_loss;
                result.best_val_loss_epoch = epoch;
            }
        }
        result.history.push_back(m);
    }

    if (!task.test_rows.empty()) {
        const Matrix out = net.forward(result.params, task.features, task.supports);
        result.test_loss = compute_loss(out, task.targets, task.test_rows, config.loss).value;
        result.test_score = score(out, task.targets, task.test_rows, config.loss);
    }
    return result;
}

TrainResult train_inductive(const ModelSpec& spec, std::span<const GraphSample> graphs,
                            std::span<const std::size_t> train, std::span<const std::size_t> val,
                            std::span<const std::size_t> test, const TrainConfig& config) {
    config.validate();
    if (!spec.graph_level()) throw config_error("graph classification needs a model with a readout");
    if (train.empty()) throw invalid_argument("no training graphs");
    for (auto ids : {train, val, test})
        for (std::size_t id : ids)
            if (id >= graphs.size()) throw invalid_argument("graph index " + std::to_string(id) + " out of range");

    const Network net(spec);
    std::mt19937_64 init_rng(config.seed);
    std::mt19937_64 dropout_rng(mix_seed(config.seed, 1));
    std::mt19937_64 shuffle_rng(mix_seed(config.seed, 2));
    const Index zero_row[1] = {0};

    TrainResult result;
    result.params = init_parameters(spec, init_rng);
    Adam adam(result.params, config.adam());
    std::vector<std::size_t> order(train.begin(), train.end());
    double best_val_loss = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        Matrix outputs(static_cast<Index>(order.size()), spec.output_width());
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const double inv = 1.0 / static_cast<double>(stop - start);
            // Backward accumulates, so per-graph gradients sum in place and are averaged once.
            Parameters grads = result.params.zeros_like();
            for (std::size_t i = start; i < stop; ++i) {
                const GraphSample& g = graphs[order[i]];
                const Objective obj = evaluate_objective(net, result.params, g.features, g.supports, g.target,
                                                         zero_row, config.loss, 0.0, 0.0, config.dropout(),
                                                         dropout_rng(), &grads);
                check_finite(obj.loss, epoch);
                loss_sum += obj.loss;
                outputs.row(static_cast<Index>(i)) = obj.outputs.row(0);
            }
            for_each_tensor(grads, [inv](auto& t, TensorRole) { t *= inv; });
            apply_weight_decay(result.params, grads, config.weight_decay, config.depthwise_weight_decay);
            adam.step(result.params, grads);
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = loss_sum / static_cast<double>(order.size());
        const Targets targets = stack_targets(graphs, order, config.loss);
        m.train_score = score(outputs, targets, all_rows(order.size()), config.loss);
        if (!val.empty()) {
            const SetEvaluation e = evaluate_graphs(net, result.params, graphs, val, config.loss);
            m.val_loss = e.loss;
            m.val_score = e.score;
            if (m.val_loss < best_val_loss) {
                best_val_loss = m.val_loss;
                result.best_val_loss_epoch = epoch;
            }
        }
        result.history.push_back(m);
    }

    if (!test.empty()) {
        const SetEvaluation e = evaluate_graphs(net, result.params, graphs, test, config.loss);
        result.test_loss = e.loss;
        result.test_score = e.score;
    }
    return result;
}

CrossValidationResult crossvalidate(const ModelSpec& spec, std::span<const GraphSample> graphs,
                                    std::span<const int> labels, const TrainConfig& config, int folds, int repeats) {
    config.validate();
    if (labels.size() != graphs.size()) throw invalid_argument("one label per graph is required");
    if (repeats < 1) throw config_error("repeats must be >= 1");
    if (config.epochs < 1) throw config_error("cross-validation needs at least one epoch");
    if (static_cast<std::size_t>(folds) > graphs.size()) {
        throw config_error("cannot run " + std::to_string(folds) + "-fold cross-validation on " +
                           std::to_string(graphs.size()) + " graphs");
    }

    CrossValidationResult result;
    for (int r = 0; r < repeats; ++r) {
        const std::uint64_t repeat_seed = config.seed + static_cast<std::uint64_t>(r);
        const std::vector<int> assignment = make_folds(labels, folds, repeat_seed);
        std::vector<double> curve(static_cast<std::size_t>(config.epochs), 0.0);
        for (int f = 0; f < folds; ++f) {
            std::vector<std::size_t> train, val;
            for (std::size_t i = 0; i < assignment.size(); ++i) (assignment[i] == f ? val : train).push_back(i);
            TrainConfig fold_config = config;
            fold_config.seed = mix_seed(repeat_seed, static_cast<std::uint64_t>(f) + 16);
            const TrainResult run = train_inductive(spec, graphs, train, val, {}, fold_config);
            for (std::size_t e = 0; e < curve.size(); ++e) curve[e] += run.history[e].val_score;
        }
        for (double& v : curve) v /= folds;
        const auto best = std::max_element(curve.begin(), curve.end());
        result.per_repeat.push_back(*best);
        result.selected_epochs.push_back(static_cast<int>(best - curve.begin()) + 1);
    }

    const double n = static_cast<double>(result.per_repeat.size());
    result.mean = std::accumulate(result.per_repeat.begin(), result.per_repeat.end(), 0.0) / n;
    double sq = 0.0;
    for (double v : result.per_repeat) sq += (v - result.mean) * (v - result.mean);
    result.std_defined = repeats > 1;
    result.std = result.std_defined ? std::sqrt(sq / n) : 0.0;
    return result;
}

} // namespace specgconv::nn
