#include "specgconv/nn/loss.hpp"

#include "specgconv/error.hpp"

#include <cmath>

namespace specgconv::nn {
namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void check_rows(const Matrix& outputs, std::span<const Index> rows) {
    if (rows.empty()) throw invalid_argument("loss mask selects no rows");
    for (Index r : rows)
        if (r < 0 || r >= outputs.rows()) throw invalid_argument("scored row " + std::to_string(r) + " out of range");
}

} // namespace

std::string to_string(LossKind kind) {
    return kind == LossKind::SoftmaxCrossEntropy ? "softmax_cross_entropy" : "binary_cross_entropy";
}

LossKind parse_loss_kind(const std::string& text) {
    if (text == "softmax_cross_entropy" || text == "softmax_ce") return LossKind::SoftmaxCrossEntropy;
    if (text == "binary_cross_entropy" || text == "bce_tansig" || text == "bce") return LossKind::BinaryCrossEntropy;
    throw config_error("unknown loss '" + text + "' (expected softmax_cross_entropy|binary_cross_entropy)");
}

LossResult compute_loss(const Matrix& outputs, const Targets& targets, std::span<const Index> rows, LossKind kind) {
    check_rows(outputs, rows);
    LossResult result;
    result.grad = Matrix::Zero(outputs.rows(), outputs.cols());

    if (kind == LossKind::SoftmaxCrossEntropy) {
        if (static_cast<Index>(targets.classes.size()) != outputs.rows()) {
            throw invalid_argument("softmax loss needs one class index per output row");
        }
        const double inv = 1.0 / static_cast<double>(rows.size());
        for (Index r : rows) {
            const int cls = targets.classes[static_cast<std::size_t>(r)];
            if (cls < 0 || cls >= outputs.cols()) {
                throw invalid_argument("row " + std::to_string(r) + " has class " + std::to_string(cls) +
                                       " outside [0," + std::to_string(outputs.cols()) + ")");
            }
            const auto row = outputs.row(r);
            const double peak = row.maxCoeff();
            const Eigen::RowVectorXd e = (row.array() - peak).exp().matrix();
            const double total = e.sum();
            result.value += (std::log(total) + peak - row(cls)) * inv;
            result.grad.row(r) = e / total * inv;
            result.grad(r, cls) -= inv;
        }
        return result;
    }

    if (targets.binary.rows() != outputs.rows() || targets.binary.cols() != outputs.cols()) {
        throw invalid_argument("binary loss needs a target matrix shaped like the outputs");
    }
    const double inv = 1.0 / static_cast<double>(rows.size() * static_cast<std::size_t>(outputs.cols()));
    for (Index r : rows) {
        for (Index j = 0; j < outputs.cols(); ++j) {
            const double o = outputs(r, j);
            const double y = targets.binary(r, j);
            // p = (1 + tanh o)/2 = sigmoid(2o)
            result.value += (y * softplus(-2.0 * o) + (1.0 - y) * softplus(2.0 * o)) * inv;
            const double p = 0.5 * (1.0 + std::tanh(o));
            result.grad(r, j) = 2.0 * (p - y) * inv;
        }
    }
    return result;
}

double accuracy(const Matrix& outputs, const std::vector<int>& classes, std::span<const Index> rows) {
    check_rows(outputs, rows);
    std::size_t correct = 0;
    for (Index r : rows) {
        Index best = 0;
        outputs.row(r).maxCoeff(&best);
        if (best == classes[static_cast<std::size_t>(r)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

double micro_f1(const Matrix& outputs, const Matrix& binary, std::span<const Index> rows) {
    check_rows(outputs, rows);
    double tp = 0, fp = 0, fn = 0;
    for (Index r : rows) {
        for (Index j = 0; j < outputs.cols(); ++j) {
            const bool predicted = outputs(r, j) > 0.0;
            const bool actual = binary(r, j) > 0.5;
            tp += predicted && actual;
            fp += predicted && !actual;
            fn += !predicted && actual;
        }
    }
    const double denom = 2.0 * tp + fp + fn;
    return denom > 0.0 ? 2.0 * tp / denom : 1.0;
}

double score(const Matrix& outputs, const Targets& targets, std::span<const Index> rows, LossKind kind) {
    return kind == LossKind::SoftmaxCrossEntropy ? accuracy(outputs, targets.classes, rows)
                                                 : micro_f1(outputs, targets.binary, rows);
}

double apply_weight_decay(const Parameters& params, Parameters& grads, double weight_decay,
                          double depthwise_weight_decay) {
    double penalty = 0.0;
    for_each_tensor_pair(params, grads, [&](const auto& p, auto& g, TensorRole role) {
        const double coeff = role == TensorRole::Weight      ? weight_decay
                             : role == TensorRole::Depthwise ? depthwise_weight_decay
                                                             : 0.0;
        if (coeff == 0.0) return;
        penalty += 0.5 * coeff * p.squaredNorm();
        g += coeff * p;
    });
    return penalty;
}

} // namespace specgconv::nn
