#pragma once

#include "specgconv/linalg.hpp"
#include "specgconv/nn/model.hpp"

#include <span>
#include <string>
#include <vector>

namespace specgconv::nn {

enum class LossKind {
    SoftmaxCrossEntropy,  ///< softmax over outputs, class-index targets
    BinaryCrossEntropy,   ///< per-output p = (1 + tanh(o)) / 2, 0/1 targets
};

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& text);

/// Per-row class indices (softmax) or a 0/1 matrix shaped like the outputs.
struct Targets {
    std::vector<int> classes;
    Matrix binary;
};

struct LossResult {
    double value = 0.0;
    Matrix grad;  ///< dL/d(outputs), zero on unscored rows
};

/// Mean loss over the scored rows (softmax) or scored entries (binary).
LossResult compute_loss(const Matrix& outputs, const Targets& targets, std::span<const Index> rows, LossKind kind);

/// Fraction of scored rows whose argmax matches the class.
double accuracy(const Matrix& outputs, const std::vector<int>& classes, std::span<const Index> rows);

/// Micro-averaged F1 over all scored entries, predicting positive when o > 0.
double micro_f1(const Matrix& outputs, const Matrix& binary, std::span<const Index> rows);

/// Accuracy for softmax targets, micro-F1 for binary ones.
double score(const Matrix& outputs, const Targets& targets, std::span<const Index> rows, LossKind kind);

/// Adds 0.5*wd*|W|^2 (+ 0.5*dwd*|w|^2 for depthwise vectors) to the objective
/// and its gradient. Biases are never decayed. Returns the penalty.
double apply_weight_decay(const Parameters& params, Parameters& grads, double weight_decay,
                          double depthwise_weight_decay);

} // namespace specgconv::nn
