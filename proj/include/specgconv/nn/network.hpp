#pragma once

#include "specgconv/nn/model.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace specgconv::nn {

/// sigma(sum_s C_s H W_s + b)
Matrix forward_multisupport(const Matrix& h, std::span<const Matrix> supports, std::span<const Matrix> weights,
                            const Vector& bias, Activation activation);

/// sigma((sum_s w_s . (C_s H)) W + b), with w_s row s of `depthwise` broadcast over nodes.
Matrix forward_depthwise(const Matrix& h, std::span<const Matrix> supports, const Matrix& depthwise,
                         const Matrix& weight, const Vector& bias, Activation activation);

/// [mean over rows, max over rows] as a single row.
Matrix readout_mean_max(const Matrix& h);

Matrix apply_activation(const Matrix& z, Activation activation);

struct DropoutConfig {
    double input_rate = 0.0;   ///< Bernoulli drop on each layer input
    double kernel_rate = 0.0;  ///< Bernoulli drop on nonzero support entries
    bool active() const { return input_rate > 0.0 || kernel_rate > 0.0; }
};

/// Support with entries dropped at `rate` and survivors scaled by 1/(1-rate).
/// Zero entries consume no randomness. Deterministic in `seed`.
Matrix drop_kernel_entries(const Matrix& support, double rate, std::uint64_t seed);

struct LayerTape {
    Matrix input;                              ///< layer input after input dropout
    Matrix input_scale;                        ///< dropout mask times 1/keep; empty when unused
    std::vector<std::uint64_t> kernel_seeds;   ///< per-support mask seeds; empty when unused
    double kernel_rate = 0.0;
    Matrix output;                             ///< post-activation output
    std::vector<Index> argmax;                 ///< readout: row holding each column max
    Index input_rows = 0;                      ///< readout: node count it pooled over
};

struct Tape {
    std::vector<LayerTape> layers;
};

/// Layer pipeline over one graph. Parameters live outside so the same
/// network can evaluate perturbed copies (gradient checks) or optimizer states.
class Network {
public:
    explicit Network(ModelSpec spec);

    const ModelSpec& spec() const noexcept { return spec_; }

    /// Forward pass. Dropout applies only when `rng` is given and `dropout`
    /// is active; `tape` (optional) records what backward needs.
    Matrix forward(const Parameters& params, const Matrix& x, std::span<const Matrix> supports,
                   const DropoutConfig& dropout = {}, std::mt19937_64* rng = nullptr, Tape* tape = nullptr) const;

    /// Reverse pass from dL/d(output); accumulates into `grads`.
    void backward(const Parameters& params, std::span<const Matrix> supports, const Tape& tape,
                  const Matrix& grad_output, Parameters& grads) const;

private:
    void check_shapes(const Parameters& params, const Matrix& x, std::span<const Matrix> supports) const;

    ModelSpec spec_;
};

} // namespace specgconv::nn
