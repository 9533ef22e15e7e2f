#pragma once

#include "specgconv/linalg.hpp"

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace specgconv::nn {

enum class Activation { Linear, ReLU, Tanh };

std::string to_string(Activation a);
Activation parse_activation(const std::string& text);

enum class LayerKind {
    MultiSupportConv,        ///< G<k>:   sigma(sum_s C_s H W_s + b)
    DepthwiseSeparableConv,  ///< DSG<k>: sigma((sum_s w_s . (C_s H)) W + b)
    Dense,                   ///< D<k>:   sigma(H W + b)
    ReadoutMeanMax,          ///< meanmax: [mean over nodes, max over nodes]
};

struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    Index out = 0;  ///< ignored for ReadoutMeanMax
    bool use_bias = false;
    Activation activation = Activation::Linear;
};

struct ModelSpec {
    Index input_width = 0;
    int num_supports = 1;
    std::vector<LayerSpec> layers;

    /// Feature widths f_0 .. f_L through the pipeline.
    std::vector<Index> widths() const;
    Index output_width() const { return widths().back(); }
    /// True when a readout turns node features into one graph-level row.
    bool graph_level() const;
    void validate() const;
};

struct ArchitectureOptions {
    Activation hidden_activation = Activation::ReLU;
    Activation output_activation = Activation::Linear;
    bool hidden_bias = false;
    bool output_bias = true;
};

/// Parses dash-separated tokens `DSG<k>`, `G<k>`, `D<k>`, `meanmax`.
/// The last weighted layer gets the output activation and bias setting.
ModelSpec parse_architecture(std::string_view text, Index input_width, int num_supports,
                             const ArchitectureOptions& options = {});
std::string to_string(const ModelSpec& spec);

struct LayerParams {
    std::vector<Matrix> weights;  ///< one per support (G), or exactly one (DSG, D)
    Matrix depthwise;             ///< S x f_in, row s is w^(s) (DSG only)
    Vector bias;                  ///< empty when the layer has no bias
};

struct Parameters {
    std::vector<LayerParams> layers;

    /// Enumerated trainable weights, biases excluded.
    std::size_t weight_count() const;
    std::size_t total_count() const;

    /// Same shapes, all zeros.
    Parameters zeros_like() const;
};

/// Glorot-uniform W; depthwise rows start at w^(1) = 1 and w^(s>1) = 0; zero biases.
Parameters init_parameters(const ModelSpec& spec, std::mt19937_64& rng);

/// Closed-form trainable-weight counts (biases excluded) for a stack of
/// graph-convolution widths: S sum f_i f_{i+1}, or sum S f_i + f_i f_{i+1}.
std::size_t param_count(std::span<const Index> widths, int num_supports, bool separable);

/// Per-layer closed form for a full spec (dense layers count f_i f_{i+1}).
std::size_t param_count(const ModelSpec& spec);

enum class TensorRole { Weight, Depthwise, Bias };

/// Calls f(values, role) for every tensor of `p` in a fixed order.
template <class P, class F>
void for_each_tensor(P& p, F&& f) {
    for (auto& layer : p.layers) {
        for (auto& w : layer.weights) f(w, TensorRole::Weight);
        if (layer.depthwise.size() > 0) f(layer.depthwise, TensorRole::Depthwise);
        if (layer.bias.size() > 0) f(layer.bias, TensorRole::Bias);
    }
}

/// Lockstep walk over two structurally identical parameter sets.
template <class P, class Q, class F>
void for_each_tensor_pair(P& a, Q& b, F&& f) {
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        auto& la = a.layers[l];
        auto& lb = b.layers[l];
        for (std::size_t s = 0; s < la.weights.size(); ++s) f(la.weights[s], lb.weights[s], TensorRole::Weight);
        if (la.depthwise.size() > 0) f(la.depthwise, lb.depthwise, TensorRole::Depthwise);
        if (la.bias.size() > 0) f(la.bias, lb.bias, TensorRole::Bias);
    }
}

} // namespace specgconv::nn
