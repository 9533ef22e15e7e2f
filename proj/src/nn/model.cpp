#include "specgconv/nn/model.hpp"

#include "specgconv/error.hpp"

#include <charconv>
#include <cmath>

namespace specgconv::nn {

std::string to_string(Activation a) {
    switch (a) {
    case Activation::Linear: return "linear";
    case Activation::ReLU: return "relu";
    case Activation::Tanh: return "tanh";
    }
    return "linear";
}

Activation parse_activation(const std::string& text) {
    if (text == "linear") return Activation::Linear;
    if (text == "relu") return Activation::ReLU;
    if (text == "tanh" || text == "tansig") return Activation::Tanh;
    throw config_error("unknown activation '" + text + "' (expected linear|relu|tanh)");
}

std::vector<Index> ModelSpec::widths() const {
    std::vector<Index> w{input_width};
    for (const LayerSpec& layer : layers) {
        w.push_back(layer.kind == LayerKind::ReadoutMeanMax ? 2 * w.back() : layer.out);
    }
    return w;
}

bool ModelSpec::graph_level() const {
    for (const LayerSpec& layer : layers)
        if (layer.kind == LayerKind::ReadoutMeanMax) return true;
    return false;
}

void ModelSpec::validate() const {
    if (input_width < 1) throw config_error("model input width must be >= 1");
    if (layers.empty()) throw config_error("model has no layers");
    bool after_readout = false;
    bool has_conv = false;
    for (const LayerSpec& layer : layers) {
        switch (layer.kind) {
        case LayerKind::ReadoutMeanMax:
            if (after_readout) throw config_error("model has more than one readout");
            after_readout = true;
            break;
        case LayerKind::MultiSupportConv:
        case LayerKind::DepthwiseSeparableConv:
            if (after_readout) throw config_error("graph convolution after the readout");
            has_conv = true;
            [[fallthrough]];
        case LayerKind::Dense:
            if (layer.out < 1) throw config_error("layer width must be >= 1");
            break;
        }
    }
    if (has_conv && num_supports < 1) throw config_error("graph convolutions need at least one support");
    if (layers.back().kind == LayerKind::ReadoutMeanMax && layers.size() == 1) {
        throw config_error("a readout alone has no trainable layer");
    }
}

ModelSpec parse_architecture(std::string_view text, Index input_width, int num_supports,
                             const ArchitectureOptions& options) {
    ModelSpec spec;
    spec.input_width = input_width;
    spec.num_supports = num_supports;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t dash = text.find('-', start);
        if (dash == std::string_view::npos) dash = text.size();
        const std::string_view token = text.substr(start, dash - start);
        start = dash + 1;
        if (token.empty()) throw config_error("empty token in architecture '" + std::string(text) + "'");

        LayerSpec layer;
        std::string_view digits;
        if (token == "meanmax") {
            layer.kind = LayerKind::ReadoutMeanMax;
        } else if (token.starts_with("DSG")) {
            layer.kind = LayerKind::DepthwiseSeparableConv;
            digits = token.substr(3);
        } else if (token.starts_with("G")) {
            layer.kind = LayerKind::MultiSupportConv;
            digits = token.substr(1);
        } else if (token.starts_with("D")) {
            layer.kind = LayerKind::Dense;
            digits = token.substr(1);
        } else {
            throw config_error("unknown architecture token '" + std::string(token) + "'");
        }
        if (layer.kind != LayerKind::ReadoutMeanMax) {
            long long width = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), width);
            if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() || width < 1) {
                throw config_error("architecture token '" + std::string(token) + "' needs a positive width");
            }
            layer.out = static_cast<Index>(width);
            layer.activation = options.hidden_activation;
            layer.use_bias = options.hidden_bias;
        }
        spec.layers.push_back(layer);
        if (dash == text.size()) break;
    }
    for (auto it = spec.layers.rbegin(); it != spec.layers.rend(); ++it) {
        if (it->kind != LayerKind::ReadoutMeanMax) {
            it->activation = options.output_activation;
            it->use_bias = options.output_bias;
            break;
        }
    }
    spec.validate();
    return spec;
}

std::string to_string(const ModelSpec& spec) {
    std::string out;
    for (const LayerSpec& layer : spec.layers) {
        if (!out.empty()) out += '-';
        switch (layer.kind) {
        case LayerKind::MultiSupportConv: out += "G" + std::to_string(layer.out); break;
        case LayerKind::DepthwiseSeparableConv: out += "DSG" + std::to_string(layer.out); break;
        case LayerKind::Dense: out += "D" + std::to_string(layer.out); break;
        case LayerKind::ReadoutMeanMax: out += "meanmax"; break;
        }
    }
    return out;
}

std::size_t Parameters::weight_count() const {
    std::size_t total = 0;
    for_each_tensor(*this, [&total](const auto& t, TensorRole role) {
        if (role != TensorRole::Bias) total += static_cast<std::size_t>(t.size());
    });
    return total;
}

std::size_t Parameters::total_count() const {
    std::size_t total = 0;
    for_each_tensor(*this, [&total](const auto& t, TensorRole) { total += static_cast<std::size_t>(t.size()); });
    return total;
}

Parameters Parameters::zeros_like() const {
    Parameters z = *this;
    for_each_tensor(z, [](auto& t, TensorRole) { t.setZero(); });
    return z;
}

Parameters init_parameters(const ModelSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    const std::vector<Index> widths = spec.widths();
    Parameters params;
    auto glorot = [&rng](Index fan_in, Index fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        Matrix w(fan_in, fan_out);
        for (Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
        return w;
    };
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const LayerSpec& layer = spec.layers[l];
        const Index f_in = widths[l];
        const Index f_out = widths[l + 1];
        LayerParams lp;
        switch (layer.kind) {
        case LayerKind::MultiSupportConv:
            for (int s = 0; s < spec.num_supports; ++s) lp.weights.push_back(glorot(f_in, f_out));
            break;
        case LayerKind::DepthwiseSeparableConv:
            lp.weights.push_back(glorot(f_in, f_out));
            lp.depthwise = Matrix::Zero(spec.num_supports, f_in);
            lp.depthwise.row(0).setOnes();
            break;
        case LayerKind::Dense:
            lp.weights.push_back(glorot(f_in, f_out));
            break;
        case LayerKind::ReadoutMeanMax:
            break;
        }
        if (layer.kind != LayerKind::ReadoutMeanMax && layer.use_bias) lp.bias = Vector::Zero(f_out);
        params.layers.push_back(std::move(lp));
    }
    return params;
}

std::size_t param_count(std::span<const Index> widths, int num_supports, bool separable) {
    std::size_t total = 0;
    const auto s = static_cast<std::size_t>(num_supports);
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const auto f_in = static_cast<std::size_t>(widths[i]);
        const auto f_out = static_cast<std::size_t>(widths[i + 1]);
        total += separable ? s * f_in + f_in * f_out : s * f_in * f_out;
    }
    return total;
}

std::size_t param_count(const ModelSpec& spec) {
    const std::vector<Index> widths = spec.widths();
    std::size_t total = 0;
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const Index pair[2] = {widths[l], widths[l + 1]};
        switch (spec.layers[l].kind) {
        case LayerKind::MultiSupportConv: total += param_count(pair, spec.num_supports, false); break;
        case LayerKind::DepthwiseSeparableConv: total += param_count(pair, spec.num_supports, true); break;
        case LayerKind::Dense: total += param_count(pair, 1, false); break;
        case LayerKind::ReadoutMeanMax: break;
        }
    }
    return total;
}

} // namespace specgconv::nn
