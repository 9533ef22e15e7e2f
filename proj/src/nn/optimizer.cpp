#include "specgconv/nn/optimizer.hpp"

#include "specgconv/error.hpp"

#include <cmath>

namespace specgconv::nn {

Adam::Adam(const Parameters& like, AdamSettings settings)
    : settings_(settings), m_(like.zeros_like()), v_(like.zeros_like()) {
    if (!(settings_.learning_rate >= 0.0)) throw config_error("learning rate must be >= 0");
    if (!(settings_.beta1 >= 0.0 && settings_.beta1 < 1.0) || !(settings_.beta2 >= 0.0 && settings_.beta2 < 1.0)) {
        throw config_error("Adam decay constants must lie in [0,1)");
    }
    if (!(settings_.epsilon > 0.0)) throw config_error("Adam epsilon must be > 0");
}

void Adam::step(Parameters& params, const Parameters& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(settings_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(settings_.beta2, static_cast<double>(t_));
    const double b1 = settings_.beta1;
    const double b2 = settings_.beta2;
    const double lr = settings_.learning_rate;
    const double eps = settings_.epsilon;

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
            if (lr == 0.0) return;
            p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
        };
        LayerParams& p = params.layers[l];
        const LayerParams& g = grads.layers[l];
        LayerParams& m = m_.layers[l];
        LayerParams& v = v_.layers[l];
        for (std::size_t s = 0; s < p.weights.size(); ++s) update(p.weights[s], g.weights[s], m.weights[s], v.weights[s]);
        if (p.depthwise.size() > 0) update(p.depthwise, g.depthwise, m.depthwise, v.depthwise);
        if (p.bias.size() > 0) update(p.bias, g.bias, m.bias, v.bias);
    }
}

} // namespace specgconv::nn
