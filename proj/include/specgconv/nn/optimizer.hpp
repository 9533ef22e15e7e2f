#pragma once

#include "specgconv/nn/model.hpp"

namespace specgconv::nn {

struct AdamSettings {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with a fixed learning rate and bias-corrected moments.
class Adam {
public:
    Adam(const Parameters& like, AdamSettings settings);

    void step(Parameters& params, const Parameters& grads);
    long long steps() const noexcept { return t_; }
    const AdamSettings& settings() const noexcept { return settings_; }

private:
    AdamSettings settings_;
    Parameters m_;
    Parameters v_;
    long long t_ = 0;
};

} // namespace specgconv::nn
