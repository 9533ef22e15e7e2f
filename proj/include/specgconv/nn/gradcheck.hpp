#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace specgconv::nn {

struct GradcheckOptions {
    std::uint64_t seed = 7;
    double step = 1e-6;
    double tolerance = 1e-5;
    /// Negates depthwise gradients after backward, simulating a sign bug.
    bool flip_depthwise_sign = false;
};

struct GradcheckCase {
    std::string name;
    std::size_t num_params = 0;
    double max_rel_error = 0.0;
    bool passed = false;
};

struct GradcheckReport {
    std::vector<GradcheckCase> cases;
    bool passed = true;
};

/// Central-difference check of every layer kind, activation and loss, plus
/// weight decay, both dropouts, and a zero-input model whose weight gradients
/// must vanish exactly. Relative error is |a-n| / max(|a|, |n|, 1e-3).
GradcheckReport run_gradcheck(const GradcheckOptions& options = {});

} // namespace specgconv::nn
