#include "specgconv/nn/network.hpp"

#include "specgconv/error.hpp"

#include <cmath>
#include <limits>

namespace specgconv::nn {
namespace {

void add_bias(Matrix& z, const Vector& bias) {
    if (bias.size() > 0) z.rowwise() += bias.transpose();
}

/// dL/dz from dL/d(out) given the activation output.
Matrix activation_backward(const Matrix& grad_out, const Matrix& out, Activation activation) {
    switch (activation) {
    case Activation::Linear: return grad_out;
    case Activation::ReLU: return (out.array() > 0.0).select(grad_out, 0.0);
    case Activation::Tanh: return grad_out.cwiseProduct((1.0 - out.array().square()).matrix());
    }
    return grad_out;
}

/// Two Bernoulli draws per 64-bit word, exact to 2^-32.
class BernoulliStream {
public:
    BernoulliStream(std::uint64_t seed, double keep) : rng_(seed) {
        threshold_ = static_cast<std::uint64_t>(std::ldexp(keep, 32));
    }
    bool keep() {
        if (!have_half_) {
            word_ = rng_();
            have_half_ = true;
            return (word_ & 0xffffffffULL) < threshold_;
        }
        have_half_ = false;
        return (word_ >> 32) < threshold_;
    }

private:
    std::mt19937_64 rng_;
    std::uint64_t threshold_ = 0;
    std::uint64_t word_ = 0;
    bool have_half_ = false;
};

} // namespace

Matrix apply_activation(const Matrix& z, Activation activation) {
    switch (activation) {
    case Activation::Linear: return z;
    case Activation::ReLU: return z.cwiseMax(0.0);
    case Activation::Tanh: return z.array().tanh().matrix();
    }
    return z;
}

Matrix forward_multisupport(const Matrix& h, std::span<const Matrix> supports, std::span<const Matrix> weights,
                            const Vector& bias, Activation activation) {
    if (supports.size() != weights.size()) throw invalid_argument("one weight matrix per support is required");
    if (supports.empty()) throw invalid_argument("multi-support convolution needs at least one support");
    Matrix z = Matrix::Zero(h.rows(), weights.front().cols());
    for (std::size_t s = 0; s < supports.size(); ++s) {
        if (supports[s].cols() != h.rows() || weights[s].rows() != h.cols()) {
            throw invalid_argument("multi-support convolution shape mismatch");
        }
        z.noalias() += supports[s] * (h * weights[s]);
    }
    add_bias(z, bias);
    return apply_activation(z, activation);
}

Matrix forward_depthwise(const Matrix& h, std::span<const Matrix> supports, const Matrix& depthwise,
                         const Matrix& weight, const Vector& bias, Activation activation) {
    if (static_cast<Index>(supports.size()) != depthwise.rows() || depthwise.cols() != h.cols() ||
        weight.rows() != h.cols()) {
        throw invalid_argument("depthwise separable convolution shape mismatch");
    }
    Matrix z = Matrix::Zero(h.rows(), weight.cols());
    for (std::size_t s = 0; s < supports.size(); ++s) {
        if (supports[s].cols() != h.rows()) throw invalid_argument("support does not match feature rows");
        // (w_s . (C_s H)) W == C_s (H diag(w_s) W)
        const Matrix mixed = depthwise.row(static_cast<Index>(s)).transpose().asDiagonal() * weight;
        z.noalias() += supports[s] * (h * mixed);
    }
    add_bias(z, bias);
    return apply_activation(z, activation);
}

Matrix readout_mean_max(const Matrix& h) {
    if (h.rows() == 0) throw invalid_argument("readout over an empty graph");
    Matrix out(1, 2 * h.cols());
    out.leftCols(h.cols()) = h.colwise().mean();
    out.rightCols(h.cols()) = h.colwise().maxCoeff();
    return out;
}

Matrix drop_kernel_entries(const Matrix& support, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate < 1.0)) throw invalid_argument("kernel dropout rate must lie in [0,1)");
    const double keep = 1.0 - rate;
    const double scale = 1.0 / keep;
    BernoulliStream stream(seed, keep);
    Matrix out(support.rows(), support.cols());
    const double* src = support.data();
    double* dst = out.data();
    for (Index i = 0; i < support.size(); ++i) {
        const double v = src[i];
        dst[i] = (v != 0.0 && stream.keep()) ? v * scale : 0.0;
    }
    return out;
}

Network::Network(ModelSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

void Network::check_shapes(const Parameters& params, const Matrix& x, std::span<const Matrix> supports) const {
    if (params.layers.size() != spec_.layers.size()) throw invalid_argument("parameters do not match the model");
    if (x.cols() != spec_.input_width) {
        throw invalid_argument("input has " + std::to_string(x.cols()) + " features, model expects " +
                               std::to_string(spec_.input_width));
    }
    bool needs_supports = false;
    for (const LayerSpec& l : spec_.layers)
        needs_supports |= l.kind == LayerKind::MultiSupportConv || l.kind == LayerKind::DepthwiseSeparableConv;
    if (needs_supports) {
        if (static_cast<int>(supports.size()) != spec_.num_supports) {
            throw invalid_argument("model expects " + std::to_string(spec_.num_supports) + " supports, got " +
                                   std::to_string(supports.size()));
        }
        for (const Matrix& c : supports)
            if (c.rows() != x.rows() || c.cols() != x.rows()) throw invalid_argument("support does not match node count");
    }
}

Matrix Network::forward(const Parameters& params, const Matrix& x, std::span<const Matrix> supports,
                        const DropoutConfig& dropout, std::mt19937_64* rng, Tape* tape) const {
    check_shapes(params, x, supports);
    const bool drop = rng != nullptr && dropout.active();
    if (tape) tape->layers.assign(spec_.layers.size(), {});

    Matrix h = x;
    for (std::size_t l = 0; l < spec_.layers.size(); ++l) {
        const LayerSpec& layer = spec_.layers[l];
        const LayerParams& p = params.layers[l];
        LayerTape* record = tape ? &tape->layers[l] : nullptr;

        if (layer.kind == LayerKind::ReadoutMeanMax) {
            Matrix out = readout_mean_max(h);
            if (record) {
                record->argmax.resize(static_cast<std::size_t>(h.cols()));
                for (Index j = 0; j < h.cols(); ++j) {
                    Index row = 0;
                    h.col(j).maxCoeff(&row);
                    record->argmax[static_cast<std::size_t>(j)] = row;
                }
                record->output = out;
                record->input_rows = h.rows();
            }
            h = std::move(out);
            continue;
        }

        if (drop && dropout.input_rate > 0.0) {
            const double keep = 1.0 - dropout.input_rate;
            BernoulliStream stream((*rng)(), keep);
            Matrix scale(h.rows(), h.cols());
            for (Index i = 0; i < scale.size(); ++i) scale.data()[i] = stream.keep() ? 1.0 / keep : 0.0;
            h = h.cwiseProduct(scale);
            if (record) record->input_scale = std::move(scale);
        }

        const bool is_conv =
            layer.kind == LayerKind::MultiSupportConv || layer.kind == LayerKind::DepthwiseSeparableConv;
        std::vector<std::uint64_t> kernel_seeds;
        if (is_conv && drop && dropout.kernel_rate > 0.0) {
            for (std::size_t s = 0; s < supports.size(); ++s) kernel_seeds.push_back((*rng)());
        }
        auto support_at = [&](std::size_t s) -> Matrix {
            return kernel_seeds.empty() ? supports[s] : drop_kernel_entries(supports[s], dropout.kernel_rate, kernel_seeds[s]);
        };

        Matrix z;
        switch (layer.kind) {
        case LayerKind::MultiSupportConv:
            z = Matrix::Zero(h.rows(), layer.out);
            for (std::size_t s = 0; s < supports.size(); ++s) {
                const Matrix hw = h * p.weights[s];
                if (kernel_seeds.empty()) z.noalias() += supports[s] * hw;
                else z.noalias() += support_at(s) * hw;
            }
            break;
        case LayerKind::DepthwiseSeparableConv:
            z = Matrix::Zero(h.rows(), layer.out);
            for (std::size_t s = 0; s < supports.size(); ++s) {
                const Matrix mixed = p.depthwise.row(static_cast<Index>(s)).transpose().asDiagonal() * p.weights[0];
                const Matrix hw = h * mixed;
                if (kernel_seeds.empty()) z.noalias() += supports[s] * hw;
                else z.noalias() += support_at(s) * hw;
            }
            break;
        case LayerKind::Dense:
            z = h * p.weights[0];
            break;
        case LayerKind::ReadoutMeanMax:
            break;
        }
        add_bias(z, p.bias);
        Matrix out = apply_activation(z, layer.activation);
        if (record) {
            record->input = h;
            record->kernel_seeds = std::move(kernel_seeds);
            record->kernel_rate = dropout.kernel_rate;
            record->output = out;
        }
        h = std::move(out);
    }
    return h;
}

void Network::backward(const Parameters& params, std::span<const Matrix> supports, const Tape& tape,
                       const Matrix& grad_output, Parameters& grads) const {
    if (tape.layers.size() != spec_.layers.size()) throw invalid_argument("tape does not match the model");
    Matrix grad = grad_output;
    for (std::size_t li = spec_.layers.size(); li-- > 0;) {
        const LayerSpec& layer = spec_.layers[li];
        const LayerParams& p = params.layers[li];
        LayerParams& g = grads.layers[li];
        const LayerTape& record = tape.layers[li];
        const bool need_input_grad = li > 0;

        if (layer.kind == LayerKind::ReadoutMeanMax) {
            const auto f = static_cast<Index>(record.argmax.size());
            const Index rows = record.input_rows;
            Matrix dh = grad.leftCols(f).replicate(rows, 1) / static_cast<double>(rows);
            for (Index j = 0; j < f; ++j) dh(record.argmax[static_cast<std::size_t>(j)], j) += grad(0, f + j);
            grad = std::move(dh);
            continue;
        }

        const Matrix dz = activation_backward(grad, record.output, layer.activation);
        if (g.bias.size() > 0) g.bias += dz.colwise().sum().transpose();
        const Matrix& h = record.input;
        Matrix dh;
        if (need_input_grad) dh = Matrix::Zero(h.rows(), h.cols());

        // P_s = C_s^T dZ for the (possibly masked) support used in forward.
        auto propagate = [&](std::size_t s) -> Matrix {
            if (record.kernel_seeds.empty()) return supports[s].transpose() * dz;
            const Matrix masked = drop_kernel_entries(supports[s], record.kernel_rate, record.kernel_seeds[s]);
            return masked.transpose() * dz;
        };

        switch (layer.kind) {
        case LayerKind::MultiSupportConv:
            for (std::size_t s = 0; s < supports.size(); ++s) {
                const Matrix back = propagate(s);
                g.weights[s].noalias() += h.transpose() * back;
                if (need_input_grad) dh.noalias() += back * p.weights[s].transpose();
            }
            break;
        case LayerKind::DepthwiseSeparableConv: {
            const Matrix& w = p.weights[0];
            for (std::size_t s = 0; s < supports.size(); ++s) {
                const auto row = static_cast<Index>(s);
                const Matrix back = propagate(s);
                const Matrix inner = h.transpose() * back;  // f_in x f_out
                const Vector ws = p.depthwise.row(row).transpose();
                g.weights[0].noalias() += ws.asDiagonal() * inner;
                g.depthwise.row(row) += inner.cwiseProduct(w).rowwise().sum().transpose();
                if (need_input_grad) dh.noalias() += (back * w.transpose()) * ws.asDiagonal();
            }
            break;
        }
        case LayerKind::Dense:
            g.weights[0].noalias() += h.transpose() * dz;
            if (need_input_grad) dh.noalias() += dz * p.weights[0].transpose();
            break;
        case LayerKind::ReadoutMeanMax:
            break;
        }
        if (!need_input_grad) break;
        if (record.input_scale.size() > 0) dh = dh.cwiseProduct(record.input_scale);
        grad = std::move(dh);
    }
}

} // namespace specgconv::nn
