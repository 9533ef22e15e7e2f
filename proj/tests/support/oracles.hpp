#pragma once
// Random instance generators and independent reference implementations used
// by the unit and acceptance tests. Nothing here calls the code under test
// for the quantity being checked.

#include "specgconv/graph.hpp"
#include "specgconv/linalg.hpp"
#include "specgconv/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace oracle {

using specgconv::Index;
using specgconv::Matrix;
using specgconv::Vector;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(engine_); }
    std::uint64_t bits() { return engine_(); }
    Matrix matrix(Index rows, Index cols) {
        Matrix m(rows, cols);
        for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal();
        return m;
    }
    Vector vector(Index n) { return matrix(n, 1).col(0); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Random weighted graph with every node connected to at least one other.
inline specgconv::Graph connected_graph(Index n, double p, Rng& rng, bool weighted = false) {
    Matrix a = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (rng.uniform() < p) a(i, j) = a(j, i) = weighted ? rng.uniform(0.5, 2.0) : 1.0;
        }
    }
    // Chain any isolated node to its successor so normalized Laplacians exist.
    for (Index i = 0; i < n; ++i) {
        if (a.row(i).sum() == 0.0) {
            const Index j = (i + 1) % n;
            a(i, j) = a(j, i) = 1.0;
        }
    }
    return specgconv::Graph(a);
}

/// sum_s C_s H W_s by explicit loops.
inline Matrix naive_multisupport(const Matrix& h, std::span<const Matrix> supports, std::span<const Matrix> weights) {
    const Index n = h.rows(), fin = h.cols(), fout = weights[0].cols();
    Matrix out = Matrix::Zero(n, fout);
    for (std::size_t s = 0; s < supports.size(); ++s)
        for (Index i = 0; i < n; ++i)
            for (Index k = 0; k < n; ++k)
                for (Index a = 0; a < fin; ++a)
                    for (Index b = 0; b < fout; ++b) out(i, b) += supports[s](i, k) * h(k, a) * weights[s](a, b);
    return out;
}

/// (sum_s w_s . (C_s H)) W by explicit loops.
inline Matrix naive_depthwise(const Matrix& h, std::span<const Matrix> supports, const Matrix& depthwise,
                              const Matrix& weight) {
    const Index n = h.rows(), fin = h.cols(), fout = weight.cols();
    Matrix mixed = Matrix::Zero(n, fin);
    for (std::size_t s = 0; s < supports.size(); ++s)
        for (Index i = 0; i < n; ++i)
            for (Index a = 0; a < fin; ++a) {
                double acc = 0.0;
                for (Index k = 0; k < n; ++k) acc += supports[s](i, k) * h(k, a);
                mixed(i, a) += depthwise(static_cast<Index>(s), a) * acc;
            }
    Matrix out = Matrix::Zero(n, fout);
    for (Index i = 0; i < n; ++i)
        for (Index a = 0; a < fin; ++a)
            for (Index b = 0; b < fout; ++b) out(i, b) += mixed(i, a) * weight(a, b);
    return out;
}

/// Spectral-side layer: output column j = sum_i U diag(sum_s W_s(i,j) B(:,s)) U^T H(:,i).
inline Matrix spectral_layer(const Matrix& u, const Matrix& b, std::span<const Matrix> weights, const Matrix& h) {
    const Index fin = h.cols(), fout = weights[0].cols();
    Matrix out = Matrix::Zero(h.rows(), fout);
    for (Index j = 0; j < fout; ++j) {
        for (Index i = 0; i < fin; ++i) {
            Vector filter = Vector::Zero(b.rows());
            for (Index s = 0; s < b.cols(); ++s) filter += weights[static_cast<std::size_t>(s)](i, j) * b.col(s);
            const Vector spectrum = u.transpose() * h.col(i);
            out.col(j) += u * filter.cwiseProduct(spectrum);
        }
    }
    return out;
}

/// Chebyshev polynomial T_m(x) through the trigonometric/hyperbolic identity.
inline double chebyshev_t(int m, double x) {
    if (std::abs(x) <= 1.0) return std::cos(m * std::acos(std::clamp(x, -1.0, 1.0)));
    const double sign = (x < 0 && (m % 2 == 1)) ? -1.0 : 1.0;
    return sign * std::cosh(m * std::acosh(std::abs(x)));
}

/// c0 + 2 Re(sum_k c_k ((h lambda - i)/(h lambda + i))^k) in complex arithmetic.
inline double cayley_complex(double lambda, double h, double c0, std::span<const std::complex<double>> c) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> z = (h * lambda - i) / (h * lambda + i);
    std::complex<double> acc = 0.0;
    std::complex<double> power = 1.0;
    for (const auto& ck : c) {
        power *= z;
        acc += ck * power;
    }
    return c0 + 2.0 * acc.real();
}

/// Hand-rolled decomposition check: max |A v - lambda v| over columns.
inline double eigen_residual(const Matrix& a, const Vector& lambda, const Matrix& u) {
    return (a * u - u * lambda.asDiagonal()).cwiseAbs().maxCoeff();
}

/// Per-test scratch directory under the system temp dir, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("specgconv_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
}

} // namespace oracle
