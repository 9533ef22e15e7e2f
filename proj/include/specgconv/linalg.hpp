#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace specgconv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

/// Largest |A - A^T| entry.
inline double asymmetry(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

/// FNV-1a over the raw bytes of a matrix plus its shape. Used as a cache key.
std::uint64_t content_hash(const Matrix& a, std::uint64_t salt = 0);

} // namespace specgconv
