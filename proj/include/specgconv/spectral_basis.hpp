#pragma once

#include "specgconv/graph.hpp"
#include "specgconv/linalg.hpp"

#include <filesystem>
#include <optional>

namespace specgconv {

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// (eigenvector s in column s) of a graph Laplacian.
struct SpectralBasis {
    Vector eigenvalues;
    Matrix eigenvectors;
    LaplacianKind kind = LaplacianKind::SymmetricNormalized;

    Index size() const noexcept { return eigenvalues.size(); }
    double lambda_max() const { return eigenvalues.size() == 0 ? 0.0 : eigenvalues(eigenvalues.size() - 1); }
};

/// Dense symmetric eigendecomposition with a deterministic basis: ascending
/// eigenvalues (ties keep solver order) and, per column, the largest-magnitude
/// entry (lowest index on ties) made nonnegative.
SpectralBasis decompose(const Matrix& laplacian, LaplacianKind kind);

inline SpectralBasis decompose(const Graph& g, LaplacianKind kind) { return decompose(build_laplacian(g, kind), kind); }

struct BasisCheck {
    double orthonormality = 0.0;   ///< max |U^T U - I|
    double reconstruction = 0.0;   ///< max |U diag(lambda) U^T - L|
    bool ok = false;
};

/// Checks the basis invariants against the Laplacian it came from.
BasisCheck check_basis(const SpectralBasis& basis, const Matrix& laplacian, double tolerance = 1e-8);

Vector fourier(const SpectralBasis& basis, const Vector& signal);
Vector inverse_fourier(const SpectralBasis& basis, const Vector& spectrum);

/// On-disk cache of decompositions keyed by a content hash of the Laplacian.
/// Entries that fail the basis invariants on load are discarded.
class BasisCache {
public:
    explicit BasisCache(std::filesystem::path directory);

    std::optional<SpectralBasis> load(const Matrix& laplacian, LaplacianKind kind) const;
    void store(const Matrix& laplacian, const SpectralBasis& basis) const;

    /// load() or decompose() followed by store().
    SpectralBasis get_or_compute(const Matrix& laplacian, LaplacianKind kind) const;

    const std::filesystem::path& directory() const noexcept { return directory_; }

private:
    std::filesystem::path entry_stem(const Matrix& laplacian, LaplacianKind kind) const;

    std::filesystem::path directory_;
};

} // namespace specgconv
