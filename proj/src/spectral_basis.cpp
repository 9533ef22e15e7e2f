#include "specgconv/spectral_basis.hpp"

#include "specgconv/csv.hpp"
#include "specgconv/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace specgconv {

SpectralBasis decompose(const Matrix& laplacian, LaplacianKind kind) {
    const Index n = laplacian.rows();
    if (laplacian.cols() != n) throw invalid_argument("Laplacian must be square");
    const double skew = asymmetry(laplacian);
    if (skew > 1e-10) {
        std::ostringstream msg;
        msg << "Laplacian is not symmetric (max |L - L^T| = " << skew << ")";
        throw invalid_argument(msg.str());
    }
    SpectralBasis basis;
    basis.kind = kind;
    if (n == 0) return basis;

    Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw numerical_error("symmetric eigensolver did not converge");

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    const Vector& values = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&values](Index a, Index b) { return values(a) < values(b); });

    basis.eigenvalues.resize(n);
    basis.eigenvectors.resize(n, n);
    for (Index s = 0; s < n; ++s) {
        const Index src = order[static_cast<std::size_t>(s)];
        basis.eigenvalues(s) = values(src);
        auto column = solver.eigenvectors().col(src);
        Index pivot = 0;
        double best = -1.0;
        for (Index i = 0; i < n; ++i) {
            const double mag = std::abs(column(i));
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        basis.eigenvectors.col(s) = column(pivot) < 0.0 ? Vector(-column) : Vector(column);
    }
    return basis;
}

BasisCheck check_basis(const SpectralBasis& basis, const Matrix& laplacian, double tolerance) {
    BasisCheck check;
    const Index n = basis.size();
    if (basis.eigenvectors.rows() != n || basis.eigenvectors.cols() != n || laplacian.rows() != n ||
        laplacian.cols() != n) {
        check.orthonormality = check.reconstruction = std::numeric_limits<double>::infinity();
        return check;
    }
    if (n == 0) {
        check.ok = true;
        return check;
    }
    const Matrix& u = basis.eigenvectors;
    check.orthonormality = max_abs(u.transpose() * u - Matrix::Identity(n, n));
    check.reconstruction = max_abs(u * basis.eigenvalues.asDiagonal() * u.transpose() - laplacian);
    bool sorted = std::is_sorted(basis.eigenvalues.data(), basis.eigenvalues.data() + n);
    check.ok = sorted && check.orthonormality <= tolerance && check.reconstruction <= tolerance;
    return check;
}

Vector fourier(const SpectralBasis& basis, const Vector& signal) {
    if (signal.size() != basis.size()) {
        throw invalid_argument("signal length " + std::to_string(signal.size()) + " does not match basis size " +
                               std::to_string(basis.size()));
    }
    return basis.eigenvectors.transpose() * signal;
}

Vector inverse_fourier(const SpectralBasis& basis, const Vector& spectrum) {
    if (spectrum.size() != basis.size()) {
        throw invalid_argument("spectrum length " + std::to_string(spectrum.size()) + " does not match basis size " +
                               std::to_string(basis.size()));
    }
    return basis.eigenvectors * spectrum;
}

BasisCache::BasisCache(std::filesystem::path directory) : directory_(std::move(directory)) {
    std::error_code ec;
    std::filesystem::create_directories(directory_, ec);
    if (ec) throw io_error("cannot create cache directory " + directory_.string() + ": " + ec.message());
}

std::filesystem::path BasisCache::entry_stem(const Matrix& laplacian, LaplacianKind kind) const {
    const std::uint64_t key = content_hash(laplacian, kind == LaplacianKind::Combinatorial ? 1 : 2);
    char name[32];
    std::snprintf(name, sizeof(name), "%016llx", static_cast<unsigned long long>(key));
    return directory_ / name;
}

std::optional<SpectralBasis> BasisCache::load(const Matrix& laplacian, LaplacianKind kind) const {
    const auto stem = entry_stem(laplacian, kind);
    const auto values_path = stem.string() + "_eigenvalues.csv";
    const auto vectors_path = stem.string() + "_eigenvectors.csv";
    if (!std::filesystem::exists(values_path) || !std::filesystem::exists(vectors_path)) return std::nullopt;
    try {
        SpectralBasis basis;
        basis.kind = kind;
        const Matrix values = csv::read_matrix(values_path);
        if (values.cols() != 1) return std::nullopt;
        basis.eigenvalues = values.col(0);
        basis.eigenvectors = csv::read_matrix(vectors_path);
        if (!check_basis(basis, laplacian).ok) return std::nullopt;
        return basis;
    } catch (const Error&) {
        return std::nullopt;
    }
}

void BasisCache::store(const Matrix& laplacian, const SpectralBasis& basis) const {
    const auto stem = entry_stem(laplacian, basis.kind);
    csv::write_matrix(stem.string() + "_eigenvalues.csv", basis.eigenvalues, {"lambda"});
    csv::write_matrix(stem.string() + "_eigenvectors.csv", basis.eigenvectors);
}

SpectralBasis BasisCache::get_or_compute(const Matrix& laplacian, LaplacianKind kind) const {
    if (auto cached = load(laplacian, kind)) return *std::move(cached);
    SpectralBasis basis = decompose(laplacian, kind);
    store(laplacian, basis);
    return basis;
}

} // namespace specgconv
