#include "specgconv/analysis.hpp"

#include "specgconv/csv.hpp"
#include "specgconv/error.hpp"

#include <cmath>

namespace specgconv {

FrequencyProfile profile(const Matrix& support, const SpectralBasis& basis, std::string kernel_tag) {
    const Index n = basis.size();
    if (support.rows() != n || support.cols() != n) {
        throw invalid_argument("support is " + std::to_string(support.rows()) + "x" + std::to_string(support.cols()) +
                               " but the basis has " + std::to_string(n) + " eigenvectors");
    }
    FrequencyProfile p;
    p.lambda = basis.eigenvalues;
    p.full = basis.eigenvectors.transpose() * support * basis.eigenvectors;
    p.standard = p.full.diagonal();
    p.kernel_tag = std::move(kernel_tag);
    return p;
}

ProfileDeviation profile_deviation(const Vector& standard, const Vector& oracle) {
    if (standard.size() != oracle.size()) {
        throw invalid_argument("profile length " + std::to_string(standard.size()) + " does not match oracle length " +
                               std::to_string(oracle.size()));
    }
    ProfileDeviation d;
    if (standard.size() == 0) return d;
    const Vector diff = standard - oracle;
    d.max_abs = diff.cwiseAbs().maxCoeff();
    d.rms = std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
    return d;
}

GatProfileStats gat_profile_stats(const Graph& g, const SpectralBasis& basis, int trials, std::uint64_t seed,
                                  const GatSampleOptions& options) {
    if (trials < 1) throw invalid_argument("GAT statistics need at least one trial");
    const Index n = basis.size();
    if (g.num_nodes() != n) throw invalid_argument("graph and basis sizes differ");

    // Welford accumulation keeps the running moments stable over many trials.
    Matrix mean_full = Matrix::Zero(n, n);
    Matrix m2_full = Matrix::Zero(n, n);
    for (int t = 0; t < trials; ++t) {
        const Matrix kernel = gat_sample_kernels(g, 1, seed + static_cast<std::uint64_t>(t), options).front();
        const Matrix full = basis.eigenvectors.transpose() * kernel * basis.eigenvectors;
        const Matrix delta = full - mean_full;
        mean_full += delta / static_cast<double>(t + 1);
        m2_full += delta.cwiseProduct(full - mean_full);
    }
    GatProfileStats stats;
    stats.trials = trials;
    stats.lambda = basis.eigenvalues;
    stats.mean_full = mean_full;
    stats.std_full = (m2_full / static_cast<double>(trials)).cwiseMax(0.0).cwiseSqrt();
    stats.mean_standard = stats.mean_full.diagonal();
    stats.std_standard = stats.std_full.diagonal();
    return stats;
}

void export_profile(const FrequencyProfile& p, const std::filesystem::path& standard_path,
                    const std::optional<std::filesystem::path>& full_path, const ExportOptions& options) {
    if (p.lambda.size() != p.standard.size()) throw invalid_argument("profile lambda/standard lengths differ");
    Matrix table(p.lambda.size(), 2);
    table.col(0) = p.lambda;
    table.col(1) = options.absolute ? Vector(p.standard.cwiseAbs()) : p.standard;
    csv::write_matrix(standard_path, table, {"lambda", "standard"});
    if (full_path) {
        csv::write_matrix(*full_path, options.absolute ? Matrix(p.full.cwiseAbs()) : p.full);
    }
}

FrequencyProfile import_profile(const std::filesystem::path& standard_path,
                                const std::optional<std::filesystem::path>& full_path) {
    const csv::Table header_check = csv::read_table(standard_path);
    if (header_check.column("lambda") != 0 || header_check.column("standard") != 1 || header_check.header.size() != 2) {
        throw io_error(standard_path.string() + ": expected header 'lambda,standard'");
    }
    const Matrix table = csv::read_matrix(standard_path);
    FrequencyProfile p;
    p.lambda = table.col(0);
    p.standard = table.col(1);
    if (full_path) p.full = csv::read_matrix(*full_path);
    return p;
}

} // namespace specgconv
