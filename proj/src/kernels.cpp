#include "specgconv/kernels.hpp"

#include "specgconv/error.hpp"

#include <cmath>
#include <random>

namespace specgconv {

std::string to_string(const KernelProvenance& p) {
    if (const auto* d = std::get_if<provenance::Designed>(&p)) return "design:" + to_string(d->design);
    if (const auto* c = std::get_if<provenance::Chebyshev>(&p)) return "cheb:" + std::to_string(c->k);
    if (std::holds_alternative<provenance::Gcn>(p)) return "gcn";
    const auto& g = std::get<provenance::GatSample>(p);
    return "gat:" + std::to_string(g.seed) + ":" + std::to_string(g.head);
}

void KernelSet::validate() const {
    if (supports.empty()) throw invalid_argument("kernel set is empty");
    if (provenance.size() != supports.size()) throw invalid_argument("kernel provenance does not match support count");
    const Index n = supports.front().rows();
    for (const Matrix& c : supports) {
        if (c.rows() != n || c.cols() != n) throw invalid_argument("supports must all be n x n with the same n");
    }
    if (basis && basis->size() != n) throw invalid_argument("kernel set basis size does not match supports");
}

Matrix design_kernel(const SpectralBasis& basis, const Vector& response) {
    if (response.size() != basis.size()) {
        throw invalid_argument("response length " + std::to_string(response.size()) + " does not match basis size " +
                               std::to_string(basis.size()));
    }
    const Matrix& u = basis.eigenvectors;
    Matrix c = (u * response.asDiagonal()) * u.transpose();
    return 0.5 * (c + c.transpose());
}

KernelSet designed_kernels(std::shared_ptr<const SpectralBasis> basis, std::span<const FilterDesign> designs) {
    if (!basis) throw invalid_argument("designed kernels need a spectral basis");
    if (designs.empty()) throw invalid_argument("designed kernels need at least one design");
    KernelSet set;
    for (const FilterDesign& d : designs) {
        set.supports.push_back(design_kernel(*basis, d));
        set.provenance.push_back(provenance::Designed{d});
    }
    set.basis = std::move(basis);
    return set;
}

KernelSet cheb_kernels(const Matrix& laplacian, double lambda_max, int count) {
    if (count < 1) throw invalid_argument("Chebyshev kernel count must be >= 1");
    if (!(lambda_max > 0.0)) throw invalid_argument("Chebyshev kernels need lambda_max > 0");
    const Index n = laplacian.rows();
    KernelSet set;
    set.supports.push_back(Matrix::Identity(n, n));
    set.provenance.push_back(provenance::Chebyshev{1});
    if (count >= 2) {
        Matrix c2 = (2.0 / lambda_max) * laplacian;
        c2.diagonal().array() -= 1.0;
        set.supports.push_back(std::move(c2));
        set.provenance.push_back(provenance::Chebyshev{2});
    }
    for (int k = 3; k <= count; ++k) {
        const Matrix& c2 = set.supports[1];
        Matrix next = 2.0 * c2 * set.supports[static_cast<std::size_t>(k - 2)] - set.supports[static_cast<std::size_t>(k - 3)];
        set.supports.push_back(std::move(next));
        set.provenance.push_back(provenance::Chebyshev{k});
    }
    return set;
}

Matrix gcn_kernel(const Graph& g) {
    Matrix a_tilde = g.adjacency();
    a_tilde.diagonal().array() += 1.0;
    const Vector inv_sqrt = a_tilde.rowwise().sum().array().rsqrt();
    Matrix c = inv_sqrt.asDiagonal() * a_tilde * inv_sqrt.asDiagonal();
    return 0.5 * (c + c.transpose());
}

std::vector<Matrix> gat_sample_kernels(const Graph& g, int heads, std::uint64_t seed, const GatSampleOptions& options) {
    if (heads < 1) throw invalid_argument("GAT sampling needs at least one head");
    if (g.num_features() == 0) throw invalid_argument("GAT sampling needs a nonempty feature matrix");
    const Index n = g.num_nodes();
    const Index f = g.num_features();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, options.weight_scale);

    std::vector<Matrix> kernels;
    kernels.reserve(static_cast<std::size_t>(heads));
    for (int head = 0; head < heads; ++head) {
        Matrix w(f, options.hidden);
        for (Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
        Vector a(2 * options.hidden);
        for (Index i = 0; i < a.size(); ++i) a(i) = normal(rng);

        const Matrix projected = g.features() * w;  // n x hidden
        const Vector source_term = projected * a.head(options.hidden);
        const Vector target_term = projected * a.tail(options.hidden);

        Matrix kernel = Matrix::Zero(n, n);
        std::vector<Index> support;
        std::vector<double> scores;
        for (Index i = 0; i < n; ++i) {
            support.clear();
            scores.clear();
            for (Index j = 0; j < n; ++j) {
                if (j == i || g.adjacency()(i, j) != 0.0) support.push_back(j);
            }
            double best = -std::numeric_limits<double>::infinity();
            for (Index j : support) {
                double e = source_term(i) + target_term(j);
                if (e < 0.0) e *= options.negative_slope;
                scores.push_back(e);
                best = std::max(best, e);
            }
            double total = 0.0;
            for (double& e : scores) {
                e = std::exp(e - best);
                total += e;
            }
            for (std::size_t k = 0; k < support.size(); ++k) kernel(i, support[k]) = scores[k] / total;
        }
        kernels.push_back(std::move(kernel));
    }
    return kernels;
}

} // namespace specgconv
