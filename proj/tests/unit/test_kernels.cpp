#include "specgconv/kernels.hpp"

#include "../support/checks.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace specgconv;

namespace {

std::shared_ptr<const SpectralBasis> basis_of(const Graph& g, LaplacianKind kind = LaplacianKind::SymmetricNormalized) {
    return std::make_shared<const SpectralBasis>(decompose(g, kind));
}

/// Straight-from-the-definition attention kernel for one head.
Matrix gat_reference(const Graph& g, std::uint64_t seed) {
    const Index n = g.num_nodes(), f = g.num_features(), hidden = 8;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix w(f, hidden);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
    Vector a(2 * hidden);
    for (Index i = 0; i < a.size(); ++i) a(i) = normal(rng);
    Matrix out = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        double total = 0.0;
        for (Index j = 0; j < n; ++j) {
            if (j != i && g.adjacency()(i, j) == 0.0) continue;
            double e = 0.0;
            for (Index k = 0; k < hidden; ++k) {
                e += a(k) * g.features().row(i).dot(w.col(k)) + a(hidden + k) * g.features().row(j).dot(w.col(k));
            }
            e = e > 0.0 ? e : 0.2 * e;
            out(i, j) = std::exp(e);
            total += out(i, j);
        }
        out.row(i) /= total;
    }
    return out;
}

} // namespace

TEST_SUITE("kernel-factory") {

TEST_CASE("all-pass design gives the identity") {
    oracle::Rng rng(1);
    const auto basis = basis_of(oracle::connected_graph(15, 0.3, rng));
    CHECK(max_abs(design_kernel(*basis, design::AllPass{}) - Matrix::Identity(15, 15)) < 1e-12);
}

TEST_CASE("tabulated eigenvalues rebuild the Laplacian") {
    oracle::Rng rng(2);
    const Graph g = oracle::connected_graph(15, 0.3, rng, true);
    for (LaplacianKind kind : {LaplacianKind::Combinatorial, LaplacianKind::SymmetricNormalized}) {
        const auto basis = basis_of(g, kind);
        const Matrix c = design_kernel(*basis, design::Tabulated{basis->eigenvalues, "eigenvalues"});
        CHECK(max_abs(c - build_laplacian(g, kind)) < 1e-10);
    }
}

TEST_CASE("property: designed kernels are symmetric and their profile is the design") {
    oracle::Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto basis = basis_of(oracle::connected_graph(rng.integer(4, 25), 0.3, rng));
        const FilterDesign d = design::BandPass{rng.uniform(), rng.uniform(0.5, 5.0)};
        const Matrix c = design_kernel(*basis, d);
        CHECK(asymmetry(c) == 0.0);
        const Vector back = (basis->eigenvectors.transpose() * c * basis->eigenvectors).diagonal();
        CHECK((back - evaluate(d, *basis)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("designed kernel set keeps order and provenance") {
    oracle::Rng rng(4);
    const auto basis = basis_of(oracle::connected_graph(8, 0.4, rng));
    const std::vector<FilterDesign> designs{design::LowPass{1.0}, design::HighPass{}};
    const KernelSet set = designed_kernels(basis, designs);
    CHECK(set.size() == 2);
    CHECK(set.num_nodes() == 8);
    CHECK_NOTHROW(set.validate());
    CHECK(to_string(set.provenance[1]).find("highpass") != std::string::npos);
    // Complementary designs sum to the identity.
    CHECK(max_abs(set.supports[0] + set.supports[1] - Matrix::Identity(8, 8)) < 1e-12);
    CHECK(checks::error_kind([&] { designed_kernels(nullptr, designs); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("Chebyshev kernels follow the recursion") {
    oracle::Rng rng(5);
    const Graph g = oracle::connected_graph(12, 0.3, rng);
    const Matrix l = build_laplacian(g, LaplacianKind::SymmetricNormalized);
    const double lmax = decompose(l, LaplacianKind::SymmetricNormalized).lambda_max();
    const KernelSet set = cheb_kernels(l, lmax, 4);
    const Matrix eye = Matrix::Identity(12, 12);
    const Matrix c2 = 2.0 * l / lmax - eye;
    CHECK(set.supports[0] == eye);
    CHECK(max_abs(set.supports[1] - c2) < 1e-14);
    CHECK(max_abs(set.supports[2] - (2.0 * c2 * c2 - eye)) < 1e-12);
    CHECK(max_abs(set.supports[3] - (4.0 * c2 * c2 * c2 - 3.0 * c2)) < 1e-12);
    CHECK(checks::error_kind([&] { cheb_kernels(l, lmax, 0); }) == ErrorKind::InvalidArgument);
    CHECK(checks::error_kind([&] { cheb_kernels(l, 0.0, 2); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("property: Chebyshev kernel profiles are Chebyshev polynomials") {
    oracle::Rng rng(6);
    const Graph g = oracle::connected_graph(20, 0.25, rng);
    const Matrix l = build_laplacian(g, LaplacianKind::SymmetricNormalized);
    const SpectralBasis basis = decompose(l, LaplacianKind::SymmetricNormalized);
    const KernelSet set = cheb_kernels(l, basis.lambda_max(), 6);
    for (int k = 0; k < 6; ++k) {
        const Vector got =
            (basis.eigenvectors.transpose() * set.supports[static_cast<std::size_t>(k)] * basis.eigenvectors)
                .diagonal();
        for (Index i = 0; i < basis.size(); ++i) {
            const double x = 2.0 * basis.eigenvalues(i) / basis.lambda_max() - 1.0;
            CHECK(std::abs(got(i) - oracle::chebyshev_t(k, x)) < 1e-9);
        }
    }
}

TEST_CASE("GCN kernel on a single edge") {
    Matrix a(2, 2);
    a << 0, 1, 1, 0;
    const Matrix c = gcn_kernel(Graph(a));
    CHECK(max_abs(c - Matrix::Constant(2, 2, 0.5)) < 1e-15);
}

TEST_CASE("GCN kernel splits into a self term and a normalized neighbour term") {
    oracle::Rng rng(7);
    const Graph g = oracle::connected_graph(14, 0.3, rng, true);
    const Vector dt = (g.degrees().array() + 1.0).rsqrt().matrix();
    const Matrix self = dt.cwiseProduct(dt).asDiagonal();
    const Matrix neighbours = dt.asDiagonal() * g.adjacency() * dt.asDiagonal();
    CHECK(max_abs(gcn_kernel(g) - (self + neighbours)) < 1e-14);
}

TEST_CASE("GCN kernel on a regular ring is exactly 1 - lambda d/(d+1) in the spectrum") {
    const Graph g = make_ring(64);
    const SpectralBasis basis = decompose(g, LaplacianKind::SymmetricNormalized);
    const Matrix full = basis.eigenvectors.transpose() * gcn_kernel(g) * basis.eigenvectors;
    const Vector expected = 1.0 - basis.eigenvalues.array() * (2.0 / 3.0);
    CHECK((full.diagonal() - expected).cwiseAbs().maxCoeff() < 1e-12);
    Matrix off = full;
    off.diagonal().setZero();
    CHECK(max_abs(off) < 1e-12);
}

TEST_CASE("GAT kernels match the definition and are row-stochastic") {
    oracle::Rng rng(8);
    const Graph base = oracle::connected_graph(10, 0.3, rng);
    const Graph g = base.with_features(rng.matrix(10, 3));
    const std::vector<Matrix> heads = gat_sample_kernels(g, 1, 42);
    REQUIRE(heads.size() == 1);
    CHECK(max_abs(heads[0] - gat_reference(g, 42)) < 1e-12);
    CHECK((heads[0].rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    for (Index i = 0; i < 10; ++i)
        for (Index j = 0; j < 10; ++j)
            if (i != j && g.adjacency()(i, j) == 0.0) CHECK(heads[0](i, j) == 0.0);
    CHECK(gat_sample_kernels(g, 3, 42).size() == 3);
    CHECK(gat_sample_kernels(g, 1, 42)[0] == heads[0]);
}

TEST_CASE("GAT row of an isolated node is self-only") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = a(1, 0) = 1.0;
    const Graph g(a, Matrix::Identity(3, 3));
    const Matrix c = gat_sample_kernels(g, 1, 1)[0];
    CHECK(c(2, 2) == 1.0);
    CHECK(c(2, 0) == 0.0);
    CHECK(c(2, 1) == 0.0);
    CHECK(checks::error_kind([&] { gat_sample_kernels(Graph(a), 1, 1); }) == ErrorKind::InvalidArgument);
    CHECK(checks::error_kind([&] { gat_sample_kernels(g, 0, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("property: multi-support convolution equals its spectral form") {
    oracle::Rng rng(9);
    for (int trial = 0; trial < 15; ++trial) {
        const Index n = rng.integer(4, 16), fin = rng.integer(1, 4), fout = rng.integer(1, 4);
        const Index supports = rng.integer(1, 4);
        const auto basis = basis_of(oracle::connected_graph(n, 0.3, rng));
        Matrix b(n, supports);
        std::vector<Matrix> kernels, weights;
        for (Index s = 0; s < supports; ++s) {
            b.col(s) = rng.vector(n);
            kernels.push_back(design_kernel(*basis, Vector(b.col(s))));
            weights.push_back(rng.matrix(fin, fout));
        }
        const Matrix h = rng.matrix(n, fin);
        const Matrix vertex = oracle::naive_multisupport(h, kernels, weights);
        const Matrix spectral = oracle::spectral_layer(basis->eigenvectors, b, weights, h);
        CHECK(max_abs(vertex - spectral) < 1e-9);
    }
}

TEST_CASE("identity B-matrix gives rank-one eigenvector supports") {
    oracle::Rng rng(10);
    const auto basis = basis_of(oracle::connected_graph(6, 0.5, rng));
    for (Index s = 0; s < 6; ++s) {
        const Matrix c = design_kernel(*basis, Vector(Matrix::Identity(6, 6).col(s)));
        const Vector u = basis->eigenvectors.col(s);
        CHECK(max_abs(c - u * u.transpose()) < 1e-12);
    }
}

TEST_CASE("kernel set validation") {
    KernelSet empty;
    CHECK(checks::error_kind([&] { empty.validate(); }) == ErrorKind::InvalidArgument);
    KernelSet mismatched;
    mismatched.supports = {Matrix::Identity(3, 3), Matrix::Identity(4, 4)};
    mismatched.provenance = {provenance::Gcn{}, provenance::Gcn{}};
    CHECK(checks::error_kind([&] { mismatched.validate(); }) == ErrorKind::InvalidArgument);
}

}
