#include "specgconv/graph.hpp"

#include "specgconv/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace specgconv {

Graph::Graph(Matrix adjacency, Matrix features) : adjacency_(std::move(adjacency)), features_(std::move(features)) {
    const Index n = adjacency_.rows();
    if (adjacency_.cols() != n) throw invalid_argument("adjacency must be square");
    if (features_.size() == 0 && features_.rows() != n) features_.resize(n, 0);
    if (features_.rows() != n) {
        throw invalid_argument("feature matrix has " + std::to_string(features_.rows()) + " rows, expected " +
                               std::to_string(n));
    }
    for (Index i = 0; i < n; ++i) {
        if (adjacency_(i, i) != 0.0) throw invalid_argument("self-loop on node " + std::to_string(i));
        for (Index j = i + 1; j < n; ++j) {
            const double w = adjacency_(i, j);
            if (w != adjacency_(j, i)) {
                throw invalid_argument("adjacency not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (!(w >= 0.0) || !std::isfinite(w)) {
                throw invalid_argument("negative or non-finite edge weight at (" + std::to_string(i) + "," +
                                       std::to_string(j) + ")");
            }
        }
    }
}

Graph Graph::from_edges(Index num_nodes, std::span<const Edge> edges, Matrix features) {
    if (num_nodes < 0) throw invalid_argument("negative node count");
    Matrix a = Matrix::Zero(num_nodes, num_nodes);
    for (const Edge& e : edges) {
        if (e.source < 0 || e.source >= num_nodes || e.target < 0 || e.target >= num_nodes) {
            throw invalid_argument("edge (" + std::to_string(e.source) + "," + std::to_string(e.target) +
                                   ") references a node outside [0," + std::to_string(num_nodes) + ")");
        }
        if (e.source == e.target) throw invalid_argument("self-loop on node " + std::to_string(e.source));
        a(e.source, e.target) = e.weight;
        a(e.target, e.source) = e.weight;
    }
    return Graph(std::move(a), std::move(features));
}

Index Graph::num_edges() const {
    Index count = 0;
    for (Index i = 0; i < num_nodes(); ++i)
        for (Index j = i + 1; j < num_nodes(); ++j)
            if (adjacency_(i, j) != 0.0) ++count;
    return count;
}

Graph Graph::with_features(Matrix features) const { return Graph(adjacency_, std::move(features)); }

std::string to_string(LaplacianKind kind) {
    return kind == LaplacianKind::Combinatorial ? "combinatorial" : "normalized";
}

LaplacianKind parse_laplacian_kind(const std::string& text) {
    if (text == "combinatorial") return LaplacianKind::Combinatorial;
    if (text == "normalized" || text == "symmetric_normalized") return LaplacianKind::SymmetricNormalized;
    throw config_error("unknown Laplacian kind '" + text + "' (expected combinatorial|normalized)");
}

Matrix build_laplacian(const Graph& g, LaplacianKind kind) {
    const Matrix& a = g.adjacency();
    const Vector d = g.degrees();
    if (kind == LaplacianKind::Combinatorial) {
        Matrix l = -a;
        l.diagonal() += d;
        return l;
    }
    Vector inv_sqrt(d.size());
    for (Index i = 0; i < d.size(); ++i) {
        if (!(d(i) > 0.0)) {
            throw invalid_argument("node " + std::to_string(i) +
                                   " has degree zero; the normalized Laplacian is undefined");
        }
        inv_sqrt(i) = 1.0 / std::sqrt(d(i));
    }
    Matrix l = -(inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal());
    l.diagonal().array() += 1.0;
    // Entry (i,j) and (j,i) are computed by different operand orders; pin them.
    l = 0.5 * (l + l.transpose()).eval();
    return l;
}

double average_degree(const Graph& g) {
    if (g.num_nodes() == 0) return 0.0;
    return g.degrees().mean();
}

Graph make_ring(Index n) {
    if (n < 3) throw invalid_argument("ring graph needs at least 3 nodes, got " + std::to_string(n));
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
    return Graph::from_edges(n, edges);
}

Graph make_star(Index leaves) {
    if (leaves < 1) throw invalid_argument("star graph needs at least one leaf");
    std::vector<Edge> edges;
    for (Index i = 1; i <= leaves; ++i) edges.push_back({0, i, 1.0});
    return Graph::from_edges(leaves + 1, edges);
}

Graph make_random_graph(Index n, double edge_probability, std::uint64_t seed) {
    if (n < 1) throw invalid_argument("random graph needs at least one node");
    if (!(edge_probability >= 0.0 && edge_probability <= 1.0)) throw invalid_argument("edge probability outside [0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            if (unit(rng) < edge_probability) edges.push_back({i, j, 1.0});
    return Graph::from_edges(n, edges);
}

Graph make_random_with_degrees(std::span<const Index> degrees, std::uint64_t seed, int max_attempts) {
    const auto n = static_cast<Index>(degrees.size());
    Index total = 0;
    for (Index d : degrees) {
        if (d < 0 || d >= n) throw invalid_argument("degree outside [0, n)");
        total += d;
    }
    if (total % 2 != 0) throw invalid_argument("degree sequence has odd sum");

    std::mt19937_64 rng(seed);
    std::vector<Index> stubs;
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < degrees[static_cast<std::size_t>(i)]; ++k) stubs.push_back(i);

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::shuffle(stubs.begin(), stubs.end(), rng);
        std::set<std::pair<Index, Index>> seen;
        std::vector<Edge> edges;
        bool ok = true;
        for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
            Index u = stubs[k], v = stubs[k + 1];
            if (u == v) { ok = false; break; }
            if (u > v) std::swap(u, v);
            if (!seen.insert({u, v}).second) { ok = false; break; }
            edges.push_back({u, v, 1.0});
        }
        if (ok) return Graph::from_edges(n, edges);
    }
    throw numerical_error("no simple graph realizes the degree sequence within " + std::to_string(max_attempts) +
                          " attempts");
}

} // namespace specgconv
