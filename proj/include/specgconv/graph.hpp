#pragma once

#include "specgconv/linalg.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace specgconv {

struct Edge {
    Index source = 0;
    Index target = 0;
    double weight = 1.0;
};

/// Undirected weighted graph with a node feature matrix.
///
/// The adjacency is dense, exactly symmetric, nonnegative and has a zero
/// diagonal. Validation happens at construction; instances are immutable.
class Graph {
public:
    Graph() = default;
    explicit Graph(Matrix adjacency, Matrix features = {});

    /// Builds the adjacency from an undirected edge list. Reciprocal and
    /// duplicate edges collapse onto a single entry (last weight wins).
    static Graph from_edges(Index num_nodes, std::span<const Edge> edges, Matrix features = {});

    Index num_nodes() const noexcept { return adjacency_.rows(); }
    Index num_features() const noexcept { return features_.cols(); }
    const Matrix& adjacency() const noexcept { return adjacency_; }
    const Matrix& features() const noexcept { return features_; }
    Vector degrees() const { return adjacency_.rowwise().sum(); }
    Index num_edges() const;

    Graph with_features(Matrix features) const;

private:
    Matrix adjacency_;
    Matrix features_;
};

enum class LaplacianKind { Combinatorial, SymmetricNormalized };

std::string to_string(LaplacianKind kind);
LaplacianKind parse_laplacian_kind(const std::string& text);

/// D - A, or I - D^{-1/2} A D^{-1/2}. The normalized form rejects isolated nodes.
Matrix build_laplacian(const Graph& g, LaplacianKind kind);

double average_degree(const Graph& g);

Graph make_ring(Index n);
Graph make_star(Index leaves);

/// Erdos-Renyi G(n, p) with unit weights.
Graph make_random_graph(Index n, double edge_probability, std::uint64_t seed);

/// Simple graph realizing the given degree sequence (configuration model with
/// restarts). Throws if no simple realization is found within the retry budget.
Graph make_random_with_degrees(std::span<const Index> degrees, std::uint64_t seed, int max_attempts = 1000);

} // namespace specgconv
