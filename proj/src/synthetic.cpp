#include "specgconv/synthetic.hpp"

#include "specgconv/error.hpp"
#include "specgconv/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace specgconv {
namespace {

bool has_isolated(const Graph& g) { return (g.degrees().array() == 0.0).any(); }

} // namespace

BandpassTask make_bandpass_task(Index nodes, double edge_probability, design::BandPass filter,
                                double train_fraction, std::uint64_t seed) {
    if (nodes < 4) throw invalid_argument("band-pass task needs at least 4 nodes");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw invalid_argument("train fraction must lie in (0,1)");
    validate(FilterDesign{filter});

    BandpassTask task;
    task.filter = filter;
    Graph g;
    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt == 1000) throw numerical_error("could not draw a graph without isolated nodes");
        g = make_random_graph(nodes, edge_probability, seed * 7919ULL + attempt);
        if (!has_isolated(g)) break;
    }

    std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    task.signal.resize(nodes);
    for (Index i = 0; i < nodes; ++i) task.signal(i) = normal(rng);

    task.basis = std::make_shared<const SpectralBasis>(decompose(g, LaplacianKind::SymmetricNormalized));
    task.filtered = design_kernel(*task.basis, FilterDesign{filter}) * task.signal;
    task.labels.resize(static_cast<std::size_t>(nodes));
    for (Index i = 0; i < nodes; ++i) task.labels[static_cast<std::size_t>(i)] = task.filtered(i) > 0.0 ? 1 : 0;
    task.graph = g.with_features(task.signal);

    std::vector<Index> order(static_cast<std::size_t>(nodes));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    const auto cut = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(nodes)));
    task.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
    task.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
    std::sort(task.train.begin(), task.train.end());
    std::sort(task.test.begin(), task.test.end());
    return task;
}

MultiGraphDataset make_degree_dataset(int graphs, Index min_nodes, Index max_nodes, double p_low, double p_high,
                                      std::uint64_t seed) {
    if (graphs < 2 || min_nodes < 2 || max_nodes < min_nodes) throw invalid_argument("invalid degree dataset shape");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> size(min_nodes, max_nodes);
    MultiGraphDataset ds;
    ds.name = "synthetic_degree";
    ds.num_classes = 2;
    ds.feature_width = 1;
    for (int i = 0; i < graphs; ++i) {
        const int label = i % 2;
        const Index n = size(rng);
        Graph g;
        for (int attempt = 0;; ++attempt) {
            if (attempt == 1000) throw numerical_error("could not draw a graph without isolated nodes");
            g = make_random_graph(n, label == 0 ? p_low : p_high, rng());
            if (!has_isolated(g)) break;
        }
        ds.graphs.push_back(g.with_features(Matrix::Ones(n, 1)));
        ds.labels.push_back(label);
    }
    return ds;
}

} // namespace specgconv
