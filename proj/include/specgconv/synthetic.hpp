#pragma once

#include "specgconv/datasets.hpp"
#include "specgconv/filter_design.hpp"
#include "specgconv/spectral_basis.hpp"

#include <cstdint>
#include <memory>

namespace specgconv {

/// Node task whose labels are the sign of a band-pass filtered random signal.
struct BandpassTask {
    Graph graph;  ///< features: the raw signal as one column
    std::shared_ptr<const SpectralBasis> basis;
    design::BandPass filter;
    Vector signal;
    Vector filtered;
    std::vector<int> labels;  ///< 1 where the filtered signal is positive
    std::vector<Index> train;
    std::vector<Index> test;
};

/// Erdos-Renyi graph without isolated nodes (redrawn until none), a unit
/// normal signal, and a random split putting `train_fraction` of the nodes in
/// train. Uses the normalized Laplacian.
BandpassTask make_bandpass_task(Index nodes, double edge_probability, design::BandPass filter,
                                double train_fraction, std::uint64_t seed);

/// Two classes of Erdos-Renyi graphs with different mean degree and a
/// constant node feature.
MultiGraphDataset make_degree_dataset(int graphs, Index min_nodes, Index max_nodes, double p_low, double p_high,
                                      std::uint64_t seed);

} // namespace specgconv
