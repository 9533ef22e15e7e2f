#pragma once

#include "specgconv/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace specgconv {

/// One partially labeled graph with train/val/test node sets.
struct SingleGraphDataset {
    Graph graph;
    std::vector<int> labels;  ///< class per node, -1 when unlabeled
    int num_classes = 0;
    std::vector<Index> train;
    std::vector<Index> val;
    std::vector<Index> test;
};

/// Reads `edges.csv` (source,target[,weight]), `features.csv`, `labels.csv`
/// (node,label) and `split.csv` (node,role with role train|val|test).
/// A missing split file puts every labeled node in train and warns.
SingleGraphDataset load_single_graph(const std::filesystem::path& dir);

/// Graphs with one class label each. Node features share one width.
struct MultiGraphDataset {
    std::string name;
    std::vector<Graph> graphs;
    std::vector<int> labels;  ///< remapped to 0..num_classes-1
    int num_classes = 0;
    Index feature_width = 0;
};

/// Reads the TU text layout (`<DS>_A.txt`, `<DS>_graph_indicator.txt`,
/// `<DS>_graph_labels.txt`, optional `<DS>_node_labels.txt` and
/// `<DS>_node_attributes.txt`). Node labels become one-hot features;
/// attributes are appended when `use_attributes` is set. Graphs with neither
/// get a constant feature. Self-loop rows are dropped with a warning.
MultiGraphDataset load_tu_dataset(const std::filesystem::path& dir, bool use_attributes);

/// Fold index per item: seeded shuffle, stratified by label, sizes within one.
/// Falls back to an unstratified split (with a warning) if a class has fewer
/// than k members.
std::vector<int> make_folds(std::span<const int> labels, int k, std::uint64_t seed);

} // namespace specgconv
