#include "specgconv/datasets.hpp"

#include "specgconv/csv.hpp"
#include "specgconv/error.hpp"
#include "specgconv/log.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace specgconv {
namespace fs = std::filesystem;
namespace {

int require_column(const csv::Table& t, const std::string& name, const fs::path& path) {
    const int c = t.column(name);
    if (c < 0) throw io_error(path.string() + ": missing column '" + name + "'");
    return c;
}

Index node_index(const std::string& cell, Index n, const fs::path& path, std::size_t row) {
    const long long v = csv::parse_int(cell, path, row);
    if (v < 0 || v >= n) {
        throw io_error(path.string() + " row " + std::to_string(row) + ": node " + std::to_string(v) +
                       " out of range [0," + std::to_string(n) + ")");
    }
    return static_cast<Index>(v);
}

/// Whitespace/comma separated numeric rows of a TU text file.
std::vector<std::vector<double>> read_numeric_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::vector<double> row;
        std::string cell;
        while (fields >> cell) row.push_back(csv::parse_double(cell, path, number));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<long long> read_integer_column(const fs::path& path) {
    std::vector<long long> out;
    for (const auto& row : read_numeric_lines(path)) {
        if (row.size() != 1) throw io_error(path.string() + ": expected one value per line");
        out.push_back(static_cast<long long>(row[0]));
    }
    return out;
}

std::string tu_prefix(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw io_error("not a directory: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        const std::string suffix = "_A.txt";
        if (name.size() > suffix.size() && name.ends_with(suffix)) return name.substr(0, name.size() - suffix.size());
    }
    throw io_error("no <DS>_A.txt file in " + dir.string());
}

} // namespace

SingleGraphDataset load_single_graph(const fs::path& dir) {
    const fs::path features_path = dir / "features.csv";
    const fs::path edges_path = dir / "edges.csv";
    const fs::path labels_path = dir / "labels.csv";
    const fs::path split_path = dir / "split.csv";

    Matrix features = csv::read_matrix(features_path);
    const Index n = features.rows();
    if (n == 0) throw io_error(features_path.string() + ": no nodes");

    const csv::Table edges_table = csv::read_table(edges_path);
    const int src_col = require_column(edges_table, "source", edges_path);
    const int dst_col = require_column(edges_table, "target", edges_path);
    const int weight_col = edges_table.column("weight");
    std::vector<Edge> edges;
    edges.reserve(edges_table.rows.size());
    for (std::size_t r = 0; r < edges_table.rows.size(); ++r) {
        const auto& row = edges_table.rows[r];
        Edge e;
        e.source = node_index(row[static_cast<std::size_t>(src_col)], n, edges_path, r + 1);
        e.target = node_index(row[static_cast<std::size_t>(dst_col)], n, edges_path, r + 1);
        if (e.source == e.target) {
            throw io_error(edges_path.string() + " row " + std::to_string(r + 1) + ": self-loop on node " +
                           std::to_string(e.source));
        }
        if (weight_col >= 0) e.weight = csv::parse_double(row[static_cast<std::size_t>(weight_col)], edges_path, r + 1);
        edges.push_back(e);
    }

    SingleGraphDataset ds;
    ds.graph = Graph::from_edges(n, edges, std::move(features));
    ds.labels.assign(static_cast<std::size_t>(n), -1);

    const csv::Table labels_table = csv::read_table(labels_path);
    const int node_col = require_column(labels_table, "node", labels_path);
    const int label_col = require_column(labels_table, "label", labels_path);
    for (std::size_t r = 0; r < labels_table.rows.size(); ++r) {
        const auto& row = labels_table.rows[r];
        const Index node = node_index(row[static_cast<std::size_t>(node_col)], n, labels_path, r + 1);
        const long long label = csv::parse_int(row[static_cast<std::size_t>(label_col)], labels_path, r + 1);
        if (label < 0) throw io_error(labels_path.string() + " row " + std::to_string(r + 1) + ": negative label");
        ds.labels[static_cast<std::size_t>(node)] = static_cast<int>(label);
        ds.num_classes = std::max(ds.num_classes, static_cast<int>(label) + 1);
    }

    if (!fs::exists(split_path)) {
        warn(split_path.string() + " not found; every labeled node is used for training");
        for (Index i = 0; i < n; ++i)
            if (ds.labels[static_cast<std::size_t>(i)] >= 0) ds.train.push_back(i);
    } else {
        const csv::Table split = csv::read_table(split_path);
        const int split_node = require_column(split, "node", split_path);
        const int role_col = require_column(split, "role", split_path);
        std::vector<std::string> role_of(static_cast<std::size_t>(n));
        for (std::size_t r = 0; r < split.rows.size(); ++r) {
            const auto& row = split.rows[r];
            const Index node = node_index(row[static_cast<std::size_t>(split_node)], n, split_path, r + 1);
            std::string role = row[static_cast<std::size_t>(role_col)];
            if (role == "validation") role = "val";
            if (role != "train" && role != "val" && role != "test") {
                throw io_error(split_path.string() + " row " + std::to_string(r + 1) + ": unknown role '" + role + "'");
            }
            std::string& slot = role_of[static_cast<std::size_t>(node)];
            if (!slot.empty() && slot != role) {
                throw io_error(split_path.string() + ": node " + std::to_string(node) + " is in both '" + slot +
                               "' and '" + role + "'");
            }
            if (!slot.empty()) continue;
            slot = role;
            if (ds.labels[static_cast<std::size_t>(node)] < 0) {
                throw io_error(split_path.string() + ": node " + std::to_string(node) + " in '" + role +
                               "' has no label");
            }
            (role == "train" ? ds.train : role == "val" ? ds.val : ds.test).push_back(node);
        }
        for (auto* rows : {&ds.train, &ds.val, &ds.test}) std::sort(rows->begin(), rows->end());
    }
    return ds;
}

MultiGraphDataset load_tu_dataset(const fs::path& dir, bool use_attributes) {
    const std::string prefix = tu_prefix(dir);
    auto file = [&](const std::string& suffix) { return dir / (prefix + "_" + suffix + ".txt"); };

    const std::vector<long long> indicator = read_integer_column(file("graph_indicator"));
    const std::vector<long long> raw_labels = read_integer_column(file("graph_labels"));
    const auto total_nodes = static_cast<Index>(indicator.size());
    const auto num_graphs = static_cast<Index>(raw_labels.size());
    if (total_nodes == 0 || num_graphs == 0) throw io_error(dir.string() + ": empty TU dataset");

    // Graph ids are 1-based and nodes of a graph are contiguous.
    std::vector<Index> first(static_cast<std::size_t>(num_graphs), -1);
    std::vector<Index> count(static_cast<std::size_t>(num_graphs), 0);
    for (Index v = 0; v < total_nodes; ++v) {
        const long long gid = indicator[static_cast<std::size_t>(v)];
        if (gid < 1 || gid > num_graphs) {
            throw io_error(file("graph_indicator").string() + " line " + std::to_string(v + 1) + ": graph id " +
                           std::to_string(gid) + " outside [1," + std::to_string(num_graphs) + "]");
        }
        const auto g = static_cast<std::size_t>(gid - 1);
        if (first[g] < 0) first[g] = v;
        else if (first[g] + count[g] != v) {
            throw io_error(file("graph_indicator").string() + ": nodes of graph " + std::to_string(gid) +
                           " are not contiguous");
        }
        ++count[g];
    }
    for (Index g = 0; g < num_graphs; ++g) {
        if (count[static_cast<std::size_t>(g)] == 0) {
            throw io_error(file("graph_indicator").string() + ": graph " + std::to_string(g + 1) + " has no nodes");
        }
    }

    // Node features: one-hot labels, then optional attributes.
    Matrix node_features(total_nodes, 0);
    if (fs::exists(file("node_labels"))) {
        const std::vector<long long> node_labels = read_integer_column(file("node_labels"));
        if (static_cast<Index>(node_labels.size()) != total_nodes) {
            throw io_error(file("node_labels").string() + ": expected one label per node");
        }
        std::set<long long> distinct(node_labels.begin(), node_labels.end());
        std::map<long long, Index> column;
        for (long long v : distinct) column.emplace(v, static_cast<Index>(column.size()));
        node_features = Matrix::Zero(total_nodes, static_cast<Index>(column.size()));
        for (Index v = 0; v < total_nodes; ++v) node_features(v, column.at(node_labels[static_cast<std::size_t>(v)])) = 1.0;
    }
    if (use_attributes) {
        const fs::path attr_path = file("node_attributes");
        if (!fs::exists(attr_path)) throw io_error("attributes requested but " + attr_path.string() + " is missing");
        const auto rows = read_numeric_lines(attr_path);
        if (static_cast<Index>(rows.size()) != total_nodes) {
            throw io_error(attr_path.string() + ": expected one attribute row per node");
        }
        const auto width = static_cast<Index>(rows.front().size());
        Matrix attrs(total_nodes, width);
        for (Index v = 0; v < total_nodes; ++v) {
            const auto& row = rows[static_cast<std::size_t>(v)];
            if (static_cast<Index>(row.size()) != width) {
                throw io_error(attr_path.string() + " line " + std::to_string(v + 1) + ": inconsistent width");
            }
            for (Index j = 0; j < width; ++j) attrs(v, j) = row[static_cast<std::size_t>(j)];
        }
        Matrix joined(total_nodes, node_features.cols() + width);
        joined << node_features, attrs;
        node_features = std::move(joined);
    }
    if (node_features.cols() == 0) node_features = Matrix::Ones(total_nodes, 1);

    // Edges, 1-based global node ids.
    std::vector<std::vector<Edge>> edges(static_cast<std::size_t>(num_graphs));
    std::size_t self_loops = 0;
    const fs::path edge_path = file("A");
    const auto edge_rows = read_numeric_lines(edge_path);
    for (std::size_t r = 0; r < edge_rows.size(); ++r) {
        const auto& row = edge_rows[r];
        if (row.size() != 2) throw io_error(edge_path.string() + " line " + std::to_string(r + 1) + ": expected a pair");
        const auto a = static_cast<Index>(row[0]) - 1;
        const auto b = static_cast<Index>(row[1]) - 1;
        if (a < 0 || b < 0 || a >= total_nodes || b >= total_nodes) {
            throw io_error(edge_path.string() + " line " + std::to_string(r + 1) + ": node id out of range");
        }
        const long long ga = indicator[static_cast<std::size_t>(a)];
        if (ga != indicator[static_cast<std::size_t>(b)]) {
            throw io_error(edge_path.string() + " line " + std::to_string(r + 1) + ": edge joins graphs " +
                           std::to_string(ga) + " and " + std::to_string(indicator[static_cast<std::size_t>(b)]));
        }
        if (a == b) {
            ++self_loops;
            continue;
        }
        const auto g = static_cast<std::size_t>(ga - 1);
        edges[g].push_back({a - first[g], b - first[g], 1.0});
    }
    if (self_loops > 0) warn(edge_path.string() + ": dropped " + std::to_string(self_loops) + " self-loop rows");

    std::set<long long> distinct_labels(raw_labels.begin(), raw_labels.end());
    std::map<long long, int> remap;
    for (long long v : distinct_labels) remap.emplace(v, static_cast<int>(remap.size()));

    MultiGraphDataset ds;
    ds.name = prefix;
    ds.num_classes = static_cast<int>(remap.size());
    ds.feature_width = node_features.cols();
    ds.graphs.reserve(static_cast<std::size_t>(num_graphs));
    for (Index g = 0; g < num_graphs; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        ds.graphs.push_back(Graph::from_edges(count[gi], edges[gi], node_features.middleRows(first[gi], count[gi])));
        ds.labels.push_back(remap.at(raw_labels[gi]));
    }
    return ds;
}

std::vector<int> make_folds(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw config_error("cross-validation needs at least 2 folds");
    if (static_cast<std::size_t>(k) > labels.size()) {
        throw config_error("cannot make " + std::to_string(k) + " folds from " + std::to_string(labels.size()) +
                           " items");
    }
    std::mt19937_64 rng(seed);
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    bool stratify = true;
    for (const auto& [label, members] : by_class) {
        if (members.size() < static_cast<std::size_t>(k)) {
            warn("class " + std::to_string(label) + " has " + std::to_string(members.size()) + " members, fewer than " +
                 std::to_string(k) + " folds; using unstratified folds");
            stratify = false;
            break;
        }
    }

    std::vector<int> fold(labels.size(), 0);
    std::size_t position = 0;
    auto deal = [&](std::vector<std::size_t> items) {
        std::shuffle(items.begin(), items.end(), rng);
        for (std::size_t i : items) fold[i] = static_cast<int>(position++ % static_cast<std::size_t>(k));
    };
    if (stratify) {
        for (auto& [label, members] : by_class) deal(members);
    } else {
        std::vector<std::size_t> all(labels.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        deal(std::move(all));
    }
    return fold;
}

} // namespace specgconv
