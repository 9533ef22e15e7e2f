#pragma once

#include "specgconv/filter_design.hpp"
#include "specgconv/graph.hpp"
#include "specgconv/kernels.hpp"
#include "specgconv/nn/train.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace specgconv {

/// `ring<N>`, `star<N>`, `random:<n>:<p>:<seed>`, or a single-graph dataset directory.
Graph resolve_graph(const std::string& spec);

/// Kernel request of the analyze command.
struct KernelRequest {
    enum class Kind { Gcn, Chebyshev, Cayley, Designs, GatSample, GatStats };
    Kind kind = Kind::Gcn;
    int count = 0;        ///< Chebyshev order K, Cayley r, or GAT trials
    double scale = 1.0;   ///< Cayley h
    std::uint64_t seed = 0;
    std::vector<FilterDesign> designs;
    std::string text;
};

/// `gcn`, `cheb:K`, `cayley:H:R`, `design:<expr>[;<expr>...]`, `gat:SEED`,
/// or `gat:SEED:TRIALS` (mean and spread over TRIALS sampled kernels).
KernelRequest parse_kernel_request(const std::string& text, const std::filesystem::path& base_dir = {});

/// Supports for `request` on a graph whose basis is already known.
KernelSet build_kernels(const Graph& g, std::shared_ptr<const SpectralBasis> basis, const Matrix& laplacian,
                        const KernelRequest& request);

struct AnalyzeOptions {
    std::string graph;
    std::string kernel;
    LaplacianKind laplacian = LaplacianKind::SymmetricNormalized;
    std::filesystem::path output_dir;
    bool absolute = false;
    std::optional<std::filesystem::path> cache_dir;
};

struct AnalyzeSummary {
    Index num_nodes = 0;
    double lambda_max = 0.0;
    double average_degree = 0.0;
    double gcn_cutoff = 0.0;
    std::optional<double> coverage;  ///< designs only
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

/// Decomposes, builds the kernels, writes per-kernel standard and full
/// profile CSVs plus `summary.json` and `provenance.json`.
AnalyzeSummary run_analyze(const AnalyzeOptions& options);

/// Result JSON of a training run (also written to `result.json`).
struct TrainOptions {
    std::string config_json;
    std::string overrides_json;  ///< merge-patch applied over the config; may be empty
    std::filesystem::path output_dir;  ///< overrides the config's output_dir when non-empty
    bool strict_repro = false;
    std::optional<std::filesystem::path> cache_dir;
    std::filesystem::path base_dir;  ///< resolves relative dataset and tabulated paths
};

std::string run_train(const TrainOptions& options);

/// Version string recorded in provenance files.
const char* version_string();

} // namespace specgconv
