#pragma once

#include "specgconv/filter_design.hpp"
#include "specgconv/graph.hpp"
#include "specgconv/spectral_basis.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace specgconv {

namespace provenance {
struct Designed { FilterDesign design; };
struct Chebyshev { int k = 1; };
struct Gcn {};
struct GatSample { std::uint64_t seed = 0; int head = 0; };
} // namespace provenance

using KernelProvenance =
    std::variant<provenance::Designed, provenance::Chebyshev, provenance::Gcn, provenance::GatSample>;

std::string to_string(const KernelProvenance& p);

/// Ordered convolution supports C^(1..S) of one graph.
struct KernelSet {
    std::vector<Matrix> supports;
    std::vector<KernelProvenance> provenance;
    std::shared_ptr<const SpectralBasis> basis;

    std::size_t size() const noexcept { return supports.size(); }
    Index num_nodes() const { return supports.empty() ? 0 : supports.front().rows(); }

    /// Throws unless S >= 1, all supports are n x n, and provenance matches.
    void validate() const;
};

/// U diag(response) U^T, symmetrized.
Matrix design_kernel(const SpectralBasis& basis, const Vector& response);
inline Matrix design_kernel(const SpectralBasis& basis, const FilterDesign& design) {
    return design_kernel(basis, evaluate(design, basis));
}

KernelSet designed_kernels(std::shared_ptr<const SpectralBasis> basis, std::span<const FilterDesign> designs);

/// C1 = I, C2 = 2L/lambda_max - I, Ck = 2 C2 C(k-1) - C(k-2).
KernelSet cheb_kernels(const Matrix& laplacian, double lambda_max, int count);

/// D~^{-1/2} (A + I) D~^{-1/2}
Matrix gcn_kernel(const Graph& g);

struct GatSampleOptions {
    int hidden = 8;             ///< columns of the random projection W
    double weight_scale = 1.0;  ///< std-dev of the normal draws for W and a
    double negative_slope = 0.2;
};

/// Attention kernels from randomly drawn (W, a), one per head. Softmax runs
/// over the closed neighborhood N(i) + {i}; rows sum to one.
std::vector<Matrix> gat_sample_kernels(const Graph& g, int heads, std::uint64_t seed,
                                       const GatSampleOptions& options = {});

} // namespace specgconv
