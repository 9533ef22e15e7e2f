#pragma once

#include "specgconv/graph.hpp"
#include "specgconv/kernels.hpp"
#include "specgconv/spectral_basis.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace specgconv {

/// Spectral response of a support: the full form U^T C U and its diagonal.
struct FrequencyProfile {
    Vector lambda;
    Vector standard;
    Matrix full;
    std::string kernel_tag;
};

FrequencyProfile profile(const Matrix& support, const SpectralBasis& basis, std::string kernel_tag = {});

struct ProfileDeviation {
    double max_abs = 0.0;
    double rms = 0.0;
};

ProfileDeviation profile_deviation(const Vector& standard, const Vector& oracle);
inline ProfileDeviation profile_deviation(const FrequencyProfile& p, const Vector& oracle) {
    return profile_deviation(p.standard, oracle);
}

/// Elementwise mean and population standard deviation of sampled GAT
/// kernel profiles. Trial t draws its kernel with seed `seed + t`.
struct GatProfileStats {
    Vector lambda;
    Vector mean_standard;
    Vector std_standard;
    Matrix mean_full;
    Matrix std_full;
    int trials = 0;
};

GatProfileStats gat_profile_stats(const Graph& g, const SpectralBasis& basis, int trials, std::uint64_t seed,
                                  const GatSampleOptions& options = {});

struct ExportOptions {
    bool absolute = false;  ///< write |standard| and |full| (plotting convenience)
};

/// Writes `lambda,standard`; the full matrix goes to `full_path` when given.
void export_profile(const FrequencyProfile& p, const std::filesystem::path& standard_path,
                    const std::optional<std::filesystem::path>& full_path = std::nullopt,
                    const ExportOptions& options = {});

/// Reads back the `lambda,standard` file written by export_profile.
FrequencyProfile import_profile(const std::filesystem::path& standard_path,
                                const std::optional<std::filesystem::path>& full_path = std::nullopt);

} // namespace specgconv
