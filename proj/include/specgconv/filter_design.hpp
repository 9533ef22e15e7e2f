#pragma once

#include "specgconv/linalg.hpp"
#include "specgconv/spectral_basis.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace specgconv {

namespace design {

/// (1 - lambda/lambda_max)^eta
struct LowPass { double eta = 1.0; };
/// lambda/lambda_max
struct HighPass {};
/// exp(-gamma (center*lambda_max - lambda)^2), center a fraction of lambda_max.
struct BandPass { double center = 0.5; double gamma = 1.0; };
struct AllPass {};
/// exp(-lambda/tau)
struct ExpLowPass { double tau = 1.0; };
/// 1 - lambda/lambda_max
struct OneMinusRatio {};
/// k-th Chebyshev profile, k >= 1 (k = 1 is the all-pass kernel).
struct ChebBasis { int k = 1; };
/// Column `s` (1-based) of the CayleyNet B-matrix of order r and scale h.
struct CayleyBasis { int s = 1; double h = 1.0; int r = 1; };
/// Values aligned to ascending eigenvalues of one specific basis.
struct Tabulated { Vector values; std::string source; };

} // namespace design

using FilterDesign = std::variant<design::LowPass, design::HighPass, design::BandPass, design::AllPass,
                                  design::ExpLowPass, design::OneMinusRatio, design::ChebBasis, design::CayleyBasis,
                                  design::Tabulated>;

/// Throws InvalidArgument when a parameter is out of range.
void validate(const FilterDesign& design);

/// Response of `design` at each entry of `lambda`.
Vector evaluate(const FilterDesign& design, const Vector& lambda, double lambda_max);
inline Vector evaluate(const FilterDesign& design, const SpectralBasis& basis) {
    return evaluate(design, basis.eigenvalues, basis.lambda_max());
}

/// Canonical text form, e.g. `lowpass(eta=5)` or `bandpass(c=0.5,gamma=0.25)`.
std::string to_string(const FilterDesign& design);

/// Inverse of to_string. `tabulated(file=...)` reads a one-column CSV relative
/// to `base_dir`.
FilterDesign parse_design(std::string_view text, const std::filesystem::path& base_dir = {});

/// theta(x) = atan2(-1, x) - atan2(1, x); lies in (-2pi, 0).
double cayley_theta(double x);

/// n x (2r+1) matrix: ones, then alternating cos(k theta(h lambda)) and
/// -sin(k theta(h lambda)) for k = 1..r.
Matrix cayley_bmatrix(const Vector& lambda, double h, int r);

/// Column s of B is design s evaluated on the basis.
Matrix bmatrix(std::span<const FilterDesign> designs, const SpectralBasis& basis);

/// 1 - lambda * d / (d + 1)
Vector gcn_theoretical_profile(double average_degree, const Vector& lambda);
/// (d + 1) / d
double gcn_cutoff(double average_degree);

/// Minimum over a 256-point grid on [0, lambda_max] of the summed responses.
/// Tabulated designs are linearly interpolated against the basis eigenvalues.
double coverage(std::span<const FilterDesign> designs, const SpectralBasis& basis);

inline constexpr double kCoverageWarningLevel = 0.01;

} // namespace specgconv
