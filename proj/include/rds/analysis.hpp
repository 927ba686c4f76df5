#pragma once

#include "rds/dynamics.hpp"
#include "rds/polynomial.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rds {

/// Blocked sampling-mean and MAP-histogram settings.
struct EstimatorConfig {
    std::size_t K = 47;
    std::size_t N = 10'000;
    std::size_t s = 500;
    std::size_t bins = 300;
    double lo = -2.0;
    double hi = 2.0;
    std::optional<double> kde_bandwidth;  ///< Silverman's rule when empty.

    void validate() const;
    bool operator==(const EstimatorConfig&) const = default;
    /// K(N + s).
    std::size_t required_length() const { return K * (N + s); }
};

/// K^-1 sum_r N^-1 sum_{i=M_r+1}^{M_r+N} x_i with M_r = (r - 1)(N + s).
double sm_estimate(std::span<const double> column, const EstimatorConfig& config);

/// Midpoint of the modal bin of a `bins`-bin histogram on [lo, hi]. Ties go to
/// the bin nearest the sample median.
double map_estimate(std::span<const double> samples, std::size_t bins, double lo, double hi);

/// 100 |estimate - truth| / |truth|; throws ValidationError for truth = 0.
double pare(double truth, double estimate);

struct PareValue {
    double value;
    bool zero_truth;  ///< value is 100 |estimate| (absolute error), not a relative one
};

/// pare(), or 100 |estimate| with the zero-truth mark.
PareValue pare_or_absolute(double truth, double estimate);

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

/// 0.9 min(sd, IQR / 1.34) n^(-1/5); 0 for a constant sample.
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian-kernel density on an evenly spaced grid, rescaled to unit mass on
/// that grid. A constant sample (or bandwidth below 1e-6) puts all the mass
/// on the grid point nearest the sample.
EmpiricalDensity kde(std::span<const double> samples, std::span<const double> grid,
                     std::optional<double> bandwidth = std::nullopt);

/// Running means: out[i] = mean(column[0..i]).
std::vector<double> ergodic_average(std::span<const double> column);

/// Approximate entropy Phi_m - Phi_{m+1} with the max norm, self-matches
/// included. r < 0 selects 0.2 sd.
double apen(std::span<const double> series, int m = 2, double r = -1.0);

/// 1 - H(f) / log(n_freq) for the Hann-windowed WOSA spectrum f over the
/// positive frequencies (zero excluded). segment_len = 0 selects n/4 rounded
/// to even.
double omega(std::span<const double> series, std::size_t segment_len = 0, double overlap = 0.5);

/// Sum |d1 - d2| dx on the finer of the two grids over their joint range,
/// both densities linearly interpolated. Disjoint supports give 2.
double l1_distance(const EmpiricalDensity& d1, const EmpiricalDensity& d2);

/// Density built from a callable on a grid (unnormalized).
template <class F>
EmpiricalDensity tabulate_density(std::span<const double> grid, F f) {
    EmpiricalDensity d;
    d.grid.assign(grid.begin(), grid.end());
    d.mass.reserve(grid.size());
    for (double x : grid) d.mass.push_back(f(x));
    d.bin_width = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
    return d;
}

/// Real solutions of g(x) = g(x_ref), ascending: the x0 posterior modes.
std::vector<double> preimages(const PolynomialMap& map, double x_ref);

struct PreimageLabel {
    std::string label;  ///< "x_L", "x_M", "x_R" for three preimages, else "x_1".."x_k"
    double location;
    double distance;
};

/// Nearest preimage of g(x_ref) to `estimate`.
PreimageLabel label_preimage(const PolynomialMap& map, double x_ref, double estimate);

}  // namespace rds
