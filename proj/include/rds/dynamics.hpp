#pragma once

#include "rds/noise.hpp"
#include "rds/polynomial.hpp"
#include "rds/rng.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rds {

inline constexpr double kEscapeGuard = 1e6;

/// Observed series x_1..x_n, plus generation metadata when synthetic.
///
/// `holdout` carries the true continuation x_{n+1}.. of a synthetic series,
/// used to score out-of-sample predictions; it is never shown to a sampler.
struct TimeSeriesDataset {
    std::vector<double> observations;
    std::vector<double> holdout;
    std::optional<double> x0_true;
    std::optional<PolynomialMap> map_true;
    std::optional<GaussianMixtureNoise> noise_true;
    std::uint64_t seed = 0;

    std::size_t n() const { return observations.size(); }
    bool synthetic() const { return map_true.has_value(); }
};

/// Histogram-style density on a uniform grid of bin centers.
struct EmpiricalDensity {
    std::vector<double> grid;
    std::vector<double> mass;
    double bin_width = 0.0;

    double integral() const;
    /// Value at x by linear interpolation between grid points, 0 outside.
    double at(double x) const;
};

/// x_i = g(x_{i-1}) + z_i for i = 1..n + holdout, z_i iid from `noise`.
/// Throws OrbitEscaped when |x_i| exceeds `guard`.
TimeSeriesDataset generate_series(const PolynomialMap& map, const GaussianMixtureNoise& noise, double x0,
                                  std::size_t n, std::uint64_t seed, std::size_t holdout = 0,
                                  double guard = kEscapeGuard);

/// y_1..y_n of the noiseless map started at x0.
std::vector<double> deterministic_orbit(const PolynomialMap& map, double x0, std::size_t n,
                                        double guard = kEscapeGuard);

struct LiapunovEstimate {
    double exponent;
    std::size_t zero_derivative_skips;
};

/// Mean of log|g'(x_i)| over iterates burn+1..n of the deterministic orbit.
LiapunovEstimate liapunov_exponent(const PolynomialMap& map, double x0, std::size_t n, std::size_t burn);

struct InvariantInterval {
    double lo;
    double hi;
};

/// [min, max] of the real roots of g(g(x)) = x.
InvariantInterval invariant_interval(const PolynomialMap& map);

struct FactCheck {
    std::string description;
    bool pass = true;
    double worst_violation = 0.0;
};

struct InvarianceReport {
    InvariantInterval interval;
    std::array<FactCheck, 5> facts;
    bool all_pass() const;
};

/// Grid check of the five trapping-region facts on [lo - 2, hi + 2]:
///   1. g(lo) = hi and g(hi) = lo
///   2. x in [lo, hi]  <=>  g(x) in [lo, hi]
///   3. g(x) > x and g(g(x)) < x left of lo
///   4. g(x) < x and g(g(x)) > x right of hi
///   5. g decreasing and g(g(.)) increasing on each exterior piece
InvarianceReport verify_invariance_facts(const PolynomialMap& map, double grid_step);

struct QuasiInvariantOptions {
    std::size_t n_long = 1'000'000;
    std::size_t burn = 1'000;
    std::size_t bins = 300;
    /// Histogram range; defaults to the invariant interval padded by 5%.
    std::optional<InvariantInterval> range;
    double guard = kEscapeGuard;
};

struct QuasiInvariantResult {
    EmpiricalDensity density;
    std::size_t segments = 0;
    std::size_t escapes = 0;
    std::size_t kept = 0;
};

/// Histogram of one long noisy orbit conditioned on non-escape.
///
/// When the orbit passes the guard the chain restarts from x0 on the same
/// (advancing) noise stream, and the samples taken since it last left the
/// invariant interval are discarded. Throws NumericalError when more than
/// half of the segments escape.
QuasiInvariantResult quasi_invariant_density(const PolynomialMap& map, const GaussianMixtureNoise& noise,
                                             double x0, std::uint64_t seed,
                                             const QuasiInvariantOptions& options = {});

}  // namespace rds
