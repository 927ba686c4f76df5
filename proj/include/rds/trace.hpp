#pragma once

#include "rds/conditionals.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rds {

enum class Algorithm { gsbr, rdpr, param };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

enum class InitStrategy {
    /// theta from least squares on the observed transitions, x0 at a preimage
    /// of x1, p = 0.5 (c = 1).
    least_squares,
    /// theta and x0 uniform over their prior boxes, p (or c) from its prior.
    prior,
};

enum class FutureUpdate {
    /// Exact block draw of x[n+1..n+T] by forward simulation given theta and
    /// the allocated precisions.
    forward,
    /// Single-site two-auxiliary slice updates; mixes slowly for long
    /// horizons on chaotic maps.
    slice,
};

struct SamplerSettings {
    std::size_t horizon = 0;  ///< T, the number of future states sampled jointly.
    std::size_t iterations = 100'000;  ///< Total sweeps, burn-in included.
    std::size_t burn = 10'000;
    std::size_t thin = 1;
    int degree = 5;
    InitStrategy init = InitStrategy::least_squares;
    FutureUpdate future_update = FutureUpdate::forward;

    void validate() const;
    bool operator==(const SamplerSettings&) const = default;
    /// Number of stored records: (iterations - burn) / thin.
    std::size_t record_count() const { return (iterations - burn) / thin; }
};

/// Post-burn, thinned records of one chain, stored column-wise.
///
/// `weight` holds p (gsbr), c (rdpr) or the single precision lambda (param);
/// `weight_name` says which.
struct ChainTrace {
    Algorithm algorithm = Algorithm::gsbr;
    std::string weight_name = "p";
    int degree = 5;
    std::size_t horizon = 0;
    std::size_t iterations = 0;
    std::size_t burn = 0;
    std::size_t thin = 1;
    std::uint64_t seed = 0;

    std::vector<std::size_t> iter;
    std::vector<double> theta;   ///< size() x (degree + 1), row-major
    std::vector<double> x0;
    std::vector<double> weight;
    std::vector<double> future;  ///< size() x horizon, row-major
    std::vector<double> z_pred;
    std::vector<int> n_star;
    std::vector<int> d_star;

    RejectionCounters rejections;
    double seconds = 0.0;

    std::size_t size() const { return iter.size(); }
    std::vector<double> theta_column(int j) const;
    /// Draws of x_{n+j}, j = 1..horizon.
    std::vector<double> future_column(std::size_t j) const;
    double seconds_per_1000() const;

    void reserve(std::size_t records);
};

/// Appends one record; used by all three drivers so the schema stays shared.
void append_record(ChainTrace& trace, std::size_t iteration, const std::vector<double>& theta, double x0,
                   double weight, const ChainPath& path, double z_pred, int n_star, int d_star);

}  // namespace rds
