#pragma once

#include "rds/chain.hpp"
#include "rds/conditionals.hpp"
#include "rds/dynamics.hpp"
#include "rds/trace.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace rds {

/// Augmented state of the geometric stick-breaking sampler. x0 and the
/// future states live in `path`.
struct GsbrState {
    std::vector<double> theta;
    ChainPath path;
    double p = 0.5;
    PrecisionTable lambdas;
    LatentAllocation alloc;
    double z_pred = 0.0;

    double x0() const { return path.x[0]; }
    int n_star() const;
    int d_star() const;
};

GsbrState init_state(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                     Rng& rng);

/// Single GSBR chain advanced one sweep at a time.
class GsbrSampler {
public:
    GsbrSampler(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                std::uint64_t seed);

    /// precisions, allocations, slices, x0, futures, theta, p, noise predictive.
    void step();

    const GsbrState& state() const { return state_; }
    const RejectionCounters& counters() const { return counters_; }

private:
    PriorSpec prior_;
    SamplerSettings settings_;
    Rng rng_;
    GsbrState state_;
    RejectionCounters counters_;
    std::vector<double> h_;
    std::vector<double> lambda_i_;
};

ChainTrace run_gsbr(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                    std::uint64_t seed);

/// Empirical quantiles (type 7) of the x_{n+j} draws.
std::vector<double> predict_quantiles(const ChainTrace& trace, std::size_t horizon, std::span<const double> probs);

}  // namespace rds
