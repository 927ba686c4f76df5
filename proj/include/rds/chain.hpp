#pragma once

#include "rds/conditionals.hpp"
#include "rds/dynamics.hpp"
#include "rds/trace.hpp"

#include <cstdint>
#include <future>
#include <span>
#include <vector>

namespace rds {

/// Path with x0 = 0, the observations, and T zero-filled future slots.
ChainPath make_path(const TimeSeriesDataset& data, std::size_t horizon);

struct ChainStart {
    std::vector<double> theta;
    ChainPath path;
};

/// Starting theta, x0 and future states. Futures follow the noiseless map
/// from x_n and fall back to x_n once the iteration leaves the x0 box.
ChainStart initial_chain(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                         Rng& rng);

/// Ordinary least squares fit of a degree-`degree` map to the observed transitions,
/// clipped to the theta box.
std::vector<double> least_squares_theta(std::span<const double> observations, int degree, double M);

/// lambda_i[i - 1] = lambdas(d[i - 1]).
void per_observation_precisions(const PrecisionTable& lambdas, std::span<const int> d, std::vector<double>& lambda_i);

/// x0, then the future states, then theta.
void update_dynamics(std::vector<double>& theta, ChainPath& path, std::span<const double> lambda_i,
                     const PriorSpec& prior, FutureUpdate future, Rng& rng, RejectionCounters& counters);

/// Runs one chain per seed on worker threads; results keep the seed order.
template <class RunChain>
std::vector<ChainTrace> run_chains(const std::vector<std::uint64_t>& seeds, RunChain run_chain) {
    std::vector<std::future<ChainTrace>> jobs;
    jobs.reserve(seeds.size());
    for (std::uint64_t s : seeds) jobs.push_back(std::async(std::launch::async, run_chain, s));
    std::vector<ChainTrace> out;
    out.reserve(seeds.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

}  // namespace rds
