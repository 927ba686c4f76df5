#pragma once

#include "rds/chain.hpp"
#include "rds/conditionals.hpp"
#include "rds/dynamics.hpp"
#include "rds/trace.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace rds {

/// Stick-breaking extension stops with NumericalError beyond this many components.
inline constexpr int kMaxSticks = 10'000;

struct StickBreaking {
    std::vector<double> z;
    std::vector<double> w;  ///< w_j = z_j prod_{s<j} (1 - z_s)
    double remainder = 1.0;  ///< prod_j (1 - z_j)

    int size() const { return static_cast<int>(z.size()); }
    void push(double z_next);
};

/// z_j ~ Be(1 + #{d_i = j}, c + #{d_i > j}) for j = 1..K.
StickBreaking sample_sticks(std::span<const int> d, double c, int K, Rng& rng);

/// u_i ~ U(0, w_{d_i}); then new sticks (Be(1, c)) and prior precisions are
/// appended until the leftover stick mass drops below min u_i.
void sample_slice_u(std::span<const int> d, StickBreaking& sticks, PrecisionTable& lambdas, double c,
                    const PriorSpec& prior, std::vector<double>& u, Rng& rng);

/// d_i over {j <= K : w_j > u_i} with weight sqrt(lambda_j) exp(-lambda_j h / 2).
int sample_allocation_dp(double h, const PrecisionTable& lambdas, const StickBreaking& sticks, double u_i, Rng& rng,
                         RejectionCounters* counters = nullptr);

/// Auxiliary-variable update of the DP mass under a Gamma(alpha, beta) prior.
double update_concentration(double c, int k_distinct, std::size_t n_T, double alpha, double beta, Rng& rng);

struct RdprState {
    std::vector<double> theta;
    ChainPath path;
    double c = 1.0;
    StickBreaking sticks;
    PrecisionTable lambdas;
    LatentAllocation alloc;
    double z_pred = 0.0;

    double x0() const { return path.x[0]; }
    int d_star() const;
    int k_distinct() const;
};

class RdprSampler {
public:
    RdprSampler(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                std::uint64_t seed);

    /// sticks, slices, allocations, precisions, x0, futures, theta, c, noise predictive.
    void step();

    const RdprState& state() const { return state_; }
    const RejectionCounters& counters() const { return counters_; }

private:
    PriorSpec prior_;
    SamplerSettings settings_;
    Rng rng_;
    RdprState state_;
    RejectionCounters counters_;
    std::vector<double> h_;
    std::vector<double> lambda_i_;
};

ChainTrace run_rdpr(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                    std::uint64_t seed);

}  // namespace rds
