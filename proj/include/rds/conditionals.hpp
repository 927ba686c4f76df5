#pragma once

#include "rds/polyalg.hpp"
#include "rds/rng.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rds {

enum class PPrior { transformed_gamma, beta_conjugate };

/// Hyperparameters shared by the three samplers.
///
/// alpha/beta: Gamma(alpha, beta) on the DP mass c, or the matching
/// transformed-gamma law of p = 1/(1 + c) (beta-conjugate variant: Be(alpha, beta)).
/// a/b: Gamma(a, b) base measure on component precisions.
/// M/M0: half-widths of the uniform boxes on theta and x0.
struct PriorSpec {
    double alpha = 0.3;
    double beta = 0.3;
    double a = 1e-3;
    double b = 1e-3;
    double M = 10.0;
    double M0 = 10.0;
    PPrior p_prior = PPrior::transformed_gamma;

    void validate() const;
    bool operator==(const PriorSpec&) const = default;

    /// Noninformative reconstruction/prediction preset.
    static PriorSpec noninformative();
    /// Informative preset: alpha=3, beta=0.3, a=1, b=1e-3.
    static PriorSpec informative();
};

/// Component precisions; component j (1-based) lives at values[j - 1].
struct PrecisionTable {
    std::vector<double> values;

    double operator()(int j) const { return values[static_cast<std::size_t>(j - 1)]; }
    double& operator()(int j) { return values[static_cast<std::size_t>(j - 1)]; }
    int size() const { return static_cast<int>(values.size()); }
};

/// Per-observation latent variables (1-based component labels).
struct LatentAllocation {
    std::vector<int> d;
    std::vector<int> N;
    std::vector<double> u;
};

/// Fallback bookkeeping for the embedded samplers. A "rejection" is a draw
/// that kept the current value because its support came out empty.
struct RejectionCounters {
    std::size_t theta_draws = 0;
    std::size_t theta_rejections = 0;
    std::size_t x0_draws = 0;
    std::size_t x0_rejections = 0;
    std::size_t future_draws = 0;
    std::size_t future_rejections = 0;
    std::size_t p_draws = 0;
    std::size_t p_rejections = 0;
    std::size_t allocation_fallbacks = 0;
    std::size_t interval_bound_warnings = 0;

    std::size_t draws() const { return theta_draws + x0_draws + future_draws + p_draws; }
    std::size_t rejections() const { return theta_rejections + x0_rejections + future_rejections + p_rejections; }
    double fallback_rate() const;
    /// More than 0.1% of embedded draws fell back.
    bool flagged() const { return fallback_rate() > 1e-3; }
};

/// x[0] = x0, x[1..n] observed, x[n+1..n+T] future states.
struct ChainPath {
    std::vector<double> x;
    std::size_t n = 0;
    std::size_t T = 0;

    std::size_t n_T() const { return n + T; }
};

/// (x_curr - g(x_prev))^2.
double h_residual(std::span<const double> theta, double x_curr, double x_prev);

/// h_i for i = 1..n_T, stored at index i - 1.
void path_residuals(std::span<const double> theta, const ChainPath& path, std::vector<double>& h);

/// t - (2 / lambda) log U: exponential of rate lambda/2 truncated to (t, inf).
double truncated_exponential(double lambda, double t, Rng& rng);

/// lambda_j ~ Gamma(a + n_j / 2, b + sum_{d_i = j} h_i / 2) for j = 1..n_star
/// (prior draws for empty components).
PrecisionTable update_precisions(std::span<const double> h, std::span<const int> d, int n_star,
                                 const PriorSpec& prior, Rng& rng);

/// d_i = j with probability proportional to sqrt(lambda_j) exp(-lambda_j h / 2), j <= N_i.
int sample_allocation_gsb(double h, const PrecisionTable& lambdas, int N_i, Rng& rng,
                          RejectionCounters* counters = nullptr);

/// N_i = d_i + G with G ~ Geometric(p) on {0, 1, ...}.
int sample_slice_N(int d_i, double p, Rng& rng);

/// One (theta', theta) sweep of the auxiliary-variable scheme for
/// N(mu, 1/tau) truncated to (lo, hi). Returns false (value kept) when the
/// uniform step has an empty support.
bool embedded_truncnormal_step(double& value, double mu, double tau, double lo, double hi, Rng& rng);

/// Ascending-j sweep over every coefficient. `lambda_i[i - 1]` is
/// lambda_{d_i}. A zero-information coordinate (tau_j = 0) is redrawn from
/// its uniform prior.
void sample_theta(std::vector<double>& theta, const ChainPath& path, std::span<const double> lambda_i,
                  const PriorSpec& prior, Rng& rng, RejectionCounters& counters);

/// Embedded slice update of x0 over {x : |g(x) - x1| < sqrt(x0')} within (-M0, M0).
double sample_x0(double x0, double x1, std::span<const double> theta, double lambda_d1, double M0, Rng& rng,
                 RejectionCounters& counters);

/// Updates x[n+1..n+T]: interior states by the two-auxiliary slice scheme,
/// the terminal state by its exact normal full conditional.
void sample_future(ChainPath& path, std::span<const double> theta, std::span<const double> lambda_i, Rng& rng,
                   RejectionCounters& counters);

/// Draws x[n+1..n+T] jointly from their full conditional, the forward chain
/// x_i ~ N(g(x_{i-1}), 1 / lambda_i). A draw leaving (-bound, bound) keeps the
/// current path and counts a rejection. Returns whether the path moved.
bool sample_future_forward(ChainPath& path, std::span<const double> theta, std::span<const double> lambda_i,
                           double bound, Rng& rng, RejectionCounters& counters);

/// Draw from density proportional to p^k on (lo, hi) by inverse CDF.
double sample_power_law(double k, double lo, double hi, Rng& rng);

/// Transformed-gamma-prior update of the geometric probability.
double sample_p(double p, long long sum_N, std::size_t n_T, const PriorSpec& prior, Rng& rng,
                RejectionCounters& counters);

/// Beta-conjugate update: Be(alpha + 2 n_T, beta + sum N_i - n_T).
double sample_p_beta(long long sum_N, std::size_t n_T, double alpha, double beta, Rng& rng);

/// p drawn from its prior (transformed gamma via p = 1/(1+c), or beta).
double sample_p_prior(const PriorSpec& prior, Rng& rng);

/// pi_j = p (1 - p)^(j - 1) for j = 1..count.
std::vector<double> geometric_weights(double p, int count);

/// z ~ N(0, 1/lambda) with lambda picked by the geometric weights over the
/// table, or drawn from Gamma(a, b) when the uniform lands beyond it.
double sample_noise_predictive(double p, const PrecisionTable& lambdas, const PriorSpec& prior, Rng& rng);

}  // namespace rds
