#include "rds/gsbr.hpp"

#include "rds/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace rds {

int GsbrState::n_star() const { return alloc.N.empty() ? 1 : *std::max_element(alloc.N.begin(), alloc.N.end()); }

int GsbrState::d_star() const { return alloc.d.empty() ? 1 : *std::max_element(alloc.d.begin(), alloc.d.end()); }

GsbrState init_state(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                     Rng& rng) {
    prior.validate();
    settings.validate();
    ChainStart start = initial_chain(data, prior, settings, rng);
    GsbrState s;
    s.theta = std::move(start.theta);
    s.path = std::move(start.path);
    // A prior draw under the noninformative spec lands near p = 1, where all
    // N_i = 1 and the single-component state is close to absorbing.
    s.p = settings.init == InitStrategy::prior ? sample_p_prior(prior, rng) : 0.5;
    const std::size_t nT = s.path.n_T();
    s.alloc.d.assign(nT, 1);
    s.alloc.N.assign(nT, 1);
    s.lambdas.values = {rng.gamma(prior.a, prior.b)};
    return s;
}

GsbrSampler::GsbrSampler(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                         std::uint64_t seed)
    : prior_(prior), settings_(settings), rng_(seed), state_(init_state(data, prior, settings, rng_)) {}

void GsbrSampler::step() {
    auto& s = state_;
    auto& d = s.alloc.d;
    auto& N = s.alloc.N;
    const std::size_t nT = s.path.n_T();

    path_residuals(s.theta, s.path, h_);
    s.lambdas = update_precisions(h_, d, s.n_star(), prior_, rng_);

    for (std::size_t i = 0; i < nT; ++i) d[i] = sample_allocation_gsb(h_[i], s.lambdas, N[i], rng_, &counters_);

    long long sum_N = 0;
    for (std::size_t i = 0; i < nT; ++i) {
        N[i] = sample_slice_N(d[i], s.p, rng_);
        sum_N += N[i];
    }
    // Components beyond the old table carry no data: prior draws.
    const int n_star = s.n_star();
    while (s.lambdas.size() < n_star) s.lambdas.values.push_back(rng_.gamma(prior_.a, prior_.b));

    per_observation_precisions(s.lambdas, d, lambda_i_);
    update_dynamics(s.theta, s.path, lambda_i_, prior_, settings_.future_update, rng_, counters_);

    if (prior_.p_prior == PPrior::beta_conjugate) {
        s.p = sample_p_beta(sum_N, nT, prior_.alpha, prior_.beta, rng_);
    } else {
        s.p = sample_p(s.p, sum_N, nT, prior_, rng_, counters_);
    }
    s.z_pred = sample_noise_predictive(s.p, s.lambdas, prior_, rng_);
}

ChainTrace run_gsbr(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                    std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    GsbrSampler sampler(data, prior, settings, seed);
    ChainTrace trace;
    trace.algorithm = Algorithm::gsbr;
    trace.weight_name = "p";
    trace.degree = settings.degree;
    trace.horizon = settings.horizon;
    trace.iterations = settings.iterations;
    trace.burn = settings.burn;
    trace.thin = settings.thin;
    trace.seed = seed;
    trace.reserve(settings.record_count());
    for (std::size_t it = 1; it <= settings.iterations; ++it) {
        sampler.step();
        if (it > settings.burn && (it - settings.burn) % settings.thin == 0) {
            const GsbrState& s = sampler.state();
            append_record(trace, it, s.theta, s.x0(), s.p, s.path, s.z_pred, s.n_star(), s.d_star());
        }
    }
    trace.rejections = sampler.counters();
    trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

std::vector<double> predict_quantiles(const ChainTrace& trace, std::size_t horizon, std::span<const double> probs) {
    if (trace.size() == 0) throw ValidationError("predict_quantiles needs a nonempty trace");
    std::vector<double> xs = trace.future_column(horizon);
    std::sort(xs.begin(), xs.end());
    std::vector<double> out;
    out.reserve(probs.size());
    const double last = static_cast<double>(xs.size() - 1);
    for (double q : probs) {
        if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile probabilities must lie in [0, 1]");
        const double pos = q * last;
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, xs.size() - 1);
        const double t = pos - static_cast<double>(lo);
        out.push_back((1.0 - t) * xs[lo] + t * xs[hi]);
    }
    return out;
}

}  // namespace rds
