#include "rds/rdpr.hpp"

#include "rds/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace rds {

void StickBreaking::push(double z_next) {
    z.push_back(z_next);
    w.push_back(z_next * remainder);
    remainder *= 1.0 - z_next;
}

StickBreaking sample_sticks(std::span<const int> d, double c, int K, Rng& rng) {
    std::vector<double> count(static_cast<std::size_t>(K) + 1, 0.0);
    for (int j : d) {
        if (j > K) throw ValidationError("sample_sticks needs K >= max(d)");
        count[static_cast<std::size_t>(j)] += 1.0;
    }
    double above = static_cast<double>(d.size());
    StickBreaking s;
    s.z.reserve(static_cast<std::size_t>(K));
    s.w.reserve(static_cast<std::size_t>(K));
    for (int j = 1; j <= K; ++j) {
        above -= count[static_cast<std::size_t>(j)];
        s.push(rng.beta(1.0 + count[static_cast<std::size_t>(j)], c + above));
    }
    return s;
}

void sample_slice_u(std::span<const int> d, StickBreaking& sticks, PrecisionTable& lambdas, double c,
                    const PriorSpec& prior, std::vector<double>& u, Rng& rng) {
    u.resize(d.size());
    double u_min = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        u[i] = rng.uniform() * sticks.w[static_cast<std::size_t>(d[i] - 1)];
        u_min = std::min(u_min, u[i]);
    }
    while (sticks.remainder >= u_min) {
        if (sticks.size() >= kMaxSticks) throw NumericalError("stick-breaking extension exceeded 10000 components");
        sticks.push(rng.beta(1.0, c));
    }
    while (lambdas.size() < sticks.size()) lambdas.values.push_back(rng.gamma(prior.a, prior.b));
}

int sample_allocation_dp(double h, const PrecisionTable& lambdas, const StickBreaking& sticks, double u_i, Rng& rng,
                         RejectionCounters* counters) {
    thread_local std::vector<double> logw;
    thread_local std::vector<int> label;
    logw.clear();
    label.clear();
    double top = -std::numeric_limits<double>::infinity();
    int arg = 1;
    for (int j = 1; j <= sticks.size(); ++j) {
        if (!(sticks.w[static_cast<std::size_t>(j - 1)] > u_i)) continue;
        const double lam = lambdas(j);
        const double lw = 0.5 * std::log(lam) - 0.5 * lam * h;
        logw.push_back(lw);
        label.push_back(j);
        if (lw > top) {
            top = lw;
            arg = j;
        }
    }
    if (label.empty()) throw NumericalError("empty slice set");
    if (label.size() == 1) return label[0];
    double total = 0.0;
    for (double& w : logw) {
        w = std::exp(w - top);
        total += w;
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        if (counters) ++counters->allocation_fallbacks;
        return arg;
    }
    double r = rng.uniform() * total;
    for (std::size_t k = 0; k < label.size(); ++k) {
        r -= logw[k];
        if (r <= 0.0) return label[k];
    }
    return label.back();
}

double update_concentration(double c, int k_distinct, std::size_t n_T, double alpha, double beta, Rng& rng) {
    if (n_T == 0) return rng.gamma(alpha, beta);
    if (k_distinct < 1) throw ValidationError("update_concentration needs k_distinct >= 1");
    const double n = static_cast<double>(n_T);
    const double k = static_cast<double>(k_distinct);
    const double eta = rng.beta(c + 1.0, n);
    const double rate = beta - std::log(eta);
    const double odds = (alpha + k - 1.0) / (n * rate);
    const double shape = rng.uniform() < odds / (1.0 + odds) ? alpha + k : alpha + k - 1.0;
    return rng.gamma(shape, rate);
}

int RdprState::d_star() const { return alloc.d.empty() ? 1 : *std::max_element(alloc.d.begin(), alloc.d.end()); }

int RdprState::k_distinct() const {
    std::vector<char> seen(static_cast<std::size_t>(d_star()) + 1, 0);
    int k = 0;
    for (int j : alloc.d)
        if (!seen[static_cast<std::size_t>(j)]) seen[static_cast<std::size_t>(j)] = 1, ++k;
    return k;
}

RdprSampler::RdprSampler(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                         std::uint64_t seed)
    : prior_(prior), settings_(settings), rng_(seed) {
    prior_.validate();
    settings_.validate();
    ChainStart start = initial_chain(data, prior_, settings_, rng_);
    state_.theta = std::move(start.theta);
    state_.path = std::move(start.path);
    // c = 1 matches p = 1/(1+c) = 0.5 of the GSBR start.
    state_.c = settings_.init == InitStrategy::prior ? rng_.gamma(prior_.alpha, prior_.beta) : 1.0;
    state_.alloc.d.assign(state_.path.n_T(), 1);
    state_.lambdas.values = {rng_.gamma(prior_.a, prior_.b)};
}

void RdprSampler::step() {
    auto& s = state_;
    auto& d = s.alloc.d;
    const std::size_t nT = s.path.n_T();

    const int d_star = s.d_star();
    s.sticks = sample_sticks(d, s.c, d_star, rng_);
    s.lambdas.values.resize(static_cast<std::size_t>(std::min(s.lambdas.size(), d_star)));
    while (s.lambdas.size() < d_star) s.lambdas.values.push_back(rng_.gamma(prior_.a, prior_.b));
    sample_slice_u(d, s.sticks, s.lambdas, s.c, prior_, s.alloc.u, rng_);

    path_residuals(s.theta, s.path, h_);
    for (std::size_t i = 0; i < nT; ++i)
        d[i] = sample_allocation_dp(h_[i], s.lambdas, s.sticks, s.alloc.u[i], rng_, &counters_);

    s.lambdas = update_precisions(h_, d, s.sticks.size(), prior_, rng_);
    per_observation_precisions(s.lambdas, d, lambda_i_);
    update_dynamics(s.theta, s.path, lambda_i_, prior_, settings_.future_update, rng_, counters_);

    s.c = update_concentration(s.c, s.k_distinct(), nT, prior_.alpha, prior_.beta, rng_);

    const double rho = rng_.uniform();
    double cum = 0.0;
    double lam = -1.0;
    for (int j = 1; j <= s.sticks.size(); ++j) {
        cum += s.sticks.w[static_cast<std::size_t>(j - 1)];
        if (rho <= cum) {
            lam = s.lambdas(j);
            break;
        }
    }
    if (lam < 0.0) lam = rng_.gamma(prior_.a, prior_.b);
    s.z_pred = rng_.normal(0.0, 1.0 / std::sqrt(lam));
}

ChainTrace run_rdpr(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                    std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    RdprSampler sampler(data, prior, settings, seed);
    ChainTrace trace;
    trace.algorithm = Algorithm::rdpr;
    trace.weight_name = "c";
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
            const RdprState& s = sampler.state();
            append_record(trace, it, s.theta, s.x0(), s.c, s.path, s.z_pred, s.sticks.size(), s.d_star());
        }
    }
    trace.rejections = sampler.counters();
    trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

}  // namespace rds
