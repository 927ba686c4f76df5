#include "rds/conditionals.hpp"

#include "rds/errors.hpp"
#include "rds/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rds {

void PriorSpec::validate() const {
    if (!(alpha > 0.0)) throw ValidationError("prior.alpha must be positive");
    if (!(beta > 0.0)) throw ValidationError("prior.beta must be positive");
    if (!(a > 0.0)) throw ValidationError("prior.a must be positive");
    if (!(b > 0.0)) throw ValidationError("prior.b must be positive");
    if (!(M > 0.0)) throw ValidationError("prior.M must be positive");
    if (!(M0 > 0.0)) throw ValidationError("prior.M0 must be positive");
}

PriorSpec PriorSpec::noninformative() { return {0.3, 0.3, 1e-3, 1e-3, 10.0, 10.0, PPrior::transformed_gamma}; }

PriorSpec PriorSpec::informative() { return {3.0, 0.3, 1.0, 1e-3, 10.0, 10.0, PPrior::transformed_gamma}; }

double RejectionCounters::fallback_rate() const {
    const std::size_t n = draws();
    return n == 0 ? 0.0 : static_cast<double>(rejections()) / static_cast<double>(n);
}

double h_residual(std::span<const double> theta, double x_curr, double x_prev) {
    const double r = x_curr - horner(theta, x_prev);
    return r * r;
}

void path_residuals(std::span<const double> theta, const ChainPath& path, std::vector<double>& h) {
    h.resize(path.n_T());
    for (std::size_t i = 1; i <= path.n_T(); ++i) h[i - 1] = h_residual(theta, path.x[i], path.x[i - 1]);
}

double truncated_exponential(double lambda, double t, Rng& rng) {
    return t - (2.0 / lambda) * std::log(rng.uniform());
}

PrecisionTable update_precisions(std::span<const double> h, std::span<const int> d, int n_star,
                                 const PriorSpec& prior, Rng& rng) {
    int d_star = 0;
    for (int j : d) d_star = std::max(d_star, j);
    const int size = std::max(n_star, d_star);
    std::vector<double> count(static_cast<std::size_t>(size), 0.0);
    std::vector<double> ssq(static_cast<std::size_t>(size), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        count[static_cast<std::size_t>(d[i] - 1)] += 1.0;
        ssq[static_cast<std::size_t>(d[i] - 1)] += h[i];
    }
    PrecisionTable out;
    out.values.resize(static_cast<std::size_t>(size));
    for (std::size_t j = 0; j < out.values.size(); ++j)
        out.values[j] = rng.gamma(prior.a + 0.5 * count[j], prior.b + 0.5 * ssq[j]);
    return out;
}

int sample_allocation_gsb(double h, const PrecisionTable& lambdas, int N_i, Rng& rng,
                          RejectionCounters* counters) {
    if (N_i <= 1) return 1;
    // Log weights, shifted by their max before exponentiation.
    thread_local std::vector<double> logw;
    logw.resize(static_cast<std::size_t>(N_i));
    double top = -std::numeric_limits<double>::infinity();
    int arg = 1;
    for (int j = 1; j <= N_i; ++j) {
        const double lam = lambdas(j);
        const double lw = 0.5 * std::log(lam) - 0.5 * lam * h;
        logw[static_cast<std::size_t>(j - 1)] = lw;
        if (lw > top) {
            top = lw;
            arg = j;
        }
    }
    double total = 0.0;
    for (double& w : logw) {
        w = std::exp(w - top);
        total += w;
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        if (counters) ++counters->allocation_fallbacks;
        return arg;
    }
    double u = rng.uniform() * total;
    for (int j = 1; j <= N_i; ++j) {
        u -= logw[static_cast<std::size_t>(j - 1)];
        if (u <= 0.0) return j;
    }
    return N_i;
}

int sample_slice_N(int d_i, double p, Rng& rng) {
    if (p >= 1.0) return d_i;
    const double g = std::floor(std::log(rng.uniform()) / std::log1p(-p));
    constexpr double cap = 1e9;
    return d_i + static_cast<int>(std::min(g, cap));
}

bool embedded_truncnormal_step(double& value, double mu, double tau, double lo, double hi, Rng& rng) {
    const double dev = value - mu;
    const double aux = truncated_exponential(tau, dev * dev, rng);
    const double half = std::sqrt(aux);
    const double a = std::max(lo, mu - half);
    const double b = std::min(hi, mu + half);
    if (!(a < b)) return false;
    value = rng.uniform(a, b);
    return true;
}

void sample_theta(std::vector<double>& theta, const ChainPath& path, std::span<const double> lambda_i,
                  const PriorSpec& prior, Rng& rng, RejectionCounters& counters) {
    const std::size_t nT = path.n_T();
    const std::size_t terms = theta.size();
    thread_local std::vector<double> powers;
    thread_local std::vector<double> resid;
    powers.resize(nT * terms);
    resid.resize(nT);
    for (std::size_t i = 0; i < nT; ++i) {
        const double prev = path.x[i];
        double pw = 1.0;
        double fit = 0.0;
        for (std::size_t k = 0; k < terms; ++k) {
            powers[i * terms + k] = pw;
            fit += theta[k] * pw;
            pw *= prev;
        }
        resid[i] = path.x[i + 1] - fit;
    }

    for (std::size_t j = 0; j < terms; ++j) {
        double tau = 0.0;
        double score = 0.0;
        for (std::size_t i = 0; i < nT; ++i) {
            const double pj = powers[i * terms + j];
            const double wp = lambda_i[i] * pj;
            tau += wp * pj;
            score += wp * resid[i];
        }
        ++counters.theta_draws;
        const double old = theta[j];
        if (!(tau > 0.0) || !std::isfinite(tau)) {
            theta[j] = rng.uniform(-prior.M, prior.M);
        } else {
            // mu_j = tau^-1 sum lambda xi_ji x^j with xi_ji = resid_i + theta_j x^j.
            const double mu = old + score / tau;
            if (!embedded_truncnormal_step(theta[j], mu, tau, -prior.M, prior.M, rng)) {
                ++counters.theta_rejections;
                continue;
            }
        }
        const double delta = theta[j] - old;
        for (std::size_t i = 0; i < nT; ++i) resid[i] -= delta * powers[i * terms + j];
    }
}

namespace {

void note_interval_bound(const IntervalUnion& region, std::span<const double> theta, RejectionCounters& counters) {
    const auto degree = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(trim(theta).size()) - 1, 1));
    if (region.size() > degree) ++counters.interval_bound_warnings;
}

}  // namespace

double sample_x0(double x0, double x1, std::span<const double> theta, double lambda_d1, double M0, Rng& rng,
                 RejectionCounters& counters) {
    ++counters.x0_draws;
    const double aux = truncated_exponential(lambda_d1, h_residual(theta, x1, x0), rng);
    const double half = std::sqrt(aux);
    const IntervalUnion region = region_Rg(theta, x1 - half, x1 + half);
    note_interval_bound(region, theta, counters);
    const IntervalUnion support = intersect_box(region, -M0, M0);
    if (support.empty()) {
        ++counters.x0_rejections;
        return x0;
    }
    return sample_uniform(support, rng);
}

void sample_future(ChainPath& path, std::span<const double> theta, std::span<const double> lambda_i, Rng& rng,
                   RejectionCounters& counters) {
    if (path.T == 0) return;
    auto& x = path.x;
    const std::size_t n = path.n;
    const std::size_t last = n + path.T;
    for (std::size_t i = n + 1; i < last; ++i) {
        ++counters.future_draws;
        const double fwd_mean = horner(theta, x[i - 1]);
        const double back_dev = x[i] - fwd_mean;
        const double aux_fwd = truncated_exponential(lambda_i[i - 1], back_dev * back_dev, rng);
        const double aux_bwd = truncated_exponential(lambda_i[i], h_residual(theta, x[i + 1], x[i]), rng);
        const double fwd_half = std::sqrt(aux_fwd);
        const double bwd_half = std::sqrt(aux_bwd);
        const IntervalUnion region = region_Rg(theta, x[i + 1] - bwd_half, x[i + 1] + bwd_half);
        note_interval_bound(region, theta, counters);
        const IntervalUnion support = intersect_box(region, fwd_mean - fwd_half, fwd_mean + fwd_half);
        if (support.empty()) {
            ++counters.future_rejections;
            continue;
        }
        x[i] = sample_uniform(support, rng);
    }
    ++counters.future_draws;
    x[last] = rng.normal(horner(theta, x[last - 1]), 1.0 / std::sqrt(lambda_i[last - 1]));
}

bool sample_future_forward(ChainPath& path, std::span<const double> theta, std::span<const double> lambda_i,
                           double bound, Rng& rng, RejectionCounters& counters) {
    if (path.T == 0) return false;
    ++counters.future_draws;
    thread_local std::vector<double> draft;
    draft.resize(path.T);
    double prev = path.x[path.n];
    for (std::size_t j = 0; j < path.T; ++j) {
        const std::size_t i = path.n + 1 + j;
        prev = rng.normal(horner(theta, prev), 1.0 / std::sqrt(lambda_i[i - 1]));
        if (!(std::abs(prev) < bound)) {
            ++counters.future_rejections;
            return false;
        }
        draft[j] = prev;
    }
    std::copy(draft.begin(), draft.end(), path.x.begin() + static_cast<std::ptrdiff_t>(path.n + 1));
    return true;
}

double sample_power_law(double k, double lo, double hi, Rng& rng) {
    const double e = k + 1.0;
    const double v = rng.uniform();
    if (std::abs(e) < 1e-12) return lo * std::exp(v * std::log(hi / lo));
    if (e > 0.0) {
        const double r = std::exp(e * std::log(lo / hi));
        return hi * std::pow(r + v * (1.0 - r), 1.0 / e);
    }
    const double s = std::exp(e * std::log(hi / lo));
    return lo * std::pow(1.0 + v * (s - 1.0), 1.0 / e);
}

double sample_p(double p, long long sum_N, std::size_t n_T, const PriorSpec& prior, Rng& rng,
                RejectionCounters& counters) {
    ++counters.p_draws;
    const double nT = static_cast<double>(n_T);
    const double L = prior.alpha + static_cast<double>(sum_N) - nT - 1.0;
    const double k = 2.0 * nT - prior.alpha - 1.0;

    // p2 < exp(-beta / p)  <=>  p > beta / (beta / p - log U2).
    double lo = prior.beta / (prior.beta / p - std::log(rng.uniform()));
    double hi = 1.0;
    // p1 < (1 - p)^L  <=>  p < (L > 0) or > (L < 0) 1 - (1 - p) U1^(1/L).
    const double u1 = rng.uniform();
    if (L > 0.0) {
        hi = 1.0 - (1.0 - p) * std::exp(std::log(u1) / L);
    } else if (L < 0.0) {
        lo = std::max(lo, 1.0 - (1.0 - p) * std::exp(std::log(u1) / L));
    }
    if (!(lo < hi) || !(lo > 0.0)) {
        ++counters.p_rejections;
        return p;
    }
    const double next = std::clamp(sample_power_law(k, lo, hi, rng), lo, hi);
    if (!(next > 0.0 && next < 1.0)) {
        ++counters.p_rejections;
        return p;
    }
    return next;
}

double sample_p_beta(long long sum_N, std::size_t n_T, double alpha, double beta, Rng& rng) {
    const double nT = static_cast<double>(n_T);
    const double draw = rng.beta(alpha + 2.0 * nT, beta + static_cast<double>(sum_N) - nT);
    return std::clamp(draw, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
}

double sample_p_prior(const PriorSpec& prior, Rng& rng) {
    double p = 0.5;
    if (prior.p_prior == PPrior::beta_conjugate) {
        p = rng.beta(prior.alpha, prior.beta);
    } else {
        p = 1.0 / (1.0 + rng.gamma(prior.alpha, prior.beta));
    }
    return std::clamp(p, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
}

std::vector<double> geometric_weights(double p, int count) {
    std::vector<double> w(static_cast<std::size_t>(std::max(count, 0)));
    double cur = p;
    for (double& v : w) {
        v = cur;
        cur *= 1.0 - p;
    }
    return w;
}

double sample_noise_predictive(double p, const PrecisionTable& lambdas, const PriorSpec& prior, Rng& rng) {
    const double rho = rng.uniform();
    double cum = 0.0;
    double w = p;
    double lam = -1.0;
    for (int j = 1; j <= lambdas.size(); ++j) {
        cum += w;
        if (rho <= cum) {
            lam = lambdas(j);
            break;
        }
        w *= 1.0 - p;
    }
    if (lam < 0.0) lam = rng.gamma(prior.a, prior.b);
    return rng.normal(0.0, 1.0 / std::sqrt(lam));
}

}  // namespace rds
