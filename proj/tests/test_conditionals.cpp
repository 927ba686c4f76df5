#include "oracles.hpp"
#include "rds/conditionals.hpp"
#include "rds/polyalg.hpp"
#include "rds/polynomial.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rds;

TEST_CASE("geometric weights") {
    const auto w = geometric_weights(0.5, 4);
    CHECK(w == std::vector<double>{0.5, 0.25, 0.125, 0.0625});
    double s = 0.0;
    for (double v : geometric_weights(0.3, 200)) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("geometric weights are the negative-binomial marginal") {
    for (int k = 1; k <= 9; ++k) {
        const double p = 0.1 * k, q = 1.0 - p;
        const auto w = geometric_weights(p, 20);
        for (int j = 1; j <= 20; ++j) {
            // Terms l^-1 * l p^2 q^(l-1); the tail past L sums to p q^L.
            int L = j;
            while (p * std::pow(q, L) > 1e-14) ++L;
            double s = 0.0;
            for (int l = j; l <= L; ++l) s += (1.0 / l) * (l * p * p * std::pow(q, l - 1));
            CHECK(std::abs(s - w[static_cast<std::size_t>(j - 1)]) < 1e-10);
        }
    }
}

TEST_CASE("prior presets") {
    const auto nrp = PriorSpec::noninformative();
    CHECK(nrp.alpha == 0.3);
    CHECK(nrp.beta == 0.3);
    CHECK(nrp.M == 10.0);
    CHECK(nrp.M0 == 10.0);
    const auto irp = PriorSpec::informative();
    CHECK(irp.alpha == 3.0);
    CHECK(irp.beta == 0.3);
    CHECK(irp.a == 1.0);
    CHECK(irp.b == 1e-3);
    CHECK(irp.M == 10.0);
    PriorSpec bad;
    bad.a = -1.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("h residual") {
    const std::vector<double> theta{0.05, 2.55, 0.0, -0.99};
    CHECK(h_residual(theta, 1.7, 1.0) == doctest::Approx(0.0081));
}

TEST_CASE("precision update is conjugate") {
    Rng rng(1);
    PriorSpec prior;
    prior.a = 1.0;
    prior.b = 1e-3;
    const std::vector<double> h{0.01, 0.02, 0.005, 0.03, 0.001};
    const std::vector<int> d(5, 1);
    double hs = 0.0;
    for (double v : h) hs += v;
    const double want = (prior.a + 2.5) / (prior.b + hs / 2);
    double s = 0.0;
    for (int i = 0; i < 100000; ++i) s += update_precisions(h, d, 1, prior, rng)(1);
    CHECK(std::abs(s / 1e5 / want - 1.0) < 0.01);

    SUBCASE("empty components draw from the prior") {
        double e = 0.0;
        for (int i = 0; i < 100000; ++i) e += update_precisions(h, d, 2, prior, rng)(2);
        CHECK(std::abs(e / 1e5 / (prior.a / prior.b) - 1.0) < 0.02);
    }
}

TEST_CASE("GSB allocation probabilities") {
    Rng rng(2);
    PrecisionTable eq{{3.0, 3.0}};
    PrecisionTable skew{{1.0, 100.0}};
    int two = 0, one_only = 0;
    for (int i = 0; i < 100000; ++i) {
        two += sample_allocation_gsb(0.2, eq, 2, rng) == 2;
        one_only += sample_allocation_gsb(0.2, eq, 1, rng) == 1;
    }
    CHECK(std::abs(two / 1e5 - 0.5) < 0.01);
    CHECK(one_only == 100000);
    int hi = 0;
    for (int i = 0; i < 100000; ++i) hi += sample_allocation_gsb(0.0, skew, 2, rng) == 2;
    CHECK(std::abs(hi / 1e5 - 10.0 / 11.0) < 0.01);
}

TEST_CASE("allocation matches the full conditional by chi-square") {
    Rng rng(3);
    PrecisionTable lam{{0.5, 4.0, 30.0, 200.0}};
    const double h = 0.02;
    std::vector<double> w(4);
    double tot = 0.0;
    for (int j = 0; j < 4; ++j) tot += w[j] = std::sqrt(lam.values[j]) * std::exp(-lam.values[j] * h / 2);
    std::vector<int> count(4, 0);
    const int n = 200000;
    for (int i = 0; i < n; ++i) ++count[static_cast<std::size_t>(sample_allocation_gsb(h, lam, 4, rng) - 1)];
    double chi2 = 0.0;
    for (int j = 0; j < 4; ++j) {
        const double e = n * w[j] / tot;
        chi2 += (count[j] - e) * (count[j] - e) / e;
    }
    CHECK(chi2 < 11.34);  // chi-square(3) 1% point
}

TEST_CASE("slice N is a shifted geometric") {
    Rng rng(4);
    int three = 0, four = 0;
    double s = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const int N = sample_slice_N(3, 0.5, rng);
        CHECK(N >= 3);
        three += N == 3;
        four += N == 4;
        s += N;
    }
    CHECK(std::abs(three / 1e5 - 0.5) < 0.01);
    CHECK(std::abs(four / 1e5 - 0.25) < 0.01);
    CHECK(std::abs(s / 1e5 / (3.0 + 1.0) - 1.0) < 0.02);
    int same = 0;
    for (int i = 0; i < 1000; ++i) same += sample_slice_N(5, 1.0 - 1e-12, rng) == 5;
    CHECK(same == 1000);
}

TEST_CASE("truncated exponential stays above its threshold") {
    Rng rng(5);
    double s = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double v = truncated_exponential(4.0, 0.3, rng);
        CHECK(v > 0.3);
        s += v - 0.3;
    }
    CHECK(std::abs(s / 1e5 / 0.5 - 1.0) < 0.02);
}

TEST_CASE("embedded truncated-normal chain has the right stationary law") {
    Rng rng(6);
    std::mt19937_64 eng(7);
    const double mu = 0.4, tau = 3.0, lo = -0.2, hi = 1.5;
    std::vector<double> chain;
    double v = 1.0;
    for (int i = 0; i < 1'000'000; ++i) {
        embedded_truncnormal_step(v, mu, tau, lo, hi, rng);
        if (i % 10 == 0) chain.push_back(v);
    }
    const auto direct = oracle::truncated_normal(mu, tau, lo, hi, chain.size(), eng);
    CHECK(oracle::ks_two_sample(chain, direct) < oracle::ks_critical_1pct(chain.size(), direct.size()));
}

TEST_CASE("theta sweep without information redraws from the prior box") {
    // The only predecessor is zero, so only theta_0 is informed.
    ChainPath path;
    path.n = 1;
    path.x = {0.0, 0.3};
    std::vector<double> lambda_i(1, 100.0);
    PriorSpec prior;
    Rng rng(8);
    RejectionCounters counters;
    std::vector<double> theta(3, 0.0);
    double s0 = 0.0, s2 = 0.0;
    for (int i = 0; i < 20000; ++i) {
        sample_theta(theta, path, lambda_i, prior, rng, counters);
        s0 += theta[0];
        s2 += theta[2] * theta[2];
    }
    CHECK(std::abs(s0 / 2e4 - 0.3) < 0.01);
    // Uniform on (-10, 10) has second moment 100 / 3.
    CHECK(std::abs(s2 / 2e4 / (100.0 / 3.0) - 1.0) < 0.05);
}

TEST_CASE("x0 draws satisfy their slice constraint") {
    const auto g = PolynomialMap::cubic(2.55);
    const std::vector<double> theta(g.coefficients().begin(), g.coefficients().end());
    const double x1 = g(1.0);
    Rng rng(9);
    RejectionCounters counters;
    double x0 = 1.0;
    int near[3] = {0, 0, 0};
    const double modes[3] = {-1.8512, 0.8512, 1.0};
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        x0 = sample_x0(x0, x1, theta, 1e6, 10.0, rng, counters);
        CHECK(std::abs(x0) < 10.0);
        for (int k = 0; k < 3; ++k) near[k] += std::abs(x0 - modes[k]) < 0.03;
    }
    CHECK(near[0] + near[1] + near[2] == n);
    // Under a flat prior each mode carries mass proportional to 1 / |g'|.
    double inv[3], tot = 0.0;
    for (int k = 0; k < 3; ++k) tot += inv[k] = 1.0 / std::abs(g.slope(modes[k]));
    for (int k = 0; k < 3; ++k) CHECK(std::abs(near[k] / double(n) - inv[k] / tot) < 0.03);
}

TEST_CASE("x0 region for the identity map is the band around x1") {
    const std::vector<double> theta{0.0, 1.0};
    Rng rng(10);
    RejectionCounters counters;
    double x0 = 0.5;
    for (int i = 0; i < 1000; ++i) {
        const double x1 = 0.5;
        x0 = sample_x0(x0, x1, theta, 100.0, 10.0, rng, counters);
        CHECK(std::abs(x0 - x1) < 1.0);
    }
}

TEST_CASE("future updates stay finite and count every state") {
    const auto g = PolynomialMap::cubic(2.55);
    const std::vector<double> theta(g.coefficients().begin(), g.coefficients().end());
    ChainPath path;
    path.n = 3;
    path.T = 5;
    path.x = {1.0, g(1.0), g(g(1.0)), g(g(g(1.0))), 0, 0, 0, 0, 0};
    for (std::size_t i = 4; i < path.x.size(); ++i) path.x[i] = g(path.x[i - 1]);
    const std::vector<double> lambda_i(8, 2500.0);
    Rng rng(11);
    RejectionCounters counters;
    for (int it = 0; it < 2000; ++it) {
        sample_future(path, theta, lambda_i, rng, counters);
        for (double x : path.x) CHECK(std::isfinite(x));
    }
    CHECK(counters.future_draws == 2000u * 5u);

    SUBCASE("T = 1 is the terminal normal draw") {
        ChainPath p1;
        p1.n = 1;
        p1.T = 1;
        p1.x = {0.0, 0.5, 0.0};
        std::vector<double> draws;
        for (int i = 0; i < 100000; ++i) {
            sample_future(p1, theta, std::vector<double>{1.0, 400.0}, rng, counters);
            draws.push_back(p1.x[2]);
        }
        const double m = g(0.5);
        CHECK(oracle::ks_one_sample(draws, [&](double x) { return oracle::normal_cdf((x - m) * 20.0); }) < 0.0052);
    }
}

namespace {

// Independent forward simulation of the future states from x_n.
std::vector<std::vector<double>> forward_oracle(const std::vector<double>& theta, double xn, double sd,
                                                std::size_t T, std::size_t draws, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> nd;
    std::vector<std::vector<double>> cols(T + 1);
    for (std::size_t m = 0; m < draws; ++m) {
        double x = xn;
        for (std::size_t h = 1; h <= T; ++h) {
            x = oracle::poly_eval(theta, x) + sd * nd(eng);
            cols[h].push_back(x);
        }
    }
    return cols;
}

ChainPath continuation(const PolynomialMap& g, double xn, std::size_t T) {
    ChainPath p;
    p.n = 1;
    p.T = T;
    p.x.assign(T + 2, 0.0);
    p.x[1] = xn;
    for (std::size_t i = 2; i < p.x.size(); ++i) p.x[i] = g(p.x[i - 1]);
    return p;
}

}  // namespace

TEST_CASE("slice future updates target the forward chain on a short horizon") {
    const auto g = PolynomialMap::cubic(2.55);
    const std::vector<double> theta(g.coefficients().begin(), g.coefficients().end());
    const double sd = 0.03;
    const std::size_t T = 3;
    const auto want = forward_oracle(theta, -1.233, sd, T, 200000, 1);
    auto path = continuation(g, -1.233, T);
    const std::vector<double> lambda_i(T + 1, 1.0 / (sd * sd));
    Rng rng(2);
    RejectionCounters counters;
    std::vector<std::vector<double>> got(T + 1);
    for (int it = 0; it < 300000; ++it) {
        sample_future(path, theta, lambda_i, rng, counters);
        if (it >= 30000) for (std::size_t h = 1; h <= T; ++h) got[h].push_back(path.x[1 + h]);
    }
    for (std::size_t h = 1; h <= T; ++h) {
        CAPTURE(h);
        CHECK(std::abs(oracle::mean(got[h]) - oracle::mean(want[h])) < 0.1 * oracle::sd(want[h]));
        CHECK(std::abs(oracle::sd(got[h]) / oracle::sd(want[h]) - 1.0) < 0.05);
    }
}

TEST_CASE("forward future block is an exact draw for long horizons") {
    const auto g = PolynomialMap::cubic(2.55);
    const std::vector<double> theta(g.coefficients().begin(), g.coefficients().end());
    const double sd = 0.03;
    const std::size_t T = 20;
    const auto want = forward_oracle(theta, -1.233, sd, T, 20000, 3);
    auto path = continuation(g, -1.233, T);
    const std::vector<double> lambda_i(T + 1, 1.0 / (sd * sd));
    Rng rng(4);
    RejectionCounters counters;
    std::vector<std::vector<double>> got(T + 1);
    for (int it = 0; it < 20000; ++it) {
        CHECK(sample_future_forward(path, theta, lambda_i, 10.0, rng, counters));
        for (std::size_t h = 1; h <= T; ++h) got[h].push_back(path.x[1 + h]);
    }
    CHECK(counters.future_draws == 20000u);
    CHECK(counters.future_rejections == 0u);
    for (std::size_t h : {1, 5, 10, 20}) {
        CAPTURE(h);
        CHECK(oracle::ks_two_sample(got[h], want[h]) < oracle::ks_critical_1pct(got[h].size(), want[h].size()));
    }

    SUBCASE("an escaping draw keeps the current path") {
        const std::vector<double> before = path.x;
        const std::vector<double> wide(T + 1, 1.0);
        std::size_t kept = 0;
        for (int it = 0; it < 200; ++it) {
            const auto prev = path.x;
            if (!sample_future_forward(path, theta, wide, 2.0, rng, counters)) {
                CHECK(path.x == prev);
                ++kept;
            }
            for (std::size_t i = 2; i < path.x.size(); ++i) CHECK(std::abs(path.x[i]) < 2.0);
        }
        CHECK(kept > 0);
        CHECK(path.x[1] == before[1]);
    }
}

TEST_CASE("power-law draws match the analytic CDF") {
    Rng rng(12);
    for (double k : {-3.5, -1.0, 0.0, 2.0, 150.0}) {
        const double lo = 0.2, hi = 0.9;
        std::vector<double> draws;
        for (int i = 0; i < 100000; ++i) draws.push_back(sample_power_law(k, lo, hi, rng));
        auto cdf = [&](double x) {
            if (k == -1.0) return std::log(x / lo) / std::log(hi / lo);
            return (std::pow(x, k + 1) - std::pow(lo, k + 1)) / (std::pow(hi, k + 1) - std::pow(lo, k + 1));
        };
        CHECK_MESSAGE(oracle::ks_one_sample(draws, cdf) < 0.0052, "k = " << k);
    }
}

TEST_CASE("p updates stay in the unit interval and track the data") {
    PriorSpec prior;
    Rng rng(13);
    RejectionCounters counters;
    // sum N close to n_T means a single component, so p near 1.
    double p = 0.5, s = 0.0;
    for (int i = 0; i < 5000; ++i) {
        p = sample_p(p, 210, 200, prior, rng, counters);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
        s += p;
    }
    CHECK(s / 5000 > 0.9);
    double b = 0.0;
    for (int i = 0; i < 20000; ++i) b += sample_p_beta(600, 200, 1.0, 1.0, rng);
    // Be(401, 401)
    CHECK(std::abs(b / 2e4 - 0.5) < 0.01);
}

TEST_CASE("noise predictive follows the weights") {
    PriorSpec prior;
    PrecisionTable lam{{1e4}};
    Rng rng(14);
    std::vector<double> z;
    for (int i = 0; i < 100000; ++i) z.push_back(sample_noise_predictive(1.0 - 1e-12, lam, prior, rng));
    CHECK(oracle::ks_one_sample(z, [](double x) { return oracle::normal_cdf(x * 100.0); }) < 0.0052);
}
