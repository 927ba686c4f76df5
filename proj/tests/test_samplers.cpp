#include "oracles.hpp"
#include "rds/errors.hpp"
#include "rds/experiment.hpp"
#include "rds/gsbr.hpp"
#include "rds/parametric.hpp"
#include "rds/rdpr.hpp"

#include <doctest.h>

#include <cmath>

using namespace rds;

namespace {

SamplerSettings short_run(std::size_t iterations, std::size_t horizon = 0, int degree = 5) {
    SamplerSettings s;
    s.iterations = iterations;
    s.burn = iterations / 5;
    s.horizon = horizon;
    s.degree = degree;
    return s;
}

TimeSeriesDataset ar1_data() {
    // x_i = 0.3 + 0.5 x_{i-1} + N(0, 0.1^2)
    return generate_series(PolynomialMap({0.3, 0.5}), GaussianMixtureNoise::gaussian(0.1), 0.0, 500, 21);
}

}  // namespace

TEST_CASE("least squares recovers a noiseless map") {
    const auto orbit = deterministic_orbit(PolynomialMap::cubic(2.55), 1.0, 300);
    const auto theta = least_squares_theta(orbit, 3, 10.0);
    CHECK(theta[0] == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(theta[1] == doctest::Approx(2.55).epsilon(1e-6));
    CHECK(std::abs(theta[2]) < 1e-6);
    CHECK(theta[3] == doctest::Approx(-0.99).epsilon(1e-6));
}

TEST_CASE("same seed gives the same GSBR trace") {
    const auto data = generate(preset_generator("cubic-f1"));
    const auto a = run_gsbr(data, PriorSpec::informative(), short_run(300, 3), 5);
    const auto b = run_gsbr(data, PriorSpec::informative(), short_run(300, 3), 5);
    const auto c = run_gsbr(data, PriorSpec::informative(), short_run(300, 3), 6);
    CHECK(a.theta == b.theta);
    CHECK(a.future == b.future);
    CHECK(a.z_pred == b.z_pred);
    CHECK(a.theta != c.theta);
    CHECK(a.size() == 240);
}

TEST_CASE("trace shape and bookkeeping") {
    const auto data = generate(preset_generator("cubic-f1"));
    auto s = short_run(500, 4);
    s.thin = 2;
    const auto t = run_gsbr(data, PriorSpec::informative(), s, 1);
    CHECK(t.size() == s.record_count());
    CHECK(t.theta.size() == t.size() * 6);
    CHECK(t.future.size() == t.size() * 4);
    CHECK(t.iter.front() == s.burn + 2);
    for (std::size_t r = 0; r < t.size(); ++r) {
        CHECK(t.weight[r] > 0.0);
        CHECK(t.weight[r] < 1.0);
        CHECK(t.n_star[r] >= t.d_star[r]);
        CHECK(t.d_star[r] >= 1);
    }
    CHECK_FALSE(t.rejections.flagged());
}

TEST_CASE("settings validation") {
    SamplerSettings s;
    s.burn = s.iterations;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = SamplerSettings{};
    s.thin = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = SamplerSettings{};
    s.degree = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("all three samplers recover a linear map") {
    const auto data = ar1_data();
    // OLS on the observed transitions is the posterior mode under flat boxes.
    const auto ols = least_squares_theta(data.observations, 1, 10.0);
    const auto prior = PriorSpec::informative();
    const auto s = short_run(4000, 0, 1);
    for (auto t : {run_gsbr(data, prior, s, 1), run_rdpr(data, prior, s, 1), run_param(data, prior, s, 1)}) {
        const auto t0 = t.theta_column(0), t1 = t.theta_column(1);
        CAPTURE(to_string(t.algorithm));
        CHECK(std::abs(oracle::mean(t0) - ols[0]) < 3 * oracle::sd(t0));
        CHECK(std::abs(oracle::mean(t1) - ols[1]) < 3 * oracle::sd(t1));
        CHECK(std::abs(oracle::mean(t1) - 0.5) < 0.05);
    }
}

TEST_CASE("Param noise precision matches the Gaussian truth") {
    const auto data = ar1_data();
    const auto t = run_param(data, PriorSpec::informative(), short_run(3000, 0, 1), 2);
    CHECK(t.weight_name == "lambda");
    // 1 / 0.1^2
    CHECK(std::abs(oracle::mean(t.weight) / 100.0 - 1.0) < 0.15);
}

TEST_CASE("GSBR and rDPR land on the same theta for f1 data") {
    const auto data = generate(preset_generator("cubic-f1"));
    const auto prior = PriorSpec::informative();
    const auto s = short_run(5000, 0);
    const auto g = run_gsbr(data, prior, s, 3);
    const auto r = run_rdpr(data, prior, s, 3);
    CHECK(r.weight_name == "c");
    for (int j = 0; j <= 5; ++j) {
        const auto a = g.theta_column(j), b = r.theta_column(j);
        const double pooled = std::sqrt((oracle::sd(a) * oracle::sd(a) + oracle::sd(b) * oracle::sd(b)) / 2);
        CHECK_MESSAGE(std::abs(oracle::mean(a) - oracle::mean(b)) < 3 * pooled, "theta_" << j);
    }
}

TEST_CASE("x0 posterior sits on the preimages") {
    const auto data = generate(preset_generator("cubic-f1"));
    const auto t = run_gsbr(data, PriorSpec::informative(), short_run(5000, 0), 4);
    const auto pre = preimages(*data.map_true, *data.x0_true);
    REQUIRE(pre.size() == 3);
    std::size_t near = 0;
    for (double x : t.x0) {
        for (double m : pre) near += std::abs(x - m) < 0.1;
    }
    CHECK(static_cast<double>(near) / static_cast<double>(t.x0.size()) > 0.95);
}

TEST_CASE("stick-breaking bookkeeping") {
    StickBreaking sb;
    for (double z : {0.5, 0.2, 0.9}) sb.push(z);
    double total = 0.0;
    for (double w : sb.w) total += w;
    CHECK(total + sb.remainder == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sb.w[1] == doctest::Approx(0.1));
    CHECK(sb.remainder == doctest::Approx(0.04));

    Rng rng(1);
    const std::vector<int> d{1, 1, 2, 3, 1};
    const auto s = sample_sticks(d, 1.0, 3, rng);
    CHECK(s.size() == 3);
    double t2 = 0.0;
    for (double w : s.w) t2 += w;
    CHECK(t2 + s.remainder == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("slice extension covers every slice") {
    Rng rng(2);
    PriorSpec prior;
    const std::vector<int> d{1, 2, 2, 1};
    auto sticks = sample_sticks(d, 2.0, 2, rng);
    PrecisionTable lam{{1.0, 2.0}};
    std::vector<double> u;
    sample_slice_u(d, sticks, lam, 2.0, prior, u, rng);
    double umin = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(u[i] < sticks.w[static_cast<std::size_t>(d[i] - 1)]);
        umin = std::min(umin, u[i]);
    }
    CHECK(sticks.remainder < umin);
    CHECK(lam.size() == sticks.size());
}

TEST_CASE("DP allocation only uses components above the slice") {
    Rng rng(3);
    StickBreaking sb;
    for (double z : {0.6, 0.5, 0.5}) sb.push(z);
    PrecisionTable lam{{1.0, 1.0, 1.0}};
    for (int i = 0; i < 1000; ++i) CHECK(sample_allocation_dp(0.0, lam, sb, 0.3, rng) == 1);
    CHECK_THROWS_AS(sample_allocation_dp(0.0, lam, sb, 0.99, rng), NumericalError);
}

TEST_CASE("concentration update follows the Gamma prior without data") {
    Rng rng(4);
    double s = 0.0;
    for (int i = 0; i < 50000; ++i) s += update_concentration(1.0, 0, 0, 2.0, 4.0, rng);
    CHECK(std::abs(s / 5e4 / 0.5 - 1.0) < 0.02);
    double c = 1.0;
    for (int i = 0; i < 1000; ++i) {
        c = update_concentration(c, 3, 200, 0.3, 0.3, rng);
        CHECK(c > 0.0);
    }
}

TEST_CASE("predictive quantiles are ordered") {
    const auto data = generate(preset_generator("cubic-f1"));
    const auto t = run_gsbr(data, PriorSpec::informative(), short_run(600, 3), 1);
    const std::vector<double> probs{0.05, 0.5, 0.95};
    const auto q = predict_quantiles(t, 2, probs);
    REQUIRE(q.size() == 3);
    CHECK(q[0] <= q[1]);
    CHECK(q[1] <= q[2]);
    CHECK_THROWS_AS(predict_quantiles(t, 4, probs), ValidationError);
}
