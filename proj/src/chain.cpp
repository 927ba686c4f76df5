#include "rds/chain.hpp"

#include "rds/errors.hpp"
#include "rds/polyalg.hpp"
#include "rds/polynomial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace rds {

ChainPath make_path(const TimeSeriesDataset& data, std::size_t horizon) {
    if (data.n() < 2) throw ValidationError("dataset needs at least 2 observations");
    ChainPath path;
    path.n = data.n();
    path.T = horizon;
    path.x.assign(path.n + horizon + 1, 0.0);
    std::copy(data.observations.begin(), data.observations.end(), path.x.begin() + 1);
    return path;
}

std::vector<double> least_squares_theta(std::span<const double> obs, int degree, double M) {
    const auto terms = static_cast<Eigen::Index>(degree + 1);
    const auto rows = static_cast<Eigen::Index>(obs.size()) - 1;
    std::vector<double> theta(static_cast<std::size_t>(terms), 0.0);
    if (rows < terms) return theta;
    Eigen::MatrixXd X(rows, terms);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        double pw = 1.0;
        for (Eigen::Index k = 0; k < terms; ++k) {
            X(i, k) = pw;
            pw *= obs[static_cast<std::size_t>(i)];
        }
        y(i) = obs[static_cast<std::size_t>(i + 1)];
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    for (Eigen::Index k = 0; k < terms; ++k) {
        const double v = beta(k);
        theta[static_cast<std::size_t>(k)] = std::isfinite(v) ? std::clamp(v, -M, M) : 0.0;
    }
    return theta;
}

ChainStart initial_chain(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                         Rng& rng) {
    ChainStart s;
    s.path = make_path(data, settings.horizon);
    const auto terms = static_cast<std::size_t>(settings.degree + 1);
    auto& x = s.path.x;

    if (settings.init == InitStrategy::prior) {
        s.theta.resize(terms);
        for (double& t : s.theta) t = rng.uniform(-prior.M, prior.M);
        x[0] = rng.uniform(-prior.M0, prior.M0);
    } else {
        s.theta = least_squares_theta(data.observations, settings.degree, prior.M);
        // x0 at a random preimage of x1 inside the box.
        std::vector<double> shifted = s.theta;
        shifted[0] -= x[1];
        std::vector<double> candidates;
        if (trim(shifted).size() > 1) {
            for (double r : real_roots(shifted))
                if (std::abs(r) < prior.M0) candidates.push_back(r);
        }
        if (candidates.empty()) {
            x[0] = rng.uniform(-prior.M0, prior.M0);
        } else {
            const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(candidates.size()));
            x[0] = candidates[std::min(pick, candidates.size() - 1)];
        }
    }

    const double xn = x[s.path.n];
    bool escaped = false;
    for (std::size_t i = s.path.n + 1; i <= s.path.n_T(); ++i) {
        const double next = escaped ? xn : horner(s.theta, x[i - 1]);
        if (!std::isfinite(next) || std::abs(next) > prior.M0) escaped = true;
        x[i] = escaped ? xn : next;
    }
    return s;
}

void per_observation_precisions(const PrecisionTable& lambdas, std::span<const int> d, std::vector<double>& lambda_i) {
    lambda_i.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) lambda_i[i] = lambdas(d[i]);
}

void update_dynamics(std::vector<double>& theta, ChainPath& path, std::span<const double> lambda_i,
                     const PriorSpec& prior, FutureUpdate future, Rng& rng, RejectionCounters& counters) {
    path.x[0] = sample_x0(path.x[0], path.x[1], theta, lambda_i[0], prior.M0, rng, counters);
    if (future == FutureUpdate::forward) {
        sample_future_forward(path, theta, lambda_i, prior.M0, rng, counters);
    } else {
        sample_future(path, theta, lambda_i, rng, counters);
    }
    sample_theta(theta, path, lambda_i, prior, rng, counters);
}

}  // namespace rds
