#include "rds/parametric.hpp"

#include <chrono>
#include <cmath>
#include <vector>

namespace rds {

ChainTrace run_param(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                     std::uint64_t seed) {
    prior.validate();
    settings.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(seed);
    ChainStart start = initial_chain(data, prior, settings, rng);
    std::vector<double>& theta = start.theta;
    ChainPath& path = start.path;
    const std::size_t nT = path.n_T();
    const std::vector<int> d(nT, 1);

    ChainTrace trace;
    trace.algorithm = Algorithm::param;
    trace.weight_name = "lambda";
    trace.degree = settings.degree;
    trace.horizon = settings.horizon;
    trace.iterations = settings.iterations;
    trace.burn = settings.burn;
    trace.thin = settings.thin;
    trace.seed = seed;
    trace.reserve(settings.record_count());

    RejectionCounters counters;
    std::vector<double> h;
    std::vector<double> lambda_i;
    for (std::size_t it = 1; it <= settings.iterations; ++it) {
        path_residuals(theta, path, h);
        const PrecisionTable lambdas = update_precisions(h, d, 1, prior, rng);
        const double lambda = lambdas(1);
        lambda_i.assign(nT, lambda);
        update_dynamics(theta, path, lambda_i, prior, settings.future_update, rng, counters);
        const double z_pred = rng.normal(0.0, 1.0 / std::sqrt(lambda));
        if (it > settings.burn && (it - settings.burn) % settings.thin == 0)
            append_record(trace, it, theta, path.x[0], lambda, path, z_pred, 1, 1);
    }
    trace.rejections = counters;
    trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

}  // namespace rds
