#include "rds/trace.hpp"

#include "rds/errors.hpp"

namespace rds {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::gsbr: return "gsbr";
        case Algorithm::rdpr: return "rdpr";
        case Algorithm::param: return "param";
    }
    return "gsbr";
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "gsbr") return Algorithm::gsbr;
    if (name == "rdpr") return Algorithm::rdpr;
    if (name == "param") return Algorithm::param;
    throw ValidationError("unknown algorithm '" + name + "' (expected gsbr, rdpr or param)");
}

void SamplerSettings::validate() const {
    if (!(iterations > burn)) throw ValidationError("sampler.iterations must exceed sampler.burn");
    if (thin < 1) throw ValidationError("sampler.thin must be >= 1");
    if (degree < 1) throw ValidationError("sampler.degree must be >= 1");
}

std::vector<double> ChainTrace::theta_column(int j) const {
    const auto width = static_cast<std::size_t>(degree + 1);
    if (j < 0 || static_cast<std::size_t>(j) >= width) throw ValidationError("theta index out of range");
    std::vector<double> out(size());
    for (std::size_t r = 0; r < size(); ++r) out[r] = theta[r * width + static_cast<std::size_t>(j)];
    return out;
}

std::vector<double> ChainTrace::future_column(std::size_t j) const {
    if (j < 1 || j > horizon) throw ValidationError("future horizon index out of range");
    std::vector<double> out(size());
    for (std::size_t r = 0; r < size(); ++r) out[r] = future[r * horizon + (j - 1)];
    return out;
}

double ChainTrace::seconds_per_1000() const {
    return iterations == 0 ? 0.0 : 1000.0 * seconds / static_cast<double>(iterations);
}

void ChainTrace::reserve(std::size_t records) {
    iter.reserve(records);
    theta.reserve(records * static_cast<std::size_t>(degree + 1));
    x0.reserve(records);
    weight.reserve(records);
    future.reserve(records * horizon);
    z_pred.reserve(records);
    n_star.reserve(records);
    d_star.reserve(records);
}

void append_record(ChainTrace& trace, std::size_t iteration, const std::vector<double>& theta, double x0,
                   double weight, const ChainPath& path, double z_pred, int n_star, int d_star) {
    trace.iter.push_back(iteration);
    trace.theta.insert(trace.theta.end(), theta.begin(), theta.end());
    trace.x0.push_back(x0);
    trace.weight.push_back(weight);
    for (std::size_t j = 1; j <= path.T; ++j) trace.future.push_back(path.x[path.n + j]);
    trace.z_pred.push_back(z_pred);
    trace.n_star.push_back(n_star);
    trace.d_star.push_back(d_star);
}

}  // namespace rds
