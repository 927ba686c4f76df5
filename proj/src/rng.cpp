#include "rds/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rds {

Rng::Rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
}

double Rng::uniform() {
    // 53 random bits, shifted by half an ulp so neither 0 nor 1 can occur.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() { return normal_(engine_); }

double Rng::normal(double mean, double sd) { return mean + sd * normal_(engine_); }

double Rng::gamma(double shape, double rate) {
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    // Shapes near 1e-3 underflow to exactly zero; keep the draw strictly positive.
    return std::max(dist(engine_), std::numeric_limits<double>::min());
}

double Rng::beta(double a, double b) {
    // log Gamma(s) = log Gamma(s + 1) + log(U) / s keeps tiny shapes out of underflow.
    auto log_gamma_draw = [this](double shape) {
        if (shape >= 1.0) return std::log(gamma(shape, 1.0));
        return std::log(gamma(shape + 1.0, 1.0)) + std::log(uniform()) / shape;
    };
    const double lx = log_gamma_draw(a);
    const double ly = log_gamma_draw(b);
    return 1.0 / (1.0 + std::exp(ly - lx));
}

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

std::uint64_t Rng::split() { return engine_(); }

}  // namespace rds
