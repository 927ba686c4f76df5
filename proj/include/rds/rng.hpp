#pragma once

#include <cstdint>
#include <random>

namespace rds {

/// Random stream owned by one chain or one simulation.
///
/// All samplers take an `Rng&` and never touch global state, so two
/// streams built from the same seed produce identical draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Uniform on the open interval (0, 1).
    double uniform();
    double uniform(double lo, double hi);
    double normal();
    double normal(double mean, double sd);
    /// Gamma with shape and *rate* (mean shape / rate).
    double gamma(double shape, double rate);
    double beta(double a, double b);
    double exponential(double rate);

    /// Seed for an independent child stream (parallel chains).
    std::uint64_t split();

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rds
