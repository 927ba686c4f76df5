#pragma once

#include "rds/rng.hpp"

#include <string>
#include <vector>

namespace rds {

struct NoiseComponent {
    double weight;
    double variance;

    bool operator==(const NoiseComponent&) const = default;
};

/// Finite mixture of zero-mean normals used to perturb the state recursion.
class GaussianMixtureNoise {
public:
    /// Weights must sum to 1 within 1e-12 and every variance must be positive.
    explicit GaussianMixtureNoise(std::vector<NoiseComponent> components);

    const std::vector<NoiseComponent>& components() const { return components_; }

    double sample(Rng& rng) const;
    double pdf(double z) const;
    double variance() const;
    double fourth_moment() const;

    /// E|z| / sqrt(E z^2), in closed form.
    double tail_fatness() const;

    static GaussianMixtureNoise gaussian(double sd);
    /// Equal-weight 4-mixture with variances (5r + 1) sigma^2, r = 0..3, sigma = 1e-2.
    static GaussianMixtureNoise f1();
    /// ((5 + l)/10) N(0, sigma^2) + ((5 - l)/10) N(0, (200 sigma)^2), sigma = 1e-3, l = 1..4.
    static GaussianMixtureNoise f2(int l);

private:
    std::vector<NoiseComponent> components_;
    std::vector<double> cumulative_;
};

}  // namespace rds
