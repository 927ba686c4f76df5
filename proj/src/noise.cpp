#include "rds/noise.hpp"

#include "rds/errors.hpp"

#include <cmath>
#include <numbers>

namespace rds {

GaussianMixtureNoise::GaussianMixtureNoise(std::vector<NoiseComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw ValidationError("noise mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight >= 0.0)) throw ValidationError("noise mixture weight must be nonnegative");
        if (!(c.variance > 0.0)) throw ValidationError("noise mixture variance must be positive");
        total += c.weight;
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("noise mixture weights must sum to 1");
}

double GaussianMixtureNoise::sample(Rng& rng) const {
    const double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < cumulative_.size() && u > cumulative_[k]) ++k;
    return rng.normal(0.0, std::sqrt(components_[k].variance));
}

double GaussianMixtureNoise::pdf(double z) const {
    double out = 0.0;
    for (const auto& c : components_)
        out += c.weight * std::exp(-0.5 * z * z / c.variance) / std::sqrt(2.0 * std::numbers::pi * c.variance);
    return out;
}

double GaussianMixtureNoise::variance() const {
    double v = 0.0;
    for (const auto& c : components_) v += c.weight * c.variance;
    return v;
}

double GaussianMixtureNoise::fourth_moment() const {
    double m4 = 0.0;
    for (const auto& c : components_) m4 += 3.0 * c.weight * c.variance * c.variance;
    return m4;
}

double GaussianMixtureNoise::tail_fatness() const {
    double abs_mean = 0.0;
    for (const auto& c : components_) abs_mean += c.weight * std::sqrt(c.variance);
    abs_mean *= std::sqrt(2.0 / std::numbers::pi);
    return abs_mean / std::sqrt(variance());
}

GaussianMixtureNoise GaussianMixtureNoise::gaussian(double sd) {
    return GaussianMixtureNoise({{1.0, sd * sd}});
}

GaussianMixtureNoise GaussianMixtureNoise::f1() {
    constexpr double sigma = 1e-2;
    std::vector<NoiseComponent> c;
    for (int r = 0; r < 4; ++r) c.push_back({0.25, (5.0 * r + 1.0) * sigma * sigma});
    return GaussianMixtureNoise(std::move(c));
}

GaussianMixtureNoise GaussianMixtureNoise::f2(int l) {
    if (l < 1 || l > 4) throw ValidationError("f2 mixture index must be in 1..4");
    constexpr double sigma = 1e-3;
    return GaussianMixtureNoise({{(5.0 + l) / 10.0, sigma * sigma},
                                 {(5.0 - l) / 10.0, (200.0 * sigma) * (200.0 * sigma)}});
}

}  // namespace rds
