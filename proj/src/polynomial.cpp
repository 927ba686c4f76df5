#include "rds/polynomial.hpp"

#include "rds/errors.hpp"

#include <algorithm>

namespace rds {

double horner(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<double> derivative(std::span<const double> coeffs) {
    if (coeffs.size() <= 1) return {0.0};
    std::vector<double> out(coeffs.size() - 1);
    for (std::size_t k = 1; k < coeffs.size(); ++k) out[k - 1] = static_cast<double>(k) * coeffs[k];
    return out;
}

std::vector<double> multiply(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

std::vector<double> compose(std::span<const double> outer, std::span<const double> inner) {
    // Horner in polynomial arithmetic: ((c_m) * inner + c_{m-1}) * inner + ...
    std::vector<double> acc{0.0};
    for (auto it = outer.rbegin(); it != outer.rend(); ++it) {
        acc = multiply(acc, inner);
        if (acc.empty()) acc.push_back(0.0);
        acc[0] += *it;
    }
    return acc;
}

std::vector<double> trim(std::span<const double> coeffs) {
    std::size_t n = coeffs.size();
    while (n > 0 && coeffs[n - 1] == 0.0) --n;
    return {coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(n)};
}

PolynomialMap::PolynomialMap(std::vector<double> coefficients) : coeffs_(trim(coefficients)) {
    if (coeffs_.size() < 2) throw ValidationError("polynomial map must have degree >= 1");
    deriv_ = derivative(coeffs_);
}

PolynomialMap PolynomialMap::cubic(double theta) { return PolynomialMap({0.05, theta, 0.0, -0.99}); }

PolynomialMap PolynomialMap::logistic(double theta) { return PolynomialMap({1.0, 0.0, -theta}); }

}  // namespace rds
