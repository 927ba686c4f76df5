#pragma once

#include <span>
#include <vector>

namespace rds {

/// Horner evaluation of sum_k coeffs[k] * x^k.
double horner(std::span<const double> coeffs, double x);

/// Coefficients of p'(x).
std::vector<double> derivative(std::span<const double> coeffs);

std::vector<double> multiply(std::span<const double> a, std::span<const double> b);

/// Coefficients of outer(inner(x)).
std::vector<double> compose(std::span<const double> outer, std::span<const double> inner);

/// Drops exactly-zero trailing (highest-degree) coefficients.
std::vector<double> trim(std::span<const double> coeffs);

/// Deterministic polynomial drift g(theta, x) = sum_k theta_k x^k.
///
/// Construction trims trailing zeros and rejects maps of degree < 1.
class PolynomialMap {
public:
    explicit PolynomialMap(std::vector<double> coefficients);

    double operator()(double x) const { return horner(coeffs_, x); }
    double slope(double x) const { return horner(deriv_, x); }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coefficients() const { return coeffs_; }
    double coefficient(int k) const {
        return k < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<std::size_t>(k)] : 0.0;
    }

    /// g composed with itself.
    std::vector<double> second_iterate() const { return compose(coeffs_, coeffs_); }

    /// 0.05 + theta x - 0.99 x^3.
    static PolynomialMap cubic(double theta);
    /// 1 - theta x^2.
    static PolynomialMap logistic(double theta);

private:
    std::vector<double> coeffs_;
    std::vector<double> deriv_;
};

}  // namespace rds
