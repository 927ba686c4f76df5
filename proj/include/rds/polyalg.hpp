#pragma once

#include "rds/rng.hpp"

#include <span>
#include <vector>

namespace rds {

/// Stand-in for +-infinity at the unbounded ends of a region.
inline constexpr double kUnboundedSentinel = 1e12;

/// Intervals shorter than this are dropped as measure-zero.
inline constexpr double kCollapsedLength = 1e-12;

/// Real roots of sum_k coeffs[k] x^k, sorted ascending.
///
/// Roots come from the eigenvalues of the balanced companion matrix, keep
/// those with |Im| <= 1e-8 (1 + |root|), and are then Newton-polished (with a
/// bisection fallback) until |p(r)| < tol (1 + max|coeff|). Roots closer than
/// tol (1 + |r|) are merged. Throws NumericalError("degenerate polynomial")
/// for the zero polynomial.
std::vector<double> real_roots(std::span<const double> coeffs, double tol = 1e-10);

struct Interval {
    double lo;
    double hi;
    double length() const { return hi - lo; }
};

/// Sorted, pairwise-disjoint union of open intervals.
class IntervalUnion {
public:
    IntervalUnion() = default;
    /// Validates lo < hi, ordering and disjointness.
    explicit IntervalUnion(std::vector<Interval> intervals);

    const std::vector<Interval>& intervals() const { return intervals_; }
    std::size_t size() const { return intervals_.size(); }
    bool empty() const { return intervals_.empty(); }
    double total_length() const;
    bool contains(double x) const;
    /// True when an endpoint sits at the +-kUnboundedSentinel stand-in.
    bool unbounded() const;

private:
    std::vector<Interval> intervals_;
};

/// The open set {x : lower < g(x) < upper} for the polynomial g.
///
/// Breakpoints are the ordered real roots of g - lower and g - upper; each
/// piece between consecutive breakpoints is classified by evaluating g inside
/// it, which covers every parity / leading-sign combination at once. Pieces
/// that reach infinity use the sentinel endpoints and must be clipped with
/// intersect_box before sampling.
IntervalUnion region_Rg(std::span<const double> g, double lower, double upper);

IntervalUnion intersect_box(const IntervalUnion& u, double lo, double hi);

/// Uniform draw over the union (interval picked proportionally to length).
/// Throws NumericalError on zero total length, ValidationError when unbounded.
double sample_uniform(const IntervalUnion& u, Rng& rng);

}  // namespace rds
