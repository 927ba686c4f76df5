#include "rds/polyalg.hpp"

#include "rds/errors.hpp"
#include "rds/polynomial.hpp"

#include <Eigen/Core>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>

namespace rds {

namespace {

struct ValueAndSlope {
    double value;
    double slope;
};

ValueAndSlope eval_with_slope(std::span<const double> c, double x) {
    double p = 0.0;
    double dp = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        dp = dp * x + p;
        p = p * x + *it;
    }
    return {p, dp};
}

double polish(std::span<const double> c, double r, double target) {
    double best = r;
    double best_res = std::abs(horner(c, r));
    for (int it = 0; it < 60 && best_res >= target * 1e-3; ++it) {
        const auto [p, dp] = eval_with_slope(c, best);
        if (dp == 0.0) break;
        const double next = best - p / dp;
        const double res = std::abs(horner(c, next));
        if (!(res < best_res)) break;
        const double step = std::abs(next - best);
        best = next;
        best_res = res;
        if (step <= 1e-16 * (1.0 + std::abs(best))) break;
    }
    if (best_res < target) return best;

    // Newton stalled: look for a sign change nearby and bisect it.
    for (double delta = 1e-12 * (1.0 + std::abs(best)); delta < 1e-3 * (1.0 + std::abs(best)); delta *= 10.0) {
        double lo = best - delta;
        double hi = best + delta;
        double plo = horner(c, lo);
        if (std::signbit(plo) == std::signbit(horner(c, hi))) continue;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double pm = horner(c, mid);
            if (std::signbit(pm) == std::signbit(plo)) {
                lo = mid;
                plo = pm;
            } else {
                hi = mid;
            }
        }
        const double cand = std::abs(horner(c, lo)) < std::abs(horner(c, hi)) ? lo : hi;
        if (std::abs(horner(c, cand)) < best_res) best = cand;
        break;
    }
    return best;
}

}  // namespace

std::vector<double> real_roots(std::span<const double> coeffs, double tol) {
    const std::vector<double> c = trim(coeffs);
    if (c.empty()) throw NumericalError("degenerate polynomial");
    const int degree = static_cast<int>(c.size()) - 1;
    if (degree == 0) return {};

    double max_coeff = 0.0;
    for (double v : c) max_coeff = std::max(max_coeff, std::abs(v));
    const double target = tol * (1.0 + max_coeff);

    std::vector<double> candidates;
    if (degree == 1) {
        candidates.push_back(-c[0] / c[1]);
    } else {
        Eigen::Map<const Eigen::VectorXd> poly(c.data(), static_cast<Eigen::Index>(c.size()));
        Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(poly);
        for (const auto& z : solver.roots()) {
            if (!std::isfinite(z.real())) continue;
            if (std::abs(z.imag()) <= 1e-8 * (1.0 + std::abs(z))) candidates.push_back(z.real());
        }
    }

    for (double& r : candidates) r = polish(c, r, target);
    std::sort(candidates.begin(), candidates.end());

    std::vector<double> roots;
    for (double r : candidates) {
        if (!roots.empty() && r - roots.back() <= tol * (1.0 + std::abs(r))) {
            if (std::abs(horner(c, r)) < std::abs(horner(c, roots.back()))) roots.back() = r;
            continue;
        }
        roots.push_back(r);
    }
    return roots;
}

IntervalUnion::IntervalUnion(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (!(intervals_[i].lo < intervals_[i].hi)) throw ValidationError("interval needs lo < hi");
        if (i > 0 && intervals_[i].lo < intervals_[i - 1].hi)
            throw ValidationError("intervals must be sorted and disjoint");
    }
}

double IntervalUnion::total_length() const {
    double total = 0.0;
    for (const auto& iv : intervals_) total += iv.length();
    return total;
}

bool IntervalUnion::contains(double x) const {
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [x](const Interval& iv) { return iv.lo < x && x < iv.hi; });
}

bool IntervalUnion::unbounded() const {
    return !intervals_.empty() && (intervals_.front().lo <= -kUnboundedSentinel ||
                                   intervals_.back().hi >= kUnboundedSentinel);
}

IntervalUnion region_Rg(std::span<const double> g, double lower, double upper) {
    if (!(lower < upper)) throw ValidationError("region_Rg needs lower < upper");
    const std::vector<double> gc = trim(g);
    if (gc.empty()) return IntervalUnion{};

    std::vector<double> shifted = gc;
    shifted[0] = gc[0] - lower;
    std::vector<double> breaks = real_roots(shifted);
    shifted[0] = gc[0] - upper;
    const std::vector<double> upper_roots = real_roots(shifted);
    breaks.insert(breaks.end(), upper_roots.begin(), upper_roots.end());
    std::sort(breaks.begin(), breaks.end());

    auto inside = [&](double x) {
        const double v = horner(gc, x);
        return lower < v && v < upper;
    };

    std::vector<Interval> out;
    auto push = [&](double lo, double hi) {
        if (hi - lo < kCollapsedLength) return;
        out.push_back({lo, hi});
    };

    if (breaks.empty()) {
        if (inside(0.0)) push(-kUnboundedSentinel, kUnboundedSentinel);
        return IntervalUnion(std::move(out));
    }
    if (inside(breaks.front() - 1.0)) push(-kUnboundedSentinel, breaks.front());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = breaks[i];
        const double hi = breaks[i + 1];
        if (hi <= lo) continue;
        if (inside(0.5 * (lo + hi))) push(lo, hi);
    }
    if (inside(breaks.back() + 1.0)) push(breaks.back(), kUnboundedSentinel);
    return IntervalUnion(std::move(out));
}

IntervalUnion intersect_box(const IntervalUnion& u, double lo, double hi) {
    if (!(lo < hi)) throw ValidationError("intersect_box needs lo < hi");
    std::vector<Interval> out;
    for (const auto& iv : u.intervals()) {
        const double a = std::max(iv.lo, lo);
        const double b = std::min(iv.hi, hi);
        if (b - a >= kCollapsedLength) out.push_back({a, b});
    }
    return IntervalUnion(std::move(out));
}

double sample_uniform(const IntervalUnion& u, Rng& rng) {
    if (u.unbounded()) throw ValidationError("cannot sample an unclipped (unbounded) interval union");
    const double total = u.total_length();
    if (!(total > 0.0)) throw NumericalError("empty support");
    double v = rng.uniform() * total;
    for (const auto& iv : u.intervals()) {
        const double len = iv.length();
        if (v < len) {
            const double x = iv.lo + v;
            // Rounding can land exactly on an endpoint of a very short interval.
            if (x <= iv.lo || x >= iv.hi) return 0.5 * (iv.lo + iv.hi);
            return x;
        }
        v -= len;
    }
    const auto& last = u.intervals().back();
    return 0.5 * (last.lo + last.hi);
}

}  // namespace rds
