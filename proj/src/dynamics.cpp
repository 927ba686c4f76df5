#include "rds/dynamics.hpp"

#include "rds/errors.hpp"
#include "rds/polyalg.hpp"

#include <algorithm>
#include <cmath>

namespace rds {

double EmpiricalDensity::integral() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s * bin_width;
}

double EmpiricalDensity::at(double x) const {
    if (grid.empty()) return 0.0;
    if (grid.size() == 1) return std::abs(x - grid[0]) <= 0.5 * bin_width ? mass[0] : 0.0;
    if (x < grid.front() || x > grid.back()) return 0.0;
    const double pos = (x - grid.front()) / bin_width;
    auto i = static_cast<std::size_t>(std::floor(pos));
    if (i >= grid.size() - 1) return mass.back();
    const double t = pos - static_cast<double>(i);
    return (1.0 - t) * mass[i] + t * mass[i + 1];
}

TimeSeriesDataset generate_series(const PolynomialMap& map, const GaussianMixtureNoise& noise, double x0,
                                  std::size_t n, std::uint64_t seed, std::size_t holdout, double guard) {
    if (n < 1) throw ValidationError("generate_series needs n >= 1");
    Rng rng(seed);
    TimeSeriesDataset ds;
    ds.x0_true = x0;
    ds.map_true = map;
    ds.noise_true = noise;
    ds.seed = seed;
    ds.observations.reserve(n);
    double x = x0;
    for (std::size_t i = 1; i <= n + holdout; ++i) {
        x = map(x) + noise.sample(rng);
        if (!(std::abs(x) <= guard)) throw OrbitEscaped(i, std::abs(x));
        (i <= n ? ds.observations : ds.holdout).push_back(x);
    }
    return ds;
}

std::vector<double> deterministic_orbit(const PolynomialMap& map, double x0, std::size_t n, double guard) {
    std::vector<double> out;
    out.reserve(n);
    double x = x0;
    for (std::size_t i = 1; i <= n; ++i) {
        x = map(x);
        if (!(std::abs(x) <= guard)) throw OrbitEscaped(i, std::abs(x));
        out.push_back(x);
    }
    return out;
}

LiapunovEstimate liapunov_exponent(const PolynomialMap& map, double x0, std::size_t n, std::size_t burn) {
    if (n <= burn) throw ValidationError("liapunov_exponent needs n > burn");
    double x = x0;
    double sum = 0.0;
    std::size_t used = 0;
    std::size_t skips = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        x = map(x);
        if (!(std::abs(x) <= kEscapeGuard)) throw OrbitEscaped(i, std::abs(x));
        if (i <= burn) continue;
        const double d = std::abs(map.slope(x));
        if (d == 0.0) {
            ++skips;
            continue;
        }
        sum += std::log(d);
        ++used;
    }
    if (used == 0) throw NumericalError("liapunov_exponent: every derivative was zero");
    return {sum / static_cast<double>(used), skips};
}

InvariantInterval invariant_interval(const PolynomialMap& map) {
    std::vector<double> fixed2 = map.second_iterate();
    if (fixed2.size() < 2) fixed2.resize(2, 0.0);
    fixed2[1] -= 1.0;
    const std::vector<double> roots = real_roots(fixed2, 1e-12);
    if (roots.size() < 2) throw NumericalError("no invariant interval");
    return {roots.front(), roots.back()};
}

bool InvarianceReport::all_pass() const {
    return std::all_of(facts.begin(), facts.end(), [](const FactCheck& f) { return f.pass; });
}

InvarianceReport verify_invariance_facts(const PolynomialMap& map, double grid_step) {
    if (!(grid_step > 0.0)) throw ValidationError("grid_step must be positive");
    InvarianceReport rep;
    rep.interval = invariant_interval(map);
    const double lo = rep.interval.lo;
    const double hi = rep.interval.hi;
    auto g = [&map](double x) { return map(x); };
    auto g2 = [&map](double x) { return map(map(x)); };
    constexpr double tol = 1e-9;

    rep.facts[0].description = "g(lo) = hi and g(hi) = lo";
    rep.facts[1].description = "lo <= x <= hi iff lo <= g(x) <= hi";
    rep.facts[2].description = "g(x) > x and g2(x) < x for x < lo";
    rep.facts[3].description = "g(x) < x and g2(x) > x for x > hi";
    rep.facts[4].description = "g decreasing, g2 increasing outside [lo, hi]";

    auto record = [](FactCheck& f, double violation, double allowed) {
        f.worst_violation = std::max(f.worst_violation, violation);
        if (violation > allowed) f.pass = false;
    };

    record(rep.facts[0], std::max(std::abs(g(lo) - hi), std::abs(g(hi) - lo)), tol);

    const auto steps = static_cast<std::size_t>(std::ceil((hi - lo + 4.0) / grid_step));
    double prev_g = 0.0, prev_g2 = 0.0;
    int prev_side = 0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double x = lo - 2.0 + static_cast<double>(k) * grid_step;
        const double gx = g(x);
        const double g2x = g2(x);
        const int side = x < lo ? -1 : (x > hi ? 1 : 0);

        // Fact 2, away from the endpoints where both sides are ambiguous.
        if (std::abs(x - lo) > tol && std::abs(x - hi) > tol) {
            if (side == 0) {
                record(rep.facts[1], std::max({lo - gx, gx - hi, 0.0}), tol);
            } else {
                const double depth = std::min(gx - lo, hi - gx);
                record(rep.facts[1], std::max(depth, 0.0), tol);
            }
        }
        if (side == -1) {
            record(rep.facts[2], std::max({x - gx, g2x - x, 0.0}), 0.0);
        } else if (side == 1) {
            record(rep.facts[3], std::max({gx - x, x - g2x, 0.0}), 0.0);
        }
        if (side != 0 && side == prev_side) {
            record(rep.facts[4], std::max({gx - prev_g, prev_g2 - g2x, 0.0}), 0.0);
        }
        prev_g = gx;
        prev_g2 = g2x;
        prev_side = side;
    }
    return rep;
}

QuasiInvariantResult quasi_invariant_density(const PolynomialMap& map, const GaussianMixtureNoise& noise,
                                             double x0, std::uint64_t seed, const QuasiInvariantOptions& opt) {
    if (opt.bins < 1) throw ValidationError("quasi_invariant_density needs bins >= 1");
    if (opt.n_long <= opt.burn) throw ValidationError("quasi_invariant_density needs n_long > burn");

    // The trapping complement is measured against the invariant interval when
    // the map has one; otherwise against the histogram range itself.
    std::optional<InvariantInterval> trap;
    try {
        trap = invariant_interval(map);
    } catch (const NumericalError&) {
    }
    InvariantInterval range;
    if (opt.range) {
        range = *opt.range;
    } else {
        if (!trap) throw ValidationError("no invariant interval: pass an explicit histogram range");
        const double pad = 0.05 * (trap->hi - trap->lo);
        range = {trap->lo - pad, trap->hi + pad};
    }
    if (!(range.lo < range.hi)) throw ValidationError("histogram range needs lo < hi");
    const InvariantInterval inside_set = trap.value_or(range);

    const double width = (range.hi - range.lo) / static_cast<double>(opt.bins);
    std::vector<double> counts(opt.bins, 0.0);
    auto bin_of = [&](double x) -> std::optional<std::size_t> {
        if (x < range.lo || x >= range.hi) return std::nullopt;
        return std::min(static_cast<std::size_t>((x - range.lo) / width), opt.bins - 1);
    };

    Rng rng(seed);
    QuasiInvariantResult res;
    std::vector<double> pending;
    std::size_t post_burn = 0;
    while (post_burn < opt.n_long - opt.burn) {
        ++res.segments;
        double x = x0;
        pending.clear();
        bool escaped = false;
        for (std::size_t t = 1; post_burn < opt.n_long - opt.burn; ++t) {
            x = map(x) + noise.sample(rng);
            if (!(std::abs(x) <= opt.guard)) {
                escaped = true;
                break;
            }
            if (t <= opt.burn) continue;
            ++post_burn;
            if (x < inside_set.lo || x > inside_set.hi) {
                pending.push_back(x);
                continue;
            }
            for (double p : pending)
                if (auto b = bin_of(p)) counts[*b] += 1.0, ++res.kept;
            pending.clear();
            if (auto b = bin_of(x)) counts[*b] += 1.0, ++res.kept;
        }
        if (escaped) {
            ++res.escapes;
            // Segments that die inside the burn-in never advance post_burn.
            if (res.escapes >= 100 && 2 * res.escapes > res.segments)
                throw NumericalError("noise too strong for quasi-invariant estimate");
        } else {
            for (double p : pending)
                if (auto b = bin_of(p)) counts[*b] += 1.0, ++res.kept;
        }
    }
    if (2 * res.escapes > res.segments)
        throw NumericalError("noise too strong for quasi-invariant estimate");
    if (res.kept == 0) throw NumericalError("quasi-invariant orbit never visited the histogram range");

    res.density.bin_width = width;
    res.density.grid.resize(opt.bins);
    res.density.mass.resize(opt.bins);
    for (std::size_t b = 0; b < opt.bins; ++b) {
        res.density.grid[b] = range.lo + (static_cast<double>(b) + 0.5) * width;
        res.density.mass[b] = counts[b] / (static_cast<double>(res.kept) * width);
    }
    return res;
}

}  // namespace rds
