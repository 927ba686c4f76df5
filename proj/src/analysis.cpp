#include "rds/analysis.hpp"

#include "rds/errors.hpp"
#include "rds/polyalg.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace rds {

namespace {

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sd_of(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// Type-7 quantile of sorted data.
double quantile_sorted(const std::vector<double>& s, double q) {
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return (1.0 - t) * s[lo] + t * s[hi];
}

}  // namespace

void EstimatorConfig::validate() const {
    if (K < 1 || N < 1 || bins < 1) throw ValidationError("estimator K, N and bins must be >= 1");
    if (!(lo < hi)) throw ValidationError("estimator range needs lo < hi");
    if (kde_bandwidth && !(*kde_bandwidth > 0.0)) throw ValidationError("kde_bandwidth must be positive");
}

double sm_estimate(std::span<const double> column, const EstimatorConfig& config) {
    config.validate();
    if (column.size() < config.required_length())
        throw ValidationError("sm_estimate needs at least " + std::to_string(config.required_length()) +
                              " samples, got " + std::to_string(column.size()));
    double total = 0.0;
    for (std::size_t r = 0; r < config.K; ++r) {
        const std::size_t start = r * (config.N + config.s);
        double block = 0.0;
        for (std::size_t i = start; i < start + config.N; ++i) block += column[i];
        total += block / static_cast<double>(config.N);
    }
    return total / static_cast<double>(config.K);
}

double map_estimate(std::span<const double> samples, std::size_t bins, double lo, double hi) {
    if (samples.empty()) throw ValidationError("map_estimate needs samples");
    if (bins < 1 || !(lo < hi)) throw ValidationError("map_estimate needs bins >= 1 and lo < hi");
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    std::size_t inside = 0;
    for (double x : samples) {
        if (x < lo || x > hi) continue;
        ++counts[std::min(static_cast<std::size_t>((x - lo) / width), bins - 1)];
        ++inside;
    }
    if (inside == 0) throw ValidationError("map_estimate: every sample lies outside the histogram range");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = quantile_sorted(sorted, 0.5);
    const std::size_t top = *std::max_element(counts.begin(), counts.end());
    std::size_t best = bins;
    double best_gap = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        if (counts[b] != top) continue;
        const double mid = lo + (static_cast<double>(b) + 0.5) * width;
        const double gap = std::abs(mid - median);
        if (best == bins || gap < best_gap) best = b, best_gap = gap;
    }
    return lo + (static_cast<double>(best) + 0.5) * width;
}

double pare(double truth, double estimate) {
    if (truth == 0.0) throw ValidationError("PARE undefined for a zero true value");
    return 100.0 * std::abs(estimate - truth) / std::abs(truth);
}

PareValue pare_or_absolute(double truth, double estimate) {
    if (truth == 0.0) return {100.0 * std::abs(estimate), true};
    return {pare(truth, estimate), false};
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(lo < hi)) throw ValidationError("uniform_grid needs >= 2 points and lo < hi");
    std::vector<double> g(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo + static_cast<double>(i) * step;
    return g;
}

double silverman_bandwidth(std::span<const double> samples) {
    if (samples.size() < 2) return 0.0;
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double sd = sd_of(samples);
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

EmpiricalDensity kde(std::span<const double> samples, std::span<const double> grid, std::optional<double> bandwidth) {
    if (samples.empty()) throw ValidationError("kde needs samples");
    if (grid.size() < 2) throw ValidationError("kde needs a grid of >= 2 points");
    constexpr double floor_bw = 1e-6;
    EmpiricalDensity d;
    d.grid.assign(grid.begin(), grid.end());
    d.bin_width = grid[1] - grid[0];
    d.mass.assign(grid.size(), 0.0);
    const double bw = bandwidth.value_or(silverman_bandwidth(samples));

    if (!(bw >= floor_bw)) {
        // Spike: every sample's mass on its nearest grid point.
        for (double x : samples) {
            const double pos = std::round((x - grid.front()) / d.bin_width);
            const auto i = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(grid.size() - 1)));
            d.mass[i] += 1.0;
        }
    } else {
        // Kernels beyond 8 bandwidths contribute below 1e-14 and are skipped.
        const double reach = 8.0 * bw;
        const double inv = 1.0 / bw;
        for (double x : samples) {
            const auto first = std::lower_bound(d.grid.begin(), d.grid.end(), x - reach) - d.grid.begin();
            for (auto i = static_cast<std::size_t>(first); i < d.grid.size() && d.grid[i] <= x + reach; ++i) {
                const double z = (d.grid[i] - x) * inv;
                d.mass[i] += std::exp(-0.5 * z * z);
            }
        }
    }
    const double total = std::accumulate(d.mass.begin(), d.mass.end(), 0.0) * d.bin_width;
    if (total > 0.0)
        for (double& m : d.mass) m /= total;
    return d;
}

std::vector<double> ergodic_average(std::span<const double> column) {
    std::vector<double> out(column.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < column.size(); ++i) {
        sum += column[i];
        out[i] = sum / static_cast<double>(i + 1);
    }
    return out;
}

double apen(std::span<const double> series, int m, double r) {
    if (m < 1) throw ValidationError("apen needs m >= 1");
    const auto len = series.size();
    if (len <= static_cast<std::size_t>(m) + 1) throw ValidationError("apen needs length > m + 1");
    const double sd = sd_of(series);
    if (sd == 0.0) return 0.0;
    const double tol = r < 0.0 ? 0.2 * sd : r;

    auto phi = [&](std::size_t dim) {
        const std::size_t count = len - dim + 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t close = 0;
            for (std::size_t j = 0; j < count; ++j) {
                bool ok = true;
                for (std::size_t k = 0; k < dim && ok; ++k) ok = std::abs(series[i + k] - series[j + k]) <= tol;
                close += ok;
            }
            acc += std::log(static_cast<double>(close) / static_cast<double>(count));
        }
        return acc / static_cast<double>(count);
    };
    const auto md = static_cast<std::size_t>(m);
    return std::max(0.0, phi(md) - phi(md + 1));
}

double omega(std::span<const double> series, std::size_t segment_len, double overlap) {
    const std::size_t n = series.size();
    std::size_t L = segment_len;
    if (L == 0) {
        L = n / 4;
        L -= L % 2;
    }
    if (L < 4) throw ValidationError("omega needs a segment length >= 4");
    if (n < 2 * L) throw ValidationError("omega needs a series of at least twice the segment length");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw ValidationError("omega overlap must lie in [0, 1)");
    const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::round(static_cast<double>(L) * (1.0 - overlap))));

    std::vector<double> window(L);
    for (std::size_t k = 0; k < L; ++k)
        window[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(L - 1));

    const std::size_t bins = L / 2 + 1;
    double* in = fftw_alloc_real(L);
    fftw_complex* out = fftw_alloc_complex(bins);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(L), in, out, FFTW_ESTIMATE);

    std::vector<double> power(bins, 0.0);
    for (std::size_t start = 0; start + L <= n; start += hop) {
        double m = 0.0;
        for (std::size_t k = 0; k < L; ++k) m += series[start + k];
        m /= static_cast<double>(L);
        for (std::size_t k = 0; k < L; ++k) in[k] = (series[start + k] - m) * window[k];
        fftw_execute(plan);
        for (std::size_t f = 0; f < bins; ++f) power[f] += out[f][0] * out[f][0] + out[f][1] * out[f][1];
    }
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);

    // Positive frequencies 1..L/2.
    const std::size_t n_freq = bins - 1;
    double total = 0.0;
    for (std::size_t f = 1; f < bins; ++f) total += power[f];
    if (!(total > 0.0)) return 0.0;
    double H = 0.0;
    for (std::size_t f = 1; f < bins; ++f) {
        const double q = power[f] / total;
        if (q > 0.0) H -= q * std::log(q);
    }
    return std::clamp(1.0 - H / std::log(static_cast<double>(n_freq)), 0.0, 1.0);
}

double l1_distance(const EmpiricalDensity& d1, const EmpiricalDensity& d2) {
    if (d1.grid.empty() || d2.grid.empty()) throw ValidationError("l1_distance needs nonempty densities");
    auto support = [](const EmpiricalDensity& d) {
        std::size_t a = 0, b = d.mass.size();
        while (a < b && d.mass[a] == 0.0) ++a;
        while (b > a && d.mass[b - 1] == 0.0) --b;
        if (a == b) return Interval{0.0, -1.0};
        return Interval{d.grid[a] - 0.5 * d.bin_width, d.grid[b - 1] + 0.5 * d.bin_width};
    };
    const Interval s1 = support(d1), s2 = support(d2);
    if (s1.hi < s1.lo || s2.hi < s2.lo || s1.hi <= s2.lo || s2.hi <= s1.lo) return 2.0;

    const double step = std::min(d1.bin_width, d2.bin_width);
    const double lo = std::min(d1.grid.front(), d2.grid.front());
    const double hi = std::max(d1.grid.back(), d2.grid.back());
    const auto points = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        sum += std::abs(d1.at(x) - d2.at(x));
    }
    return sum * step;
}

std::vector<double> preimages(const PolynomialMap& map, double x_ref) {
    std::vector<double> c(map.coefficients().begin(), map.coefficients().end());
    c[0] -= map(x_ref);
    return real_roots(c);
}

PreimageLabel label_preimage(const PolynomialMap& map, double x_ref, double estimate) {
    const std::vector<double> roots = preimages(map, x_ref);
    if (roots.empty()) throw NumericalError("no real preimage");
    std::size_t best = 0;
    for (std::size_t k = 1; k < roots.size(); ++k)
        if (std::abs(roots[k] - estimate) < std::abs(roots[best] - estimate)) best = k;
    std::string label;
    if (roots.size() == 3) {
        static const char* names[] = {"x_L", "x_M", "x_R"};
        label = names[best];
    } else {
        label = "x_" + std::to_string(best + 1);
    }
    return {label, roots[best], std::abs(roots[best] - estimate)};
}

}  // namespace rds
