#include "rds/io.hpp"

#include "rds/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace rds {

using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw ValidationError("cannot write " + p.string());
    return out;
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw ValidationError("cannot read " + p.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& s, const fs::path& where) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ValidationError("bad number '" + s + "' in " + where.string());
    return v;
}

/// Rows of a CSV after checking the header.
std::vector<std::vector<std::string>> read_rows(const fs::path& csv, std::vector<std::string>& header) {
    std::ifstream in = open_in(csv);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty file " + csv.string());
    header = split_csv(line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw ValidationError("row width mismatch in " + csv.string() + " at row " + std::to_string(rows.size() + 1));
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

fs::path metadata_path(const fs::path& csv) {
    fs::path p = csv;
    return p.replace_extension(".json");
}

fs::path holdout_path(const fs::path& csv) {
    return csv.parent_path() / (csv.stem().string() + "_holdout.csv");
}

json to_json(const PriorSpec& prior) {
    return {{"alpha", prior.alpha}, {"beta", prior.beta}, {"a", prior.a}, {"b", prior.b}, {"M", prior.M},
            {"M0", prior.M0},
            {"p_prior", prior.p_prior == PPrior::beta_conjugate ? "beta_conjugate" : "transformed_gamma"}};
}

PriorSpec prior_from_json(const json& j) {
    PriorSpec p;
    p.alpha = j.value("alpha", p.alpha);
    p.beta = j.value("beta", p.beta);
    p.a = j.value("a", p.a);
    p.b = j.value("b", p.b);
    p.M = j.value("M", p.M);
    p.M0 = j.value("M0", p.M0);
    const std::string kind = j.value("p_prior", std::string("transformed_gamma"));
    if (kind == "transformed_gamma") {
        p.p_prior = PPrior::transformed_gamma;
    } else if (kind == "beta_conjugate") {
        p.p_prior = PPrior::beta_conjugate;
    } else {
        throw ValidationError("prior.p_prior must be transformed_gamma or beta_conjugate");
    }
    p.validate();
    return p;
}

json to_json(const GaussianMixtureNoise& noise) {
    json comps = json::array();
    for (const auto& c : noise.components()) comps.push_back({{"weight", c.weight}, {"variance", c.variance}});
    return comps;
}

GaussianMixtureNoise noise_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("noise must be a nonempty array of {weight, variance}");
    std::vector<NoiseComponent> comps;
    for (const auto& c : j) comps.push_back({c.at("weight").get<double>(), c.at("variance").get<double>()});
    return GaussianMixtureNoise(std::move(comps));
}

json to_json(const RejectionCounters& c) {
    return {{"theta_draws", c.theta_draws},
            {"theta_rejections", c.theta_rejections},
            {"x0_draws", c.x0_draws},
            {"x0_rejections", c.x0_rejections},
            {"future_draws", c.future_draws},
            {"future_rejections", c.future_rejections},
            {"p_draws", c.p_draws},
            {"p_rejections", c.p_rejections},
            {"allocation_fallbacks", c.allocation_fallbacks},
            {"interval_bound_warnings", c.interval_bound_warnings},
            {"fallback_rate", c.fallback_rate()},
            {"flagged", c.flagged()}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_dataset(const fs::path& csv, const TimeSeriesDataset& data) {
    {
        std::ofstream out = open_out(csv);
        out << "index,x\n";
        for (std::size_t i = 0; i < data.observations.size(); ++i)
            out << (i + 1) << ',' << format_double(data.observations[i]) << '\n';
    }
    if (!data.holdout.empty()) {
        std::ofstream out = open_out(holdout_path(csv));
        out << "index,x\n";
        for (std::size_t i = 0; i < data.holdout.size(); ++i)
            out << (data.n() + i + 1) << ',' << format_double(data.holdout[i]) << '\n';
    }
    json meta = {{"n", data.n()}, {"holdout", data.holdout.size()}, {"seed", data.seed}};
    if (data.x0_true) meta["x0"] = *data.x0_true;
    if (data.map_true) {
        const auto c = data.map_true->coefficients();
        meta["map"] = std::vector<double>(c.begin(), c.end());
    }
    if (data.noise_true) meta["noise"] = to_json(*data.noise_true);
    write_json(metadata_path(csv), meta);
}

TimeSeriesDataset read_dataset(const fs::path& csv) {
    auto read_series = [](const fs::path& p) {
        std::vector<std::string> header;
        const auto rows = read_rows(p, header);
        if (header.size() != 2 || header[1] != "x") throw ValidationError(p.string() + ": expected header index,x");
        std::vector<double> xs;
        xs.reserve(rows.size());
        for (const auto& r : rows) xs.push_back(parse_double(r[1], p));
        return xs;
    };
    TimeSeriesDataset d;
    d.observations = read_series(csv);
    if (fs::exists(holdout_path(csv))) d.holdout = read_series(holdout_path(csv));
    if (fs::exists(metadata_path(csv))) {
        const json meta = read_json(metadata_path(csv));
        d.seed = meta.value("seed", std::uint64_t{0});
        if (meta.contains("x0")) d.x0_true = meta["x0"].get<double>();
        if (meta.contains("map")) d.map_true = PolynomialMap(meta["map"].get<std::vector<double>>());
        if (meta.contains("noise")) d.noise_true = noise_from_json(meta["noise"]);
        if (meta.contains("n") && meta["n"].get<std::size_t>() != d.n())
            throw ValidationError(csv.string() + ": metadata n disagrees with the CSV row count");
    }
    return d;
}

void write_trace(const fs::path& csv, const ChainTrace& trace, const json& extra) {
    const auto width = static_cast<std::size_t>(trace.degree + 1);
    {
        std::ofstream out = open_out(csv);
        out << "iter";
        for (std::size_t k = 0; k < width; ++k) out << ",theta_" << k;
        out << ",x0," << trace.weight_name;
        for (std::size_t j = 1; j <= trace.horizon; ++j) out << ",x_future_" << j;
        out << ",z_pred,n_star,d_star\n";
        for (std::size_t r = 0; r < trace.size(); ++r) {
            out << trace.iter[r];
            for (std::size_t k = 0; k < width; ++k) out << ',' << format_double(trace.theta[r * width + k]);
            out << ',' << format_double(trace.x0[r]) << ',' << format_double(trace.weight[r]);
            for (std::size_t j = 0; j < trace.horizon; ++j) out << ',' << format_double(trace.future[r * trace.horizon + j]);
            out << ',' << format_double(trace.z_pred[r]) << ',' << trace.n_star[r] << ',' << trace.d_star[r] << '\n';
        }
    }
    json meta = extra.is_object() ? extra : json::object();
    meta["algorithm"] = to_string(trace.algorithm);
    meta["weight"] = trace.weight_name;
    meta["degree"] = trace.degree;
    meta["horizon"] = trace.horizon;
    meta["iterations"] = trace.iterations;
    meta["burn"] = trace.burn;
    meta["thin"] = trace.thin;
    meta["seed"] = trace.seed;
    meta["records"] = trace.size();
    meta["seconds"] = trace.seconds;
    meta["seconds_per_1000_iterations"] = trace.seconds_per_1000();
    meta["rejections"] = to_json(trace.rejections);
    write_json(metadata_path(csv), meta);
}

json read_metadata(const fs::path& csv) { return read_json(metadata_path(csv)); }

ChainTrace read_trace(const fs::path& csv) {
    std::vector<std::string> header;
    const auto rows = read_rows(csv, header);
    ChainTrace t;
    // Layout: iter, theta_0..theta_m, x0, weight, futures, z_pred, n_star, d_star.
    std::size_t k = 1;
    while (k < header.size() && header[k].rfind("theta_", 0) == 0) ++k;
    const std::size_t width = k - 1;
    if (width < 2 || header.size() < k + 5 || header[0] != "iter" || header[k] != "x0")
        throw ValidationError(csv.string() + ": not a trace CSV");
    t.degree = static_cast<int>(width) - 1;
    t.weight_name = header[k + 1];
    t.horizon = header.size() - (k + 2) - 3;
    if (t.weight_name == "p") t.algorithm = Algorithm::gsbr;
    else if (t.weight_name == "c") t.algorithm = Algorithm::rdpr;
    else if (t.weight_name == "lambda") t.algorithm = Algorithm::param;
    else throw ValidationError(csv.string() + ": unknown weight column '" + t.weight_name + "'");

    t.reserve(rows.size());
    for (const auto& r : rows) {
        t.iter.push_back(static_cast<std::size_t>(parse_double(r[0], csv)));
        for (std::size_t c = 1; c < k; ++c) t.theta.push_back(parse_double(r[c], csv));
        t.x0.push_back(parse_double(r[k], csv));
        t.weight.push_back(parse_double(r[k + 1], csv));
        for (std::size_t j = 0; j < t.horizon; ++j) t.future.push_back(parse_double(r[k + 2 + j], csv));
        const std::size_t tail = k + 2 + t.horizon;
        t.z_pred.push_back(parse_double(r[tail], csv));
        t.n_star.push_back(static_cast<int>(parse_double(r[tail + 1], csv)));
        t.d_star.push_back(static_cast<int>(parse_double(r[tail + 2], csv)));
    }
    if (fs::exists(metadata_path(csv))) {
        const json meta = read_json(metadata_path(csv));
        t.iterations = meta.value("iterations", std::size_t{0});
        t.burn = meta.value("burn", std::size_t{0});
        t.thin = meta.value("thin", std::size_t{1});
        t.seed = meta.value("seed", std::uint64_t{0});
        t.seconds = meta.value("seconds", 0.0);
        if (meta.contains("rejections")) {
            const json& r = meta["rejections"];
            auto& c = t.rejections;
            c.theta_draws = r.value("theta_draws", std::size_t{0});
            c.theta_rejections = r.value("theta_rejections", std::size_t{0});
            c.x0_draws = r.value("x0_draws", std::size_t{0});
            c.x0_rejections = r.value("x0_rejections", std::size_t{0});
            c.future_draws = r.value("future_draws", std::size_t{0});
            c.future_rejections = r.value("future_rejections", std::size_t{0});
            c.p_draws = r.value("p_draws", std::size_t{0});
            c.p_rejections = r.value("p_rejections", std::size_t{0});
            c.allocation_fallbacks = r.value("allocation_fallbacks", std::size_t{0});
            c.interval_bound_warnings = r.value("interval_bound_warnings", std::size_t{0});
        }
    }
    return t;
}

void write_density(const fs::path& csv, const EmpiricalDensity& density) {
    std::ofstream out = open_out(csv);
    out << "grid,mass\n";
    for (std::size_t i = 0; i < density.grid.size(); ++i)
        out << format_double(density.grid[i]) << ',' << format_double(density.mass[i]) << '\n';
}

EmpiricalDensity read_density(const fs::path& csv) {
    std::vector<std::string> header;
    const auto rows = read_rows(csv, header);
    if (header != std::vector<std::string>{"grid", "mass"}) throw ValidationError(csv.string() + ": expected grid,mass");
    EmpiricalDensity d;
    for (const auto& r : rows) {
        d.grid.push_back(parse_double(r[0], csv));
        d.mass.push_back(parse_double(r[1], csv));
    }
    d.bin_width = d.grid.size() > 1 ? d.grid[1] - d.grid[0] : 1.0;
    return d;
}

void write_table(const fs::path& csv, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out = open_out(csv);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
    }
}

}  // namespace rds
