// Command-line front end: generate, fit, analyze, reproduce.

#include "rds/errors.hpp"
#include "rds/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace rds;

/// Config from --config, or a preset-driven default when none is given.
ExperimentConfig resolve(const std::string& config_path, const std::string& preset, const std::string& dataset,
                         const std::string& output, const std::vector<std::uint64_t>& seeds) {
    ExperimentConfig c;
    if (!config_path.empty()) c = config_from_json(read_json(config_path));
    if (!preset.empty()) {
        c.generator = preset_generator(preset);
        c.dataset.reset();
    }
    if (!dataset.empty()) {
        c.dataset = dataset;
        c.generator.reset();
    }
    if (!output.empty()) {
        c.output = output;
    } else if (config_path.empty()) {
        c.output = default_output_root().string();
    }
    if (!seeds.empty()) {
        if (c.generator && seeds.size() == 1 && !preset.empty()) c.generator->seed = seeds.front();
        c.fit.seeds = seeds;
    }
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reconstruction and prediction of noisy polynomial dynamical systems"};
    app.require_subcommand(1);

    std::string config_path, preset, dataset, output;
    std::vector<std::uint64_t> seeds;

    auto* gen = app.add_subcommand("generate", "Write a synthetic dataset (CSV + JSON metadata)");
    gen->add_option("-c,--config", config_path, "Experiment config (JSON)");
    gen->add_option("-p,--preset", preset, "Built-in generator")->check(CLI::IsMember(preset_names()));
    gen->add_option("-o,--out", output, "Output directory");
    gen->add_option("-s,--seed", seeds, "Generator seed override")->expected(1);

    auto* fit = app.add_subcommand("fit", "Run a sampler and write its trace");
    fit->add_option("-c,--config", config_path, "Experiment config (JSON)");
    fit->add_option("-p,--preset", preset, "Generate the dataset from a preset")->check(CLI::IsMember(preset_names()));
    fit->add_option("-d,--dataset", dataset, "Existing dataset CSV");
    fit->add_option("-o,--out", output, "Output directory");
    fit->add_option("-s,--seed", seeds, "Chain seeds (one chain per seed)");

    std::vector<std::string> traces;
    auto* ana = app.add_subcommand("analyze", "Estimator, prediction and density reports for traces");
    ana->add_option("-c,--config", config_path, "Experiment config (JSON)");
    ana->add_option("-t,--traces", traces, "Trace CSV files")->required();
    ana->add_option("-d,--dataset", dataset, "Dataset CSV the traces were fitted to")->required()->check(CLI::ExistingFile);
    ana->add_option("-o,--out", output, "Output directory");

    std::string id;
    ReproduceOptions ropt;
    std::size_t iterations = 0;
    auto* rep = app.add_subcommand("reproduce", "Generate, fit and analyze a bundled experiment");
    rep->add_option("id", id, "Experiment id")->required()->check(CLI::IsMember(reproduce_ids()));
    rep->add_flag("--full", ropt.full, "Paper-scale iteration counts (5e5)");
    rep->add_option("-n,--iterations", iterations, "Override the iteration count");
    rep->add_option("-s,--seed", ropt.seed, "Chain seed");
    rep->add_option("-o,--out", output, "Output root (default $RDS_OUTPUT_ROOT or ./rds-output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*gen) {
            const ExperimentConfig c = resolve(config_path, preset, "", output, seeds);
            std::cout << cmd_generate(c).string() << '\n';
        } else if (*fit) {
            const ExperimentConfig c = resolve(config_path, preset, dataset, output, seeds);
            for (const auto& r : cmd_fit(c))
                std::cout << r.csv.string() << "  (" << r.trace.seconds_per_1000() << " s per 1000 iterations)\n";
        } else if (*ana) {
            ExperimentConfig c;
            if (!config_path.empty()) c = config_from_json(read_json(config_path));
            c.output = output.empty() ? (config_path.empty() ? default_output_root().string() : c.output) : output;
            std::vector<std::filesystem::path> paths(traces.begin(), traces.end());
            cmd_analyze(c, paths, dataset);
            std::cout << (std::filesystem::path(c.output) / "report").string() << '\n';
        } else if (*rep) {
            if (iterations > 0) ropt.iterations = iterations;
            const std::filesystem::path root = output.empty() ? default_output_root() : std::filesystem::path(output);
            cmd_reproduce(id, root, ropt);
            std::cout << (root / id).string() << '\n';
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
