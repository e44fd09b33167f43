// gpgad: run saddle searches from config files, tabulate reports, list critical points.
//
// Exit codes: 0 converged (or success), 2 ran but did not converge, 1 error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "gpgad/experiment.hpp"
#include "gpgad/problems.hpp"

namespace {

int cmd_run(const std::string& config_file, const std::optional<std::string>& seed,
            const std::optional<std::string>& output_dir, const std::optional<std::string>& mode) {
    std::ifstream in(config_file);
    if (!in) throw std::runtime_error("cannot read " + config_file);
    std::stringstream text;
    text << in.rdbuf();
    // Overrides are appended so that the key check and validation treat them like file keys.
    std::string merged;
    std::istringstream lines(text.str());
    std::string line;
    auto overridden = [&](const std::string& l) {
        const auto eq = l.find('=');
        if (eq == std::string::npos) return false;
        std::string key = l.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        return (key == "seed" && seed) || (key == "output_dir" && output_dir) || (key == "mode" && mode);
    };
    while (std::getline(lines, line))
        if (!overridden(line.substr(0, line.find('#')))) merged += line + "\n";
    if (seed) merged += "seed = " + *seed + "\n";
    if (output_dir) merged += "output_dir = " + *output_dir + "\n";
    if (mode) merged += "mode = " + *mode + "\n";

    const gpgad::ExperimentConfig cfg = gpgad::ExperimentConfig::parse(merged);
    const gpgad::ExperimentOutcome out = gpgad::run_experiment(cfg);
    std::cout << "output: " << out.directory.string() << "\n"
              << "x_sp: " << out.result.x_sp.transpose() << "\n"
              << "converged: " << (out.result.converged ? "yes" : "no") << " (" << out.result.stop_reason << ")\n"
              << "cost: " << out.result.cost << "  updates: " << out.result.updates << "\n";
    return out.result.converged ? 0 : 2;
}

int cmd_table(const std::vector<std::string>& reports, const std::string& output) {
    std::vector<std::filesystem::path> paths(reports.begin(), reports.end());
    if (output.empty() || output == "-") {
        gpgad::emit_table(paths, std::cout);
        return 0;
    }
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write " + output);
    gpgad::emit_table(paths, out);
    return 0;
}

int cmd_oracle(const std::string& name, int grid) {
    const gpgad::Problem problem = gpgad::make_problem(name);
    std::cout << "x,index\n";
    for (const auto& cp : gpgad::oracle_critical_points(problem, grid)) {
        std::cout << "\"(";
        for (Eigen::Index i = 0; i < cp.x.size(); ++i) std::printf("%s%.6f", i ? ", " : "", cp.x[i]);
        std::cout << ")\"," << cp.index << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Saddle point search with gentlest ascent dynamics on Gaussian process surrogates"};
    app.require_subcommand(1);

    std::string config_file;
    std::optional<std::string> seed, output_dir, mode;
    auto* run = app.add_subcommand("run", "Run one experiment described by a config file");
    run->add_option("config", config_file, "Config file (key = value lines)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the root seed");
    run->add_option("--output-dir", output_dir, "Override the output directory");
    run->add_option("--mode", mode, "Override the mode (reference | agpr)");

    std::vector<std::string> reports;
    std::string table_out;
    auto* table = app.add_subcommand("table", "Summarize report.json files as CSV");
    table->add_option("reports", reports, "Report files");
    table->add_option("-o,--output", table_out, "Output file (default stdout)");

    std::string problem;
    int grid = 20;
    auto* oracle = app.add_subcommand("oracle", "List critical points of a benchmark by grid-seeded Newton");
    oracle->add_option("problem", problem, "example1 | example2")->required();
    oracle->add_option("--grid", grid, "Seeds per axis")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmd_run(config_file, seed, output_dir, mode);
        if (*table) return cmd_table(reports, table_out);
        if (*oracle) return cmd_oracle(problem, grid);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
