#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gpgad/design.hpp"
#include "gpgad/gad.hpp"
#include "gpgad/types.hpp"

namespace gpgad {

/// Invalid experiment configuration. keys() names every offending key.
class ConfigError : public InputError {
public:
    ConfigError(const std::string& what, std::vector<std::string> keys)
        : InputError(what), keys_(std::move(keys)) {}
    const std::vector<std::string>& keys() const { return keys_; }

private:
    std::vector<std::string> keys_;
};

enum class RunMode { reference, agpr };

/// Everything needed to reproduce one run. Read from flat "key = value" text;
/// '#' starts a comment. Vectors are written as comma or space separated numbers.
struct ExperimentConfig {
    std::string problem = "example1";
    RunMode mode = RunMode::agpr;
    Vec start;
    std::optional<Vec> v0;  // empty means "seeded-default"
    GadConfig gad;
    ActiveLearningConfig al;
    std::uint64_t seed = 0;
    std::string output_dir = "runs";

    /// Parses and validates. Throws ConfigError listing unknown, malformed and out-of-range keys.
    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig load(const std::filesystem::path& file);

    /// Sets one key from its textual form, as the CLI overrides do. Does not validate.
    void set(const std::string& key, const std::string& value);
    void validate() const;

    /// Resolved key/value pairs; parse() of their "key = value" rendering reproduces this config.
    std::map<std::string, std::string> resolved() const;
    std::string to_text() const;

    static const std::vector<std::string>& keys();
};

struct ExperimentOutcome {
    std::filesystem::path directory;
    GadResult result;
    double wall_seconds = 0.0;
    long evaluations = 0;  // true-model queries, whatever the cost convention of the mode
};

/// Runs the configured search without touching the filesystem.
ExperimentOutcome execute(const ExperimentConfig& cfg);

/// Runs and writes trajectory.csv, designs.csv (agpr mode) and report.json into a
/// fresh subdirectory of cfg.output_dir. Throws std::runtime_error on I/O failure.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

/// Summary table of report.json files: problem, initial_point, method, x_sp, cost.
/// Rows are sorted by problem name, keeping input order within a problem; unreadable reports
/// are listed in a footer.
void emit_table(const std::vector<std::filesystem::path>& reports, std::ostream& out);

}  // namespace gpgad
