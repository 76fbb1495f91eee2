#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcm/assessment.hpp"
#include "dcm/catalog.hpp"
#include "dcm/evidence.hpp"
#include "dcm/export.hpp"
#include "dcm/sensitivity.hpp"

namespace dcm {

/// Paths and run defaults for one project, loaded from a dcm-config/1
/// file. Relative paths resolve against the config file's directory; all
/// referenced paths are checked at load time.
struct ProjectConfig {
    std::string config_dir;
    std::string catalog_path;
    std::vector<std::string> stance_paths;
    std::vector<std::string> survey_paths;
    std::optional<std::string> overrides_path;
    std::optional<std::string> ratings_path;
    std::optional<std::string> system_priors_path;
    std::string priors_path;
    std::string output_dir;
    RunConfig defaults;
    std::string default_prior = "baseline";
};

ProjectConfig load_config(const std::string& path);

/// Environment variable consulted for the default config path.
inline constexpr const char* kConfigEnvVar = "DCM_CONFIG";

/// Everything a command needs, loaded once: catalog, stances, surveys,
/// priors and the digests of each input file.
struct Project {
    ProjectConfig config;
    Catalog catalog;
    std::vector<StanceSpec> stances;
    std::vector<ExpertSurvey> surveys;
    OverrideTable overrides;
    std::vector<PriorPreset> priors;
    std::map<std::string, std::string> system_priors; // system -> label
    InputDigests digests;

    const StanceSpec* find_stance(const std::string& name) const;
    const PriorPreset* find_prior(const std::string& label) const;
    std::vector<std::string> system_ids() const; // sorted, from surveys
};

Project load_project(const ProjectConfig& config);

struct Diagnostics {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

/// Parses and compiles every stance against the catalog, cross-checks the
/// survey/override/ratings files, and warns about indicators no stance
/// reaches. Never throws for input problems; everything is collected into
/// the report. Writes nothing.
Diagnostics cmd_validate(const ProjectConfig& config);

struct AssessOptions {
    std::string system_id;
    std::optional<std::string> stance_filter;
    std::optional<std::string> prior_label;
    std::optional<int> n_runs;
    std::optional<std::uint64_t> seed;
    std::optional<Method> mode;
    bool coarse = false;
    std::optional<std::string> out_dir;
};

/// Runs the per-stance protocol for one system and writes the summary,
/// long-format runs and JSON exports. Returns the written file paths.
std::vector<std::string> cmd_assess(const Project& project,
                                    const AssessOptions& options);

enum class Weighting { Equal, Ratings };

struct AggregateOptions {
    std::string system_id;
    Weighting weighting = Weighting::Equal;
    std::optional<std::string> prior_label;
    std::optional<int> n_runs;
    std::optional<std::uint64_t> seed;
    std::optional<Method> mode;
    bool coarse = false;
    std::optional<std::string> out_dir;
};

std::vector<std::string> cmd_aggregate(const Project& project,
                                       const AggregateOptions& options);

struct SweepOptions {
    std::vector<std::string> systems; // empty = all
    std::vector<std::string> stances; // empty = all
    std::vector<std::string> priors;  // empty = all presets
    std::optional<int> n_runs;
    std::optional<std::uint64_t> seed;
    std::optional<Method> mode;
    bool coarse = false; // add the coarse-grained variant grid
    std::optional<std::string> out_dir;
};

std::vector<std::string> cmd_sweep(const Project& project,
                                   const SweepOptions& options);

} // namespace dcm
