#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "dcm/cli.hpp"
#include "dcm/errors.hpp"
#include "dcm/io_util.hpp"
#include "dcm/version.hpp"

namespace {

// Exit codes: 0 ok, 1 validation errors, 2 runtime errors, 3 convergence
// warnings present (sampled mode).
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitConvergence = 3;

std::string default_config_path(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv(dcm::kConfigEnvVar)) return env;
    return "data/config.json";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical Bayesian assessment of stance-based "
                 "indicator evidence"};
    app.set_version_flag("--version",
                         std::string(dcm::kToolName) + " " + dcm::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "Project config file (default: $DCM_CONFIG or "
                   "data/config.json)");

    std::string system, stance, prior, weights = "equal", out, mode;
    int runs = -1;
    long long seed = -1;
    bool coarse = false;

    auto add_common = [&](CLI::App* sc, bool with_system) {
        if (with_system)
            sc->add_option("--system", system, "System id")->required();
        sc->add_option("--prior", prior, "Prior preset label");
        sc->add_option("--runs", runs, "Indicator realizations per stance");
        sc->add_option("--seed", seed, "Master seed");
        sc->add_option("--mode", mode, "Inference mode: exact or sampled")
            ->check(CLI::IsMember({"exact", "sampled"}));
        sc->add_flag("--coarse", coarse,
                     "Use the five-category collapsed scales");
        sc->add_option("--out", out, "Output directory");
    };

    auto* validate =
        app.add_subcommand("validate", "Parse and compile every input; "
                                       "report diagnostics");
    auto* assess = app.add_subcommand(
        "assess", "Per-stance posterior summaries for one system");
    add_common(assess, true);
    assess->add_option("--stance", stance, "Only this stance");

    auto* aggregate = app.add_subcommand(
        "aggregate", "All-stances-considered posterior for one system");
    add_common(aggregate, true);
    aggregate
        ->add_option("--weights", weights,
                     "Stance weighting: equal or ratings")
        ->check(CLI::IsMember({"equal", "ratings"}));

    auto* sweep = app.add_subcommand(
        "sweep", "Cross-product grid over systems, stances and priors");
    add_common(sweep, false);
    std::vector<std::string> sweep_systems, sweep_stances, sweep_priors;
    sweep->add_option("--system", sweep_systems, "Systems (default: all)");
    sweep->add_option("--stance", sweep_stances, "Stances (default: all)");
    sweep->add_option("--priors", sweep_priors,
                      "Prior preset labels (default: all)");

    CLI11_PARSE(app, argc, argv);

    try {
        const dcm::ProjectConfig cfg =
            dcm::load_config(default_config_path(config_path));

        if (validate->parsed()) {
            const dcm::Diagnostics diag = dcm::cmd_validate(cfg);
            for (const auto& w : diag.warnings)
                std::cout << "warning: " << w << "\n";
            for (const auto& e : diag.errors)
                std::cerr << "error: " << e << "\n";
            std::cout << diag.errors.size() << " error(s), "
                      << diag.warnings.size() << " warning(s)\n";
            return diag.ok() ? kExitOk : kExitValidation;
        }

        const dcm::Project project = dcm::load_project(cfg);

        auto opt_str = [](const std::string& s) {
            return s.empty() ? std::nullopt
                             : std::optional<std::string>(s);
        };
        auto opt_mode = [&]() -> std::optional<dcm::Method> {
            if (mode.empty()) return std::nullopt;
            return mode == "exact" ? dcm::Method::Exact
                                   : dcm::Method::Sampled;
        };
        auto opt_runs = [&]() -> std::optional<int> {
            return runs < 0 ? std::nullopt : std::optional<int>(runs);
        };
        auto opt_seed = [&]() -> std::optional<std::uint64_t> {
            return seed < 0 ? std::nullopt
                            : std::optional<std::uint64_t>(
                                  (std::uint64_t)seed);
        };

        std::vector<std::string> written;
        if (assess->parsed()) {
            dcm::AssessOptions options;
            options.system_id = system;
            options.stance_filter = opt_str(stance);
            options.prior_label = opt_str(prior);
            options.n_runs = opt_runs();
            options.seed = opt_seed();
            options.mode = opt_mode();
            options.coarse = coarse;
            options.out_dir = opt_str(out);
            written = dcm::cmd_assess(project, options);
        } else if (aggregate->parsed()) {
            dcm::AggregateOptions options;
            options.system_id = system;
            options.weighting = weights == "ratings"
                                    ? dcm::Weighting::Ratings
                                    : dcm::Weighting::Equal;
            options.prior_label = opt_str(prior);
            options.n_runs = opt_runs();
            options.seed = opt_seed();
            options.mode = opt_mode();
            options.coarse = coarse;
            options.out_dir = opt_str(out);
            written = dcm::cmd_aggregate(project, options);
        } else if (sweep->parsed()) {
            dcm::SweepOptions options;
            options.systems = sweep_systems;
            options.stances = sweep_stances;
            options.priors = sweep_priors;
            options.n_runs = opt_runs();
            options.seed = opt_seed();
            options.mode = opt_mode();
            options.coarse = coarse;
            options.out_dir = opt_str(out);
            written = dcm::cmd_sweep(project, options);
        }

        bool convergence_warning = false;
        for (const auto& path : written) {
            std::cout << "wrote " << path << "\n";
            if (path.size() > 5 &&
                path.compare(path.size() - 5, 5, ".json") == 0) {
                // flagged runs surface as "converged": false in the JSON
                const std::string text = dcm::read_file(path);
                if (text.find("\"converged\": false") != std::string::npos)
                    convergence_warning = true;
            }
        }
        return convergence_warning ? kExitConvergence : kExitOk;
    } catch (const dcm::SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
