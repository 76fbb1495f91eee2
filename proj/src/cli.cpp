#include "dcm/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dcm/errors.hpp"
#include "dcm/io_util.hpp"
#include "dcm/rng.hpp"

namespace dcm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve(const std::string& dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return p.string();
    return (fs::path(dir) / p).lexically_normal().string();
}

Method mode_from_string(const std::string& s) {
    if (s == "exact") return Method::Exact;
    if (s == "sampled") return Method::Sampled;
    throw SpecError("mode must be 'exact' or 'sampled', got '" + s + "'");
}

} // namespace

ProjectConfig load_config(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw SpecError(path, "syntax error at byte " + std::to_string(e.byte) +
                                  ": " + e.what());
    }
    if (doc.value("format", "") != "dcm-config/1")
        throw SpecError(path, "expected a dcm-config/1 document");

    ProjectConfig cfg;
    cfg.config_dir = fs::path(path).parent_path().string();
    if (cfg.config_dir.empty()) cfg.config_dir = ".";

    cfg.catalog_path = resolve(cfg.config_dir, doc.at("catalog"));
    cfg.priors_path = resolve(cfg.config_dir, doc.at("priors"));
    cfg.output_dir = resolve(cfg.config_dir, doc.value("output_dir", "out"));

    if (doc.contains("stances_dir")) {
        const std::string dir =
            resolve(cfg.config_dir, doc["stances_dir"].get<std::string>());
        if (!fs::is_directory(dir))
            throw SpecError(path, "stances_dir '" + dir +
                                      "' is not a directory");
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".json")
                cfg.stance_paths.push_back(entry.path().string());
        std::sort(cfg.stance_paths.begin(), cfg.stance_paths.end());
    }
    for (const auto& p : doc.value("stances", json::array()))
        cfg.stance_paths.push_back(
            resolve(cfg.config_dir, p.get<std::string>()));

    for (const auto& p : doc.at("surveys"))
        cfg.survey_paths.push_back(
            resolve(cfg.config_dir, p.get<std::string>()));

    if (doc.contains("overrides"))
        cfg.overrides_path =
            resolve(cfg.config_dir, doc["overrides"].get<std::string>());
    if (doc.contains("ratings"))
        cfg.ratings_path =
            resolve(cfg.config_dir, doc["ratings"].get<std::string>());
    if (doc.contains("system_priors"))
        cfg.system_priors_path = resolve(
            cfg.config_dir, doc["system_priors"].get<std::string>());

    if (doc.contains("defaults")) {
        const auto& d = doc["defaults"];
        cfg.defaults.n_runs = d.value("n_runs", cfg.defaults.n_runs);
        cfg.defaults.master_seed =
            d.value("master_seed", cfg.defaults.master_seed);
        cfg.defaults.concentration =
            d.value("concentration", cfg.defaults.concentration);
        cfg.defaults.sampler.n_samples =
            d.value("n_samples", cfg.defaults.sampler.n_samples);
        cfg.defaults.sampler.n_chains =
            d.value("n_chains", cfg.defaults.sampler.n_chains);
        if (d.contains("mode"))
            cfg.defaults.mode = mode_from_string(d["mode"]);
        cfg.default_prior = d.value("prior", cfg.default_prior);
    }

    std::vector<std::string> required = {cfg.catalog_path, cfg.priors_path};
    required.insert(required.end(), cfg.stance_paths.begin(),
                    cfg.stance_paths.end());
    required.insert(required.end(), cfg.survey_paths.begin(),
                    cfg.survey_paths.end());
    if (cfg.overrides_path) required.push_back(*cfg.overrides_path);
    if (cfg.ratings_path) required.push_back(*cfg.ratings_path);
    if (cfg.system_priors_path) required.push_back(*cfg.system_priors_path);
    for (const auto& p : required)
        if (!fs::exists(p))
            throw SpecError(path, "referenced path does not exist: " + p);
    if (cfg.stance_paths.empty())
        throw SpecError(path, "no stance files configured");
    return cfg;
}

const StanceSpec* Project::find_stance(const std::string& name) const {
    for (const auto& st : stances)
        if (st.name == name) return &st;
    return nullptr;
}

const PriorPreset* Project::find_prior(const std::string& label) const {
    for (const auto& p : priors)
        if (p.label == label) return &p;
    return nullptr;
}

std::vector<std::string> Project::system_ids() const {
    std::set<std::string> ids;
    for (const auto& s : surveys) ids.insert(s.system_id);
    return {ids.begin(), ids.end()};
}

Project load_project(const ProjectConfig& config) {
    Project project;
    project.config = config;

    const std::string catalog_text = read_file(config.catalog_path);
    project.digests.add(config.catalog_path, catalog_text);
    project.catalog = parse_catalog(catalog_text);

    for (const auto& path : config.stance_paths) {
        const std::string text = read_file(path);
        project.digests.add(path, text);
        StanceSpec stance = parse_stance(text);
        validate_stance(stance, project.catalog);
        project.stances.push_back(std::move(stance));
    }

    for (const auto& path : config.survey_paths) {
        const std::string text = read_file(path);
        project.digests.add(path, text);
        auto part = load_surveys(text, path);
        project.surveys.insert(project.surveys.end(), part.begin(),
                               part.end());
    }

    if (config.overrides_path) {
        const std::string text = read_file(*config.overrides_path);
        project.digests.add(*config.overrides_path, text);
        project.overrides = load_overrides(text, *config.overrides_path);
    }

    const std::string priors_text = read_file(config.priors_path);
    project.digests.add(config.priors_path, priors_text);
    project.priors = load_priors(priors_text);

    if (config.system_priors_path) {
        const std::string text = read_file(*config.system_priors_path);
        project.digests.add(*config.system_priors_path, text);
        project.system_priors = load_system_priors(text);
    }

    return project;
}

Diagnostics cmd_validate(const ProjectConfig& config) {
    Diagnostics diag;

    Catalog catalog;
    bool have_catalog = false;
    try {
        catalog = parse_catalog(read_file(config.catalog_path));
        have_catalog = true;
    } catch (const std::exception& e) {
        diag.errors.push_back(std::string(e.what()));
    }

    std::vector<StanceSpec> stances;
    for (const auto& path : config.stance_paths) {
        try {
            StanceSpec stance = parse_stance(read_file(path));
            if (have_catalog) {
                validate_stance(stance, catalog);
                // the compile path must succeed end to end
                compile_tree(assemble_tree(stance, catalog),
                             config.defaults.concentration);
            }
            stances.push_back(std::move(stance));
        } catch (const std::exception& e) {
            diag.errors.push_back(path + ": " + e.what());
        }
    }

    std::set<std::string> known_indicators;
    if (have_catalog)
        for (const auto& id : catalog.indicator_ids())
            known_indicators.insert(id);

    for (const auto& path : config.survey_paths) {
        try {
            const auto surveys = load_surveys(read_file(path), path);
            for (const auto& survey : surveys)
                for (const auto& [indicator, credence] : survey.responses) {
                    (void)credence;
                    if (have_catalog && !known_indicators.count(indicator))
                        diag.errors.push_back(
                            path + ": unknown indicator '" + indicator +
                            "' (expert " + survey.expert_id + ", system " +
                            survey.system_id + ")");
                }
        } catch (const std::exception& e) {
            diag.errors.push_back(std::string(e.what()));
        }
    }

    if (config.overrides_path) {
        try {
            const auto overrides =
                load_overrides(read_file(*config.overrides_path),
                               *config.overrides_path);
            for (const auto& [key, value] : overrides) {
                (void)value;
                if (have_catalog && !known_indicators.count(key.second))
                    diag.errors.push_back(*config.overrides_path +
                                          ": unknown indicator '" +
                                          key.second + "'");
            }
        } catch (const std::exception& e) {
            diag.errors.push_back(std::string(e.what()));
        }
    }

    if (config.ratings_path) {
        try {
            const auto ratings =
                load_ratings(read_file(*config.ratings_path),
                             *config.ratings_path);
            for (const auto& [stance, scores] : ratings) {
                (void)scores;
                const bool known = std::any_of(
                    stances.begin(), stances.end(),
                    [&](const StanceSpec& s) { return s.name == stance; });
                if (!known)
                    diag.warnings.push_back(*config.ratings_path +
                                            ": ratings column '" + stance +
                                            "' matches no stance file");
            }
        } catch (const std::exception& e) {
            diag.errors.push_back(std::string(e.what()));
        }
    }

    std::vector<PriorPreset> presets;
    try {
        presets = load_priors(read_file(config.priors_path));
    } catch (const std::exception& e) {
        diag.errors.push_back(std::string(e.what()));
    }

    if (config.system_priors_path) {
        try {
            const auto assignments = load_system_priors(
                read_file(*config.system_priors_path));
            for (const auto& [system, label] : assignments) {
                const bool known = std::any_of(
                    presets.begin(), presets.end(),
                    [&](const PriorPreset& p) { return p.label == label; });
                if (!known)
                    diag.errors.push_back(*config.system_priors_path +
                                          ": system '" + system +
                                          "' names unknown preset '" +
                                          label + "'");
            }
        } catch (const std::exception& e) {
            diag.errors.push_back(std::string(e.what()));
        }
    }

    if (have_catalog && !stances.empty()) {
        const auto reachable = reachable_indicators(stances, catalog);
        const std::set<std::string> reached(reachable.begin(),
                                            reachable.end());
        for (const auto& id : catalog.indicator_ids())
            if (!reached.count(id))
                diag.warnings.push_back("catalog indicator '" + id +
                                        "' is referenced by no stance");
    }

    return diag;
}

namespace {

struct RunPlan {
    RunConfig run;
    PriorPreset prior;
    std::string out_dir;
    std::string suffix; // "", "_coarse"
};

RunPlan make_plan(const Project& project,
                  const std::optional<std::string>& prior_label,
                  const std::optional<int>& n_runs,
                  const std::optional<std::uint64_t>& seed,
                  const std::optional<Method>& mode, bool coarse,
                  const std::optional<std::string>& out_dir) {
    RunPlan plan;
    plan.run = project.config.defaults;
    if (n_runs) plan.run.n_runs = *n_runs;
    if (seed) plan.run.master_seed = *seed;
    if (mode) plan.run.mode = *mode;

    const std::string label =
        prior_label.value_or(project.config.default_prior);
    const PriorPreset* preset = project.find_prior(label);
    if (!preset) throw InvalidArgument("unknown prior label '" + label + "'");
    plan.prior = *preset;

    plan.out_dir = out_dir.value_or(project.config.output_dir);
    fs::create_directories(plan.out_dir);
    plan.suffix = coarse ? "_coarse" : "";
    return plan;
}

ModelTree stance_tree(const Project& project, const StanceSpec& stance,
                      bool coarse, double concentration) {
    ModelTree tree = assemble_tree(stance, project.catalog);
    if (coarse) tree = coarse_grain_levels(tree);
    return compile_tree(tree, concentration);
}

} // namespace

std::vector<std::string> cmd_assess(const Project& project,
                                    const AssessOptions& options) {
    const RunPlan plan =
        make_plan(project, options.prior_label, options.n_runs, options.seed,
                  options.mode, options.coarse, options.out_dir);

    const IndicatorPanel panel =
        build_panel(project.surveys, project.overrides, options.system_id);

    std::vector<SweepCell> cells;
    for (const auto& stance : project.stances) {
        if (options.stance_filter && stance.name != *options.stance_filter)
            continue;
        const ModelTree tree = stance_tree(project, stance, options.coarse,
                                           plan.run.concentration);
        SweepCell cell;
        cell.system_id = options.system_id;
        cell.stance = stance.name;
        cell.prior_label = plan.prior.label;
        cell.variant = options.coarse ? "coarse" : "baseline";
        cell.summary = run_stance(tree, panel, plan.prior.to_prior(),
                                  plan.run, stance.name);
        cells.push_back(std::move(cell));
    }
    if (cells.empty())
        throw InvalidArgument("no stance matches '" +
                              options.stance_filter.value_or("") + "'");

    const std::string base = plan.out_dir + "/assess_" + options.system_id +
                             "_" + plan.prior.label + plan.suffix;
    const std::vector<std::string> written = {
        base + ".summary.csv", base + ".runs.csv", base + ".json",
        plan.out_dir + "/panel_" + options.system_id + ".csv"};
    write_file(written[0], summary_csv(cells, plan.run.master_seed,
                                       project.digests));
    write_file(written[1],
               runs_csv(cells, plan.run.master_seed, project.digests));
    write_file(written[2], summary_json(cells, plan.run.master_seed,
                                        project.digests));
    write_file(written[3],
               panel_csv(panel, plan.run.master_seed, project.digests));
    return written;
}

std::vector<std::string> cmd_aggregate(const Project& project,
                                       const AggregateOptions& options) {
    const RunPlan plan =
        make_plan(project, options.prior_label, options.n_runs, options.seed,
                  options.mode, options.coarse, options.out_dir);

    const IndicatorPanel panel =
        build_panel(project.surveys, project.overrides, options.system_id);

    std::map<std::string, PosteriorSummary> summaries;
    for (const auto& stance : project.stances) {
        const ModelTree tree = stance_tree(project, stance, options.coarse,
                                           plan.run.concentration);
        summaries[stance.name] = run_stance(
            tree, panel, plan.prior.to_prior(), plan.run, stance.name);
    }

    StanceWeights weights;
    std::string weighting_label;
    if (options.weighting == Weighting::Equal) {
        weighting_label = "equal";
        for (const auto& stance : project.stances)
            weights.weights[stance.name] =
                1.0 / (double)project.stances.size();
    } else {
        weighting_label = "ratings";
        if (!project.config.ratings_path)
            throw InvalidArgument(
                "ratings weighting requested but no ratings file is "
                "configured");
        const auto ratings =
            load_ratings(read_file(*project.config.ratings_path),
                         *project.config.ratings_path);
        std::map<std::string, std::vector<double>> scoped;
        for (const auto& stance : project.stances) {
            auto it = ratings.find(stance.name);
            if (it == ratings.end())
                throw InvalidArgument("no ratings column for stance '" +
                                      stance.name + "'");
            scoped[stance.name] = it->second;
        }
        weights = weights_from_ratings(scoped);
    }

    const std::uint64_t pool_seed = derive_seed(
        plan.run.master_seed, "pool", options.system_id);
    const PosteriorSummary pooled =
        aggregate_stances(summaries, weights, kDefaultPoolSize, pool_seed);
    const double median_avg = weighted_median_average(summaries, weights);

    SweepCell cell;
    cell.system_id = options.system_id;
    cell.stance = "aggregate_" + weighting_label;
    cell.prior_label = plan.prior.label;
    cell.variant = options.coarse ? "coarse" : "baseline";
    cell.summary = pooled;

    nlohmann::ordered_json doc;
    doc["format"] = "dcm-export/1";
    doc["kind"] = "aggregate";
    doc["system"] = options.system_id;
    doc["prior"] = plan.prior.label;
    doc["weighting"] = weighting_label;
    doc["seed"] = plan.run.master_seed;
    doc["pool_seed"] = pool_seed;
    doc["pool_size"] = kDefaultPoolSize;
    doc["inputs"] = project.digests.joined();
    auto jweights = nlohmann::ordered_json::object();
    for (const auto& [stance, weight] : weights.weights)
        jweights[stance] = weight;
    doc["weights"] = std::move(jweights);
    doc["pooled"] = {{"median", pooled.median}, {"mean", pooled.mean},
                     {"q05", pooled.q05},       {"q25", pooled.q25},
                     {"q75", pooled.q75},       {"q95", pooled.q95}};
    doc["weighted_median_average"] = median_avg;
    auto jstances = nlohmann::ordered_json::object();
    for (const auto& [stance, summary] : summaries)
        jstances[stance] = {{"median", summary.median},
                            {"mean", summary.mean}};
    doc["stances"] = std::move(jstances);

    const std::string base = plan.out_dir + "/aggregate_" +
                             options.system_id + "_" + plan.prior.label +
                             "_" + weighting_label + plan.suffix;
    const std::vector<std::string> written = {base + ".json",
                                              base + ".summary.csv"};
    write_file(written[0], doc.dump(1) + "\n");
    write_file(written[1], summary_csv({cell}, plan.run.master_seed,
                                       project.digests));
    return written;
}

std::vector<std::string> cmd_sweep(const Project& project,
                                   const SweepOptions& options) {
    const RunPlan plan =
        make_plan(project, std::nullopt, options.n_runs, options.seed,
                  options.mode, false, options.out_dir);

    std::vector<std::string> systems = options.systems;
    if (systems.empty()) systems = project.system_ids();

    std::map<std::string, IndicatorPanel> panels;
    for (const auto& system : systems)
        panels[system] =
            build_panel(project.surveys, project.overrides, system);

    std::vector<PriorPreset> presets;
    if (options.priors.empty()) {
        presets = project.priors;
    } else {
        for (const auto& label : options.priors) {
            const PriorPreset* p = project.find_prior(label);
            if (!p)
                throw InvalidArgument("unknown prior label '" + label + "'");
            presets.push_back(*p);
        }
    }

    auto selected = [&](const StanceSpec& s) {
        return options.stances.empty() ||
               std::find(options.stances.begin(), options.stances.end(),
                         s.name) != options.stances.end();
    };

    std::map<std::string, ModelTree> trees;
    std::map<std::string, ModelTree> coarse_trees;
    for (const auto& stance : project.stances) {
        if (!selected(stance)) continue;
        trees[stance.name] =
            stance_tree(project, stance, false, plan.run.concentration);
        if (options.coarse)
            coarse_trees[stance.name] =
                stance_tree(project, stance, true, plan.run.concentration);
    }
    if (trees.empty()) throw InvalidArgument("no stances selected");

    SweepResult grid =
        prior_sweep(panels, trees, presets, plan.run, "baseline");
    if (options.coarse) {
        SweepResult coarse_grid =
            prior_sweep(panels, coarse_trees, presets, plan.run, "coarse");
        grid.cells.insert(grid.cells.end(), coarse_grid.cells.begin(),
                          coarse_grid.cells.end());
    }

    // Per-system prior assignments, when configured: each system keeps its
    // own preset (the same indicator realizations are reused, so these
    // cells are comparable to the shared-prior grid).
    std::vector<PriorPreset> per_system_presets;
    if (!project.system_priors.empty()) {
        for (const auto& [system, panel] : panels) {
            auto it = project.system_priors.find(system);
            if (it == project.system_priors.end()) continue;
            const PriorPreset* preset = project.find_prior(it->second);
            if (!preset)
                throw InvalidArgument("system prior for '" + system +
                                      "' names unknown preset '" +
                                      it->second + "'");
            for (const auto& [stance, tree] : trees) {
                SweepCell cell;
                cell.system_id = system;
                cell.stance = stance;
                cell.prior_label = preset->label;
                cell.variant = "per_system";
                cell.summary = run_stance(tree, panel, preset->to_prior(),
                                          plan.run, stance);
                grid.cells.push_back(std::move(cell));
            }
        }
    }

    // Per-cell update directions ride along in the summary export via a
    // dedicated CSV: system,stance,prior,variant,direction.
    std::map<std::string, PriorPreset> preset_by_label;
    for (const auto& p : project.priors) preset_by_label[p.label] = p;

    std::ostringstream directions;
    directions << export_header("directions", plan.run.master_seed,
                                project.digests);
    directions << "system,stance,prior,variant,direction\n";
    for (const auto& cell : grid.cells) {
        const PriorPreset& preset = preset_by_label.at(cell.prior_label);
        directions << cell.system_id << ',' << cell.stance << ','
                   << cell.prior_label << ',' << cell.variant << ','
                   << to_string(direction_of_update(cell.summary, preset))
                   << "\n";
    }

    std::vector<std::string> written;
    const std::string base = plan.out_dir + "/sweep";
    written.push_back(base + ".summary.csv");
    write_file(written.back(), summary_csv(grid.cells, plan.run.master_seed,
                                           project.digests));
    written.push_back(base + ".runs.csv");
    write_file(written.back(),
               runs_csv(grid.cells, plan.run.master_seed, project.digests));
    written.push_back(base + ".directions.csv");
    write_file(written.back(), directions.str());

    if (systems.size() >= 2 && presets.size() >= 2) {
        // rank stability is only meaningful where systems share a prior
        SweepResult shared;
        for (const auto& cell : grid.cells)
            if (cell.variant != "per_system") shared.cells.push_back(cell);
        const OrdinalReport report = ordinal_stability(shared, presets);
        written.push_back(base + ".ordinal.csv");
        write_file(written.back(), ordinal_csv(report, plan.run.master_seed,
                                               project.digests));
    }
    return written;
}

} // namespace dcm
