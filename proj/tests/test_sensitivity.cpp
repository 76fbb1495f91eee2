#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dcm/errors.hpp"
#include "dcm/io_util.hpp"
#include "dcm/sensitivity.hpp"
#include "support/generators.hpp"

using namespace dcm;

namespace {

const std::string kDataDir = DCM_DATA_DIR;

PosteriorSummary constant_summary(double v) {
    return summarize(std::vector<double>(20, v), Provenance{});
}

SweepCell cell(const std::string& sys, const std::string& stance,
               const std::string& prior, double median) {
    return SweepCell{sys, stance, prior, "baseline",
                     constant_summary(median)};
}

} // namespace

TEST_CASE("bundled prior presets load with the expected means") {
    const auto presets = load_priors(read_file(kDataDir + "/priors.json"));
    REQUIRE(presets.size() == 5);
    std::map<std::string, const PriorPreset*> by_label;
    for (const auto& p : presets) by_label[p.label] = &p;

    CHECK(by_label.at("low")->mean() == doctest::Approx(0.1));
    CHECK(by_label.at("baseline")->mean() == doctest::Approx(1.0 / 6.0));
    CHECK(by_label.at("uniform")->mean() == doctest::Approx(0.5));
    CHECK(by_label.at("moderate")->mean() == doctest::Approx(0.5));
    CHECK(by_label.at("moderate")->alpha + by_label.at("moderate")->beta >
          by_label.at("uniform")->alpha + by_label.at("uniform")->beta);
    CHECK(by_label.at("high")->mean() == doctest::Approx(0.9));
}

TEST_CASE("malformed preset files are rejected") {
    CHECK_THROWS_AS(load_priors("{}"), SpecError);
    CHECK_THROWS_AS(
        load_priors(R"({"format":"dcm-priors/1","presets":[]})"), SpecError);
    CHECK_THROWS_AS(
        load_priors(
            R"({"format":"dcm-priors/1","presets":[{"label":"x","alpha":0,"beta":2}]})"),
        SpecError);
}

TEST_CASE("a 1x1x1 sweep yields a single complete cell") {
    Rng rng(3);
    const ModelTree tree = compile_tree(testing::random_tree(rng, 4, true));
    IndicatorPanel panel;
    panel.system_id = "solo";
    for (const auto& id : tree.indicator_ids()) panel.credences[id] = 0.8;

    RunConfig cfg;
    cfg.n_runs = 30;
    cfg.master_seed = 5;
    const SweepResult grid = prior_sweep(
        {{"solo", panel}}, {{"st", tree}},
        {PriorPreset{"baseline", 2.0, 10.0}}, cfg);
    REQUIRE(grid.cells.size() == 1);
    CHECK(grid.find("solo", "st", "baseline", "baseline") != nullptr);
    CHECK(grid.cells.front().summary.n_runs == 30);
}

TEST_CASE("sweeps are deterministic and complete over the cross-product") {
    Rng rng(12);
    const ModelTree t1 = compile_tree(testing::random_tree(rng, 4, true));
    const ModelTree t2 = compile_tree(testing::random_tree(rng, 5, true));
    std::map<std::string, IndicatorPanel> panels;
    for (const auto& sys : {"sysA", "sysB"}) {
        IndicatorPanel p;
        p.system_id = sys;
        double c = sys[3] == 'A' ? 0.8 : 0.3;
        for (const auto& id : t1.indicator_ids()) p.credences[id] = c;
        for (const auto& id : t2.indicator_ids()) p.credences[id] = c;
        panels[sys] = p;
    }
    const std::vector<PriorPreset> presets = {{"low", 2, 18},
                                              {"high", 18, 2}};
    RunConfig cfg;
    cfg.n_runs = 25;
    cfg.master_seed = 777;

    const SweepResult a =
        prior_sweep(panels, {{"s1", t1}, {"s2", t2}}, presets, cfg);
    CHECK(a.cells.size() == 2 * 2 * 2);
    for (const auto& sys : {"sysA", "sysB"})
        for (const auto& st : {"s1", "s2"})
            for (const auto& pr : {"low", "high"})
                CHECK(a.find(sys, st, pr, "baseline") != nullptr);

    const SweepResult b =
        prior_sweep(panels, {{"s1", t1}, {"s2", t2}}, presets, cfg);
    REQUIRE(a.cells.size() == b.cells.size());
    for (size_t i = 0; i < a.cells.size(); ++i)
        CHECK(a.cells[i].summary.values == b.cells[i].summary.values);
}

TEST_CASE("with common random numbers medians are monotone in the prior "
          "mean") {
    Rng rng(2025);
    const ModelTree tree = compile_tree(testing::random_tree(rng, 6, true));
    IndicatorPanel panel;
    panel.system_id = "sys";
    double c = 0.15;
    for (const auto& id : tree.indicator_ids()) {
        panel.credences[id] = c;
        c = std::fmod(c + 0.4, 1.0);
    }
    std::vector<PriorPreset> presets = {{"low", 2, 18},
                                        {"baseline", 2, 10},
                                        {"uniform", 2, 2},
                                        {"moderate", 40, 40},
                                        {"high", 18, 2}};
    RunConfig cfg;
    cfg.n_runs = 60;
    cfg.master_seed = 31;
    const SweepResult grid =
        prior_sweep({{"sys", panel}}, {{"st", tree}}, presets, cfg);

    std::stable_sort(presets.begin(), presets.end(),
                     [](const auto& a, const auto& b) {
                         return a.mean() < b.mean();
                     });
    double last = -1.0;
    for (const auto& preset : presets) {
        const SweepCell* found =
            grid.find("sys", "st", preset.label, "baseline");
        REQUIRE(found != nullptr);
        CHECK(found->summary.median >= last - 1e-13);
        last = found->summary.median;
    }
}

TEST_CASE("dominance across all cells reports a stable ordering") {
    SweepResult grid;
    for (const auto& pr : {"low", "high"}) {
        grid.cells.push_back(cell("top", "st", pr, 0.8));
        grid.cells.push_back(cell("bottom", "st", pr, 0.2));
    }
    const OrdinalReport report = ordinal_stability(
        grid, {{"low", 2, 18}, {"high", 18, 2}});
    CHECK(report.stable);
    CHECK(report.violations.empty());
    CHECK(report.ties.empty());
}

TEST_CASE("identical medians are ties, not violations") {
    SweepResult grid;
    for (const auto& pr : {"low", "high"}) {
        grid.cells.push_back(cell("a", "st", pr, 0.5));
        grid.cells.push_back(cell("b", "st", pr, 0.5));
    }
    const OrdinalReport report = ordinal_stability(
        grid, {{"low", 2, 18}, {"high", 18, 2}});
    CHECK(report.stable);
    CHECK(report.violations.empty());
    CHECK(report.ties.size() == 2);
}

TEST_CASE("a constructed crossover is flagged as exactly one violation") {
    SweepResult grid;
    grid.cells.push_back(cell("a", "st", "low", 0.7));
    grid.cells.push_back(cell("b", "st", "low", 0.3));
    grid.cells.push_back(cell("a", "st", "high", 0.4)); // order flips here
    grid.cells.push_back(cell("b", "st", "high", 0.6));
    grid.cells.push_back(cell("a", "other", "low", 0.9));
    grid.cells.push_back(cell("b", "other", "low", 0.1));
    grid.cells.push_back(cell("a", "other", "high", 0.9));
    grid.cells.push_back(cell("b", "other", "high", 0.1));

    const OrdinalReport report = ordinal_stability(
        grid, {{"low", 2, 18}, {"high", 18, 2}});
    CHECK_FALSE(report.stable);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations.front().stance == "st");
    CHECK(report.violations.front().prior_label == "high");
    CHECK(report.violations.front().system_a == "a");
    CHECK(report.violations.front().system_b == "b");
}

TEST_CASE("ordinal stability needs two systems and two presets") {
    SweepResult grid;
    grid.cells.push_back(cell("a", "st", "low", 0.5));
    CHECK_THROWS_AS(
        ordinal_stability(grid, std::vector<PriorPreset>{{"low", 2, 18}}),
        InvalidArgument);
    grid.cells.push_back(cell("a", "st", "high", 0.5));
    CHECK_THROWS_AS(ordinal_stability(grid, std::vector<PriorPreset>{
                                                {"low", 2, 18},
                                                {"high", 18, 2}}),
                    InvalidArgument);
}

TEST_CASE("update directions compare the median to the prior mean") {
    const PriorPreset baseline{"baseline", 2, 10};
    CHECK(direction_of_update(constant_summary(0.57), baseline) ==
          UpdateDirection::Confirming);
    CHECK(direction_of_update(constant_summary(0.02), baseline) ==
          UpdateDirection::Disconfirming);
    CHECK(direction_of_update(constant_summary(1.0 / 6.0), baseline) ==
          UpdateDirection::Neutral);
    // the tau band absorbs sub-noise differences
    CHECK(direction_of_update(constant_summary(1.0 / 6.0 + 0.004),
                              baseline) == UpdateDirection::Neutral);
}

TEST_CASE("coarse-graining weakens but never flips a one-sided fixture") {
    // every edge uses levels that collapse downward
    ModelTree tree;
    tree.root_id = "trait";
    tree.nodes["trait"] = {"trait", NodeKind::Trait, "",
                           SupportLevel::NoSupport, Demandingness::Neutral};
    tree.nodes["f"] = {"f", NodeKind::Feature, "trait",
                       SupportLevel::OverwhelmingSupport,
                       Demandingness::OverwhelminglyDemanding};
    for (int i = 0; i < 3; ++i) {
        const std::string id = "i" + std::to_string(i);
        tree.nodes[id] = {id, NodeKind::Indicator, "f",
                          SupportLevel::OverwhelmingSupport,
                          Demandingness::OverwhelminglyDemanding};
    }
    const ModelTree fine = compile_tree(tree);
    const ModelTree coarse = compile_tree(coarse_grain_levels(tree));

    const PriorConfig prior{2.0, 10.0, "baseline"};
    IndicatorAssignment all_present, all_absent;
    for (int i = 0; i < 3; ++i) {
        all_present.set("i" + std::to_string(i), true);
        all_absent.set("i" + std::to_string(i), false);
    }

    const double m = prior.mean();
    const double fine_up =
        exact_posterior(fine, all_present, prior).probability;
    const double coarse_up =
        exact_posterior(coarse, all_present, prior).probability;
    CHECK(fine_up > m);
    CHECK(coarse_up > m);                        // direction preserved
    CHECK(std::abs(coarse_up - m) < std::abs(fine_up - m));

    const double fine_down =
        exact_posterior(fine, all_absent, prior).probability;
    const double coarse_down =
        exact_posterior(coarse, all_absent, prior).probability;
    CHECK(fine_down < m);
    CHECK(coarse_down < m);
    CHECK(std::abs(coarse_down - m) < std::abs(fine_down - m));
}
