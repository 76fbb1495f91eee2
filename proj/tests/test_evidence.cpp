#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dcm/errors.hpp"
#include "dcm/evidence.hpp"

using namespace dcm;

namespace {

const std::string kSurveys =
    "# dcm-surveys/1\n"
    "expert_id,system_id,indicator,credence\n"
    "e1,sysA,ind1,0.8\n"
    "e1,sysA,ind2,0.5\n"
    "e1,sysA,ind3,\n"
    "e2,sysA,ind1,0.6\n"
    "e2,sysA,ind2,0.7\n"
    "e2,sysA,ind3,\n"
    "e1,sysB,ind1,1.0\n";

} // namespace

TEST_CASE("survey loading splits rows into per-(expert,system) surveys") {
    const auto surveys = load_surveys(kSurveys);
    CHECK(surveys.size() == 3); // e1/sysA, e2/sysA, e1/sysB
    const auto& first = surveys.front();
    CHECK(first.responses.size() == 2); // blank ind3 = abstain, not zero
    CHECK(first.responses.count("ind3") == 0);
}

TEST_CASE("survey validation catches schema problems") {
    CHECK_THROWS_WITH_AS(
        load_surveys("# dcm-surveys/1\n"
                     "expert_id,system_id,indicator,credence\n"
                     "e1,s,i,1.3\n"),
        doctest::Contains("outside [0,1]"), SpecError);

    CHECK_THROWS_WITH_AS(
        load_surveys("# dcm-surveys/1\n"
                     "expert_id,system_id,indicator,credence\n"
                     "e1,s,i,0.5\n"
                     "e1,s,i,0.6\n"),
        doctest::Contains("duplicate cell"), SpecError);

    CHECK_THROWS_WITH_AS(load_surveys("expert_id,system_id,indicator,"
                                      "credence\ne1,s,i,0.5\n"),
                         doctest::Contains("dcm-surveys/1"), SpecError);

    CHECK_THROWS_WITH_AS(
        load_surveys("# dcm-surveys/1\nwrong,header,row,here,x\n"),
        doctest::Contains("column header"), SpecError);
}

TEST_CASE("aggregation takes the mean over non-abstaining experts") {
    const auto surveys = load_surveys(kSurveys);
    const IndicatorPanel panel = aggregate_panel(surveys, "sysA");
    CHECK(panel.credences.at("ind1") == doctest::Approx(0.7));
    CHECK(panel.credences.at("ind2") == doctest::Approx(0.6));
    CHECK(panel.credences.count("ind3") == 0); // all abstained -> missing
    CHECK(panel.n_respondents.at("ind1") == 2);
}

TEST_CASE("single-expert panel equals that survey") {
    const auto surveys = load_surveys(kSurveys);
    const IndicatorPanel panel = aggregate_panel(surveys, "sysB");
    CHECK(panel.credences.size() == 1);
    CHECK(panel.credences.at("ind1") == 1.0);
}

TEST_CASE("aggregation is permutation-invariant") {
    auto surveys = load_surveys(kSurveys);
    const IndicatorPanel a = aggregate_panel(surveys, "sysA");
    std::reverse(surveys.begin(), surveys.end());
    const IndicatorPanel b = aggregate_panel(surveys, "sysA");
    CHECK(a.credences == b.credences);
}

TEST_CASE("aggregation requires at least one survey for the system") {
    const auto surveys = load_surveys(kSurveys);
    CHECK_THROWS_AS(aggregate_panel(surveys, "nope"), InvalidArgument);
}

TEST_CASE("overrides replace survey responses before aggregation") {
    const auto surveys = load_surveys(kSurveys);
    const auto overrides = load_overrides(
        "# dcm-overrides/1\nsystem_id,indicator,value\nsysA,ind1,0\n");
    const IndicatorPanel panel = build_panel(surveys, overrides, "sysA");
    CHECK(panel.credences.at("ind1") == 0.0);
    CHECK(panel.n_respondents.at("ind1") == 1);
    CHECK(panel.credences.at("ind2") == doctest::Approx(0.6));
}

TEST_CASE("degenerate credences sample deterministically") {
    IndicatorPanel panel;
    panel.system_id = "s";
    panel.credences = {{"always", 1.0}, {"never", 0.0}};
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const IndicatorAssignment a = sample_assignment(panel, seed);
        CHECK(a.get("always") == IndicatorState::Present);
        CHECK(a.get("never") == IndicatorState::Absent);
    }
}

TEST_CASE("presence frequency converges to the credence") {
    IndicatorPanel panel;
    panel.system_id = "s";
    panel.credences = {{"x", 0.7}};
    int hits = 0;
    const int n = 10000;
    for (int seed = 0; seed < n; ++seed)
        if (sample_assignment(panel, (std::uint64_t)seed).get("x") ==
            IndicatorState::Present)
            ++hits;
    const double freq = (double)hits / n;
    CHECK(freq >= 0.68);
    CHECK(freq <= 0.72);
}

TEST_CASE("binomial three-sigma band holds across credences") {
    const int n = 10000;
    for (double credence : {0.1, 0.35, 0.5, 0.9}) {
        IndicatorPanel panel;
        panel.system_id = "s";
        panel.credences = {{"x", credence}};
        int hits = 0;
        for (int seed = 0; seed < n; ++seed)
            if (sample_assignment(panel, (std::uint64_t)seed).get("x") ==
                IndicatorState::Present)
                ++hits;
        const double sigma = std::sqrt(credence * (1 - credence) / n);
        CHECK(std::abs((double)hits / n - credence) <= 3.0 * sigma);
    }
}

TEST_CASE("draws for distinct indicators are uncorrelated") {
    IndicatorPanel panel;
    panel.system_id = "s";
    panel.credences = {{"a", 0.5}, {"b", 0.5}, {"c", 0.3}};
    const int n = 10000;
    double sum_a = 0, sum_b = 0, sum_ab = 0;
    for (int seed = 0; seed < n; ++seed) {
        const IndicatorAssignment x =
            sample_assignment(panel, (std::uint64_t)seed);
        const double a = x.get("a") == IndicatorState::Present ? 1.0 : 0.0;
        const double b = x.get("b") == IndicatorState::Present ? 1.0 : 0.0;
        sum_a += a;
        sum_b += b;
        sum_ab += a * b;
    }
    const double ma = sum_a / n, mb = sum_b / n;
    const double cov = sum_ab / n - ma * mb;
    const double corr =
        cov / std::sqrt(ma * (1 - ma) * mb * (1 - mb));
    CHECK(std::abs(corr) <= 3.0 / std::sqrt((double)n));
}

TEST_CASE("missing indicators stay missing in every draw") {
    IndicatorPanel panel;
    panel.system_id = "s";
    panel.credences = {{"x", 0.5}};
    const IndicatorAssignment a = sample_assignment(panel, 1);
    CHECK(a.get("unseen") == IndicatorState::Missing);
}

TEST_CASE("sampling an empty panel is an error") {
    IndicatorPanel panel;
    panel.system_id = "s";
    CHECK_THROWS_AS(sample_assignment(panel, 1), InvalidArgument);
}
