#include "dcm/evidence.hpp"

#include <set>
#include <sstream>
#include <tuple>

#include "dcm/errors.hpp"
#include "dcm/io_util.hpp"
#include "dcm/rng.hpp"

namespace dcm {

namespace {

// Yields (line number, cells) for data rows; verifies the version header
// comment and the column header.
std::vector<std::pair<int, std::vector<std::string>>> read_table(
    const std::string& content, const std::string& filename,
    const std::string& format_tag,
    const std::vector<std::string>& expected_columns) {
    std::istringstream in(content);
    std::string line;
    int lineno = 0;
    bool saw_format = false;
    bool saw_header = false;
    std::vector<std::pair<int, std::vector<std::string>>> rows;

    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (t.find(format_tag) != std::string::npos) saw_format = true;
            continue;
        }
        auto cells = split_csv_line(t);
        for (auto& c : cells) c = trim(c);
        if (!saw_header) {
            if (cells != expected_columns)
                throw SpecError(filename, "line " + std::to_string(lineno) +
                                              ": unexpected column header");
            saw_header = true;
            continue;
        }
        if (cells.size() != expected_columns.size())
            throw SpecError(filename, "line " + std::to_string(lineno) +
                                          ": expected " +
                                          std::to_string(
                                              expected_columns.size()) +
                                          " columns");
        rows.emplace_back(lineno, std::move(cells));
    }
    if (!saw_format)
        throw SpecError(filename, "missing '" + format_tag + "' header line");
    if (!saw_header) throw SpecError(filename, "missing column header");
    return rows;
}

} // namespace

std::vector<ExpertSurvey> load_surveys(const std::string& content,
                                       const std::string& filename) {
    const auto rows =
        read_table(content, filename, "dcm-surveys/1",
                   {"expert_id", "system_id", "indicator", "credence"});

    std::map<std::pair<std::string, std::string>, ExpertSurvey> by_key;
    std::set<std::tuple<std::string, std::string, std::string>> seen;

    for (const auto& [lineno, cells] : rows) {
        const std::string& expert = cells[0];
        const std::string& system = cells[1];
        const std::string& indicator = cells[2];
        const std::string& raw = cells[3];
        if (expert.empty() || system.empty() || indicator.empty())
            throw SpecError(filename, "line " + std::to_string(lineno) +
                                          ": empty id cell");
        if (!seen.insert({expert, system, indicator}).second)
            throw SpecError(filename,
                            "line " + std::to_string(lineno) +
                                ": duplicate cell (" + expert + ", " + system +
                                ", " + indicator + ")");
        auto& survey = by_key[{expert, system}];
        survey.expert_id = expert;
        survey.system_id = system;
        if (raw.empty()) continue; // abstain, not zero
        double credence = 0.0;
        try {
            credence = std::stod(raw);
        } catch (const std::exception&) {
            throw SpecError(filename, "line " + std::to_string(lineno) +
                                          ": bad credence '" + raw + "'");
        }
        if (!(credence >= 0.0 && credence <= 1.0))
            throw SpecError(filename, "line " + std::to_string(lineno) +
                                          ": credence " + raw +
                                          " outside [0,1]");
        survey.responses[indicator] = credence;
    }

    std::vector<ExpertSurvey> out;
    out.reserve(by_key.size());
    for (auto& [key, survey] : by_key) out.push_back(std::move(survey));
    return out;
}

OverrideTable load_overrides(const std::string& content,
                             const std::string& filename) {
    const auto rows = read_table(content, filename, "dcm-overrides/1",
                                 {"system_id", "indicator", "value"});
    OverrideTable table;
    for (const auto& [lineno, cells] : rows) {
        double value = 0.0;
        try {
            value = std::stod(cells[2]);
        } catch (const std::exception&) {
            throw SpecError(filename, "line " + std::to_string(lineno) +
                                          ": bad value '" + cells[2] + "'");
        }
        if (!(value >= 0.0 && value <= 1.0))
            throw SpecError(filename, "line " + std::to_string(lineno) +
                                          ": value outside [0,1]");
        if (!table.emplace(std::make_pair(cells[0], cells[1]), value).second)
            throw SpecError(filename, "line " + std::to_string(lineno) +
                                          ": duplicate override for (" +
                                          cells[0] + ", " + cells[1] + ")");
    }
    return table;
}

IndicatorPanel aggregate_panel(const std::vector<ExpertSurvey>& surveys,
                               const std::string& system_id) {
    IndicatorPanel panel;
    panel.system_id = system_id;

    bool any = false;
    std::map<std::string, double> sums;
    for (const auto& survey : surveys) {
        if (survey.system_id != system_id) continue;
        any = true;
        for (const auto& [indicator, credence] : survey.responses) {
            sums[indicator] += credence;
            panel.n_respondents[indicator] += 1;
        }
    }
    if (!any)
        throw InvalidArgument("no surveys for system '" + system_id + "'");

    for (const auto& [indicator, sum] : sums)
        panel.credences[indicator] =
            sum / panel.n_respondents.at(indicator);
    return panel;
}

IndicatorPanel build_panel(const std::vector<ExpertSurvey>& surveys,
                           const OverrideTable& overrides,
                           const std::string& system_id) {
    IndicatorPanel panel = aggregate_panel(surveys, system_id);
    for (const auto& [key, value] : overrides) {
        if (key.first != system_id) continue;
        panel.credences[key.second] = value;
        panel.n_respondents[key.second] = 1;
    }
    return panel;
}

IndicatorAssignment sample_assignment(const IndicatorPanel& panel,
                                      std::uint64_t seed) {
    if (panel.credences.empty())
        throw InvalidArgument("panel for '" + panel.system_id +
                              "' has no credences");
    Rng rng(seed);
    IndicatorAssignment assignment;
    // std::map iteration is id-sorted, so the draw stream is stable.
    for (const auto& [indicator, credence] : panel.credences)
        assignment.set(indicator, rng.bernoulli(credence));
    return assignment;
}

} // namespace dcm
