#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcm/inference.hpp"

namespace dcm {

/// One expert's credences for one system. Abstentions are explicit
/// (indicator not in the map), never encoded as zero.
struct ExpertSurvey {
    std::string expert_id;
    std::string system_id;
    std::map<std::string, double> responses; // indicator -> credence [0,1]
};

/// Per-system aggregated credences. An indicator is missing from
/// `credences` exactly when no respondent answered it.
struct IndicatorPanel {
    std::string system_id;
    std::map<std::string, double> credences;
    std::map<std::string, int> n_respondents;
};

/// Directly specified indicator values, keyed (system, indicator). An
/// override replaces all survey responses for its cell before
/// aggregation.
using OverrideTable = std::map<std::pair<std::string, std::string>, double>;

/// Parses the long-format survey file (header "dcm-surveys/1"; columns
/// expert_id, system_id, indicator, credence; blank credence = abstain).
/// Rejects out-of-range credences and duplicate cells.
std::vector<ExpertSurvey> load_surveys(const std::string& content,
                                       const std::string& filename = "");

/// Parses the overrides file (header "dcm-overrides/1"; columns
/// system_id, indicator, value).
OverrideTable load_overrides(const std::string& content,
                             const std::string& filename = "");

/// Per-indicator arithmetic mean over non-abstaining experts; an
/// indicator is missing when every expert abstained. Order of the surveys
/// does not matter. Throws when no survey matches the system.
IndicatorPanel aggregate_panel(const std::vector<ExpertSurvey>& surveys,
                               const std::string& system_id);

/// aggregate_panel with overrides applied: survey responses for an
/// overridden (system, indicator) cell are replaced by the single
/// override value.
IndicatorPanel build_panel(const std::vector<ExpertSurvey>& surveys,
                           const OverrideTable& overrides,
                           const std::string& system_id);

/// Realizes one binary assignment: each non-missing indicator is drawn
/// present with probability equal to its mean credence, independently of
/// all others; missing indicators stay missing. Deterministic per seed.
IndicatorAssignment sample_assignment(const IndicatorPanel& panel,
                                      std::uint64_t seed);

} // namespace dcm
