#include "dcm/sensitivity.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "dcm/errors.hpp"

namespace dcm {

using nlohmann::json;

std::vector<PriorPreset> load_priors(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw SpecError("priors: syntax error at byte " +
                        std::to_string(e.byte) + ": " + e.what());
    }
    if (doc.value("format", "") != "dcm-priors/1")
        throw SpecError("priors: expected a dcm-priors/1 document");

    std::vector<PriorPreset> out;
    for (const auto& jp : doc.at("presets")) {
        PriorPreset p;
        p.label = jp.at("label").get<std::string>();
        p.alpha = jp.at("alpha").get<double>();
        p.beta = jp.at("beta").get<double>();
        if (!(p.alpha > 0.0) || !(p.beta > 0.0))
            throw SpecError("priors: preset '" + p.label +
                            "' needs positive alpha and beta");
        out.push_back(p);
    }
    if (out.empty()) throw SpecError("priors: no presets");
    return out;
}

std::map<std::string, std::string> load_system_priors(
    const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw SpecError("system priors: syntax error at byte " +
                        std::to_string(e.byte) + ": " + e.what());
    }
    if (doc.value("format", "") != "dcm-system-priors/1")
        throw SpecError(
            "system priors: expected a dcm-system-priors/1 document");
    std::map<std::string, std::string> out;
    for (const auto& [system, label] : doc.at("systems").items())
        out[system] = label.get<std::string>();
    if (out.empty()) throw SpecError("system priors: no systems");
    return out;
}

const SweepCell* SweepResult::find(const std::string& system,
                                   const std::string& stance,
                                   const std::string& prior,
                                   const std::string& variant) const {
    for (const auto& c : cells)
        if (c.system_id == system && c.stance == stance &&
            c.prior_label == prior && c.variant == variant)
            return &c;
    return nullptr;
}

SweepResult prior_sweep(
    const std::map<std::string, IndicatorPanel>& systems,
    const std::map<std::string, ModelTree>& stance_trees,
    const std::vector<PriorPreset>& presets, const RunConfig& config,
    const std::string& variant) {
    if (systems.empty() || stance_trees.empty() || presets.empty())
        throw InvalidArgument("prior_sweep needs systems, stances and "
                              "presets");

    SweepResult result;
    for (const auto& [system, panel] : systems) {
        for (const auto& [stance, tree] : stance_trees) {
            for (const auto& preset : presets) {
                SweepCell cell;
                cell.system_id = system;
                cell.stance = stance;
                cell.prior_label = preset.label;
                cell.variant = variant;
                cell.summary = run_stance(tree, panel, preset.to_prior(),
                                          config, stance);
                result.cells.push_back(std::move(cell));
            }
        }
    }
    return result;
}

OrdinalReport ordinal_stability(const SweepResult& result,
                                const std::vector<PriorPreset>& presets) {
    if (presets.size() < 2)
        throw InvalidArgument("ordinal_stability needs at least 2 presets");

    // medians[(variant, stance)][prior][system]
    std::map<std::pair<std::string, std::string>,
             std::map<std::string, std::map<std::string, double>>>
        medians;
    for (const auto& c : result.cells)
        medians[{c.variant, c.stance}][c.prior_label][c.system_id] =
            c.summary.median;

    OrdinalReport report;
    for (const auto& [key, by_prior] : medians) {
        const auto ref_it = by_prior.find(presets.front().label);
        if (ref_it == by_prior.end()) continue;
        const auto& ref = ref_it->second;
        if (ref.size() < 2)
            throw InvalidArgument("ordinal_stability needs at least 2 "
                                  "systems");

        std::vector<std::string> names;
        for (const auto& [system, median] : ref) {
            (void)median;
            names.push_back(system);
        }

        for (const auto& preset : presets) {
            const auto it = by_prior.find(preset.label);
            if (it == by_prior.end()) continue;
            const auto& cur = it->second;
            for (size_t a = 0; a < names.size(); ++a) {
                for (size_t b = a + 1; b < names.size(); ++b) {
                    const double ra = ref.at(names[a]);
                    const double rb = ref.at(names[b]);
                    const double ca = cur.at(names[a]);
                    const double cb = cur.at(names[b]);
                    if (ca == cb || ra == rb) {
                        if (ca == cb)
                            report.ties.push_back({key.second, preset.label,
                                                   names[a], names[b]});
                        continue;
                    }
                    // Strict order at the reference flips at this prior.
                    if ((ra > rb) != (ca > cb)) {
                        report.violations.push_back(
                            {key.second, preset.label,
                             ra > rb ? names[a] : names[b],
                             ra > rb ? names[b] : names[a]});
                    }
                }
            }
        }
    }
    report.stable = report.violations.empty();
    return report;
}

std::string_view to_string(UpdateDirection d) {
    switch (d) {
        case UpdateDirection::Confirming: return "confirming";
        case UpdateDirection::Disconfirming: return "disconfirming";
        case UpdateDirection::Neutral: return "neutral";
    }
    return "?";
}

UpdateDirection direction_of_update(const PosteriorSummary& summary,
                                    const PriorPreset& prior, double tau) {
    const double m = prior.mean();
    if (summary.median > m + tau) return UpdateDirection::Confirming;
    if (summary.median < m - tau) return UpdateDirection::Disconfirming;
    return UpdateDirection::Neutral;
}

} // namespace dcm
