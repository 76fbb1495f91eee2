#pragma once

#include <map>
#include <string>
#include <vector>

#include "dcm/assessment.hpp"

namespace dcm {

struct PriorPreset {
    std::string label;
    double alpha = 0.0;
    double beta = 0.0;

    double mean() const { return alpha / (alpha + beta); }
    PriorConfig to_prior() const { return PriorConfig{alpha, beta, label}; }
};

/// Parses the preset file (format "dcm-priors/1").
std::vector<PriorPreset> load_priors(const std::string& document);

/// Per-system prior assignments (format "dcm-system-priors/1"): maps a
/// system id to a preset label, for experiments that give some systems a
/// higher prior than others.
std::map<std::string, std::string> load_system_priors(
    const std::string& document);

struct SweepCell {
    std::string system_id;
    std::string stance;
    std::string prior_label;
    std::string variant; // e.g. "baseline" or "coarse"
    PosteriorSummary summary;
};

/// Complete cross-product grid, one record per
/// (system, stance, prior, variant) cell.
struct SweepResult {
    std::vector<SweepCell> cells;

    const SweepCell* find(const std::string& system, const std::string& stance,
                          const std::string& prior,
                          const std::string& variant) const;
};

/// Evaluates the full (system x stance x preset) cross-product with
/// common random numbers: indicator realizations depend only on
/// (master seed, system, run), so cell differences reflect the varied
/// factors, not sampling noise.
SweepResult prior_sweep(
    const std::map<std::string, IndicatorPanel>& systems,
    const std::map<std::string, ModelTree>& stance_trees,
    const std::vector<PriorPreset>& presets, const RunConfig& config,
    const std::string& variant = "baseline");

/// Rank comparison report produced by ordinal_stability.
struct OrdinalReport {
    struct Violation {
        std::string stance;
        std::string prior_label;
        std::string system_a; // ranked above system_b at the reference prior
        std::string system_b; // but at/below it at this prior
    };
    struct Tie {
        std::string stance;
        std::string prior_label;
        std::string system_a;
        std::string system_b;
    };
    bool stable = true; // no violations (ties allowed)
    std::vector<Violation> violations;
    std::vector<Tie> ties;
};

/// For each (stance, variant), ranks systems by median posterior per
/// prior and reports every cell where the strict order between two
/// systems flips relative to the first preset. Ties are reported
/// separately and are not violations.
OrdinalReport ordinal_stability(const SweepResult& result,
                                const std::vector<PriorPreset>& presets);

enum class UpdateDirection { Confirming, Disconfirming, Neutral };

std::string_view to_string(UpdateDirection d);

/// Neutral band half-width for direction_of_update.
inline constexpr double kDirectionTau = 0.005;

/// Compares the summary median to the prior mean with a small neutral
/// band so Monte-Carlo noise cannot flip the reported direction.
UpdateDirection direction_of_update(const PosteriorSummary& summary,
                                    const PriorPreset& prior,
                                    double tau = kDirectionTau);

} // namespace dcm
