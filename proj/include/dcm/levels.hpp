#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace dcm {

/// Nine-point ordinal scale for how strongly a child's presence supports
/// its parent (sensitivity / (1 - specificity)). Index 4 is the neutral
/// point; higher indices support, lower indices countersupport.
enum class SupportLevel : int {
    OverwhelmingCountersupport = 0,
    StrongCountersupport = 1,
    ModerateCountersupport = 2,
    WeakCountersupport = 3,
    NoSupport = 4,
    WeakSupport = 5,
    ModerateSupport = 6,
    StrongSupport = 7,
    OverwhelmingSupport = 8,
};

/// Nine-point ordinal scale for how rare the child is when the parent is
/// absent (specificity / (1 - specificity)). Index 4 is neutral; higher
/// indices are more demanding (child rarer absent the parent).
enum class Demandingness : int {
    OverwhelminglyUndemanding = 0,
    StronglyUndemanding = 1,
    ModeratelyUndemanding = 2,
    WeaklyUndemanding = 3,
    Neutral = 4,
    WeaklyDemanding = 5,
    ModeratelyDemanding = 6,
    StronglyDemanding = 7,
    OverwhelminglyDemanding = 8,
};

/// Odds-style ratio pair attached to each scale category.
struct RatioPair {
    double num;
    double den;
    double ratio() const { return num / den; }
};

RatioPair support_ratio(SupportLevel s);
RatioPair demand_ratio(Demandingness d);

/// Level names are the single source of truth in all file formats; the
/// ratio pairs are derived.
std::string_view to_string(SupportLevel s);
std::string_view to_string(Demandingness d);
std::optional<SupportLevel> support_from_string(std::string_view name);
std::optional<Demandingness> demand_from_string(std::string_view name);

inline bool is_positive(SupportLevel s) {
    return static_cast<int>(s) > static_cast<int>(SupportLevel::NoSupport);
}
inline bool is_negative(SupportLevel s) {
    return static_cast<int>(s) < static_cast<int>(SupportLevel::NoSupport);
}

/// Beta(alpha, beta) parameters for one conditional probability.
struct BetaParams {
    double alpha;
    double beta;
    double mean() const { return alpha / (alpha + beta); }
};

/// The two conditional distributions attached to an edge:
/// pi1 ~ Pr(child present | parent present), pi0 ~ Pr(child present |
/// parent absent). alpha+beta equals the concentration on both sides.
struct ConditionalPair {
    BetaParams pi1;
    BetaParams pi0;

    /// Likelihood ratio of observing the child present, at initiation.
    double lr_present() const { return pi1.mean() / pi0.mean(); }
    /// Likelihood ratio of observing the child absent, at initiation.
    double lr_absent() const {
        return (1.0 - pi1.mean()) / (1.0 - pi0.mean());
    }
};

/// Maps a (support, demandingness) pair to the edge's conditional Beta
/// parameterization at the given concentration (pseudo-count scale).
///
/// Baseline rule: p0 = den/(num+den) of the demandingness ratio, and
/// p1 = support_ratio * p0, both clamped to [0.02, 0.98] so no single
/// edge is infinitely diagnostic. A small calibration table pins the
/// extreme high-support/high-demandingness pairings to fixed likelihood
/// ratios instead, where the multiplicative rule is too blunt.
ConditionalPair conditionals_from_levels(SupportLevel support,
                                         Demandingness demand,
                                         double concentration);

/// Collapses the nine-category scales to five: the two strongest
/// categories merge into "strong", the two mildest non-neutral into
/// "weak", symmetrically on both sides; neutral is unchanged. Idempotent.
SupportLevel coarse_grain(SupportLevel s);
Demandingness coarse_grain(Demandingness d);

inline constexpr std::array<SupportLevel, 9> kAllSupportLevels = {
    SupportLevel::OverwhelmingCountersupport,
    SupportLevel::StrongCountersupport,
    SupportLevel::ModerateCountersupport,
    SupportLevel::WeakCountersupport,
    SupportLevel::NoSupport,
    SupportLevel::WeakSupport,
    SupportLevel::ModerateSupport,
    SupportLevel::StrongSupport,
    SupportLevel::OverwhelmingSupport,
};

inline constexpr std::array<Demandingness, 9> kAllDemandLevels = {
    Demandingness::OverwhelminglyUndemanding,
    Demandingness::StronglyUndemanding,
    Demandingness::ModeratelyUndemanding,
    Demandingness::WeaklyUndemanding,
    Demandingness::Neutral,
    Demandingness::WeaklyDemanding,
    Demandingness::ModeratelyDemanding,
    Demandingness::StronglyDemanding,
    Demandingness::OverwhelminglyDemanding,
};

} // namespace dcm
