#include "dcm/levels.hpp"

#include <algorithm>

#include "dcm/errors.hpp"

namespace dcm {

namespace {

// Clamp bound keeping conditional probabilities away from 0/1 so Beta
// parameters stay proper and no edge is infinitely strong.
constexpr double kProbFloor = 0.02;
constexpr double kProbCeil = 0.98;

constexpr std::array<RatioPair, 9> kSupportRatios = {{
    {1.0, 50.0}, // overwhelming countersupport
    {1.0, 8.0},  // strong countersupport
    {1.0, 3.0},  // moderate countersupport
    {1.0, 1.5},  // weak countersupport
    {1.0, 1.0},  // no support
    {1.5, 1.0},  // weak support
    {3.0, 1.0},  // moderate support
    {8.0, 1.0},  // strong support
    {50.0, 1.0}, // overwhelming support
}};

constexpr std::array<RatioPair, 9> kDemandRatios = {{
    {1.0, 50.0}, // overwhelmingly undemanding
    {1.0, 8.0},  // strongly undemanding
    {1.0, 3.0},  // moderately undemanding
    {1.0, 1.5},  // weakly undemanding
    {1.0, 1.0},  // neutral
    {1.5, 1.0},  // weakly demanding
    {3.0, 1.0},  // moderately demanding
    {8.0, 1.0},  // strongly demanding
    {50.0, 1.0}, // overwhelmingly demanding
}};

constexpr std::array<std::string_view, 9> kSupportNames = {
    "overwhelming_countersupport", "strong_countersupport",
    "moderate_countersupport",     "weak_countersupport",
    "no_support",                  "weak_support",
    "moderate_support",            "strong_support",
    "overwhelming_support",
};

constexpr std::array<std::string_view, 9> kDemandNames = {
    "overwhelmingly_undemanding", "strongly_undemanding",
    "moderately_undemanding",     "weakly_undemanding",
    "neutral",                    "weakly_demanding",
    "moderately_demanding",       "strongly_demanding",
    "overwhelmingly_demanding",
};

// Pinned likelihood-ratio targets for pairings where the multiplicative
// rule understates how diagnostic a supportive child is under a demanding
// parent. Each row fixes both the present- and absent-observation ratios;
// (p1, p0) are solved from them exactly, so these rows bypass the clamp.
struct CalibrationRow {
    SupportLevel support;
    Demandingness demand;
    double lr_present;
    double lr_absent;
};

constexpr std::array<CalibrationRow, 9> kCalibration = {{
    {SupportLevel::OverwhelmingSupport, Demandingness::OverwhelminglyDemanding,
     45.0, 0.1},
    {SupportLevel::OverwhelmingSupport, Demandingness::StronglyDemanding, 8.5,
     0.06},
    {SupportLevel::OverwhelmingSupport, Demandingness::Neutral, 2.0, 0.04},
    {SupportLevel::StrongSupport, Demandingness::StronglyDemanding, 6.7, 0.3},
    {SupportLevel::StrongSupport, Demandingness::StronglyUndemanding, 1.1,
     0.14},
    {SupportLevel::ModerateSupport, Demandingness::OverwhelminglyDemanding,
     16.5, 0.69},
    {SupportLevel::ModerateSupport, Demandingness::ModeratelyDemanding, 2.4,
     0.55},
    {SupportLevel::WeakSupport, Demandingness::OverwhelminglyDemanding, 9.8,
     0.8},
    {SupportLevel::WeakSupport, Demandingness::WeaklyDemanding, 1.2, 0.88},
}};

double clamp_prob(double p) { return std::clamp(p, kProbFloor, kProbCeil); }

} // namespace

RatioPair support_ratio(SupportLevel s) {
    return kSupportRatios[static_cast<int>(s)];
}

RatioPair demand_ratio(Demandingness d) {
    return kDemandRatios[static_cast<int>(d)];
}

std::string_view to_string(SupportLevel s) {
    return kSupportNames[static_cast<int>(s)];
}

std::string_view to_string(Demandingness d) {
    return kDemandNames[static_cast<int>(d)];
}

std::optional<SupportLevel> support_from_string(std::string_view name) {
    for (int i = 0; i < 9; ++i)
        if (kSupportNames[i] == name) return static_cast<SupportLevel>(i);
    return std::nullopt;
}

std::optional<Demandingness> demand_from_string(std::string_view name) {
    for (int i = 0; i < 9; ++i)
        if (kDemandNames[i] == name) return static_cast<Demandingness>(i);
    return std::nullopt;
}

ConditionalPair conditionals_from_levels(SupportLevel support,
                                         Demandingness demand,
                                         double concentration) {
    if (!(concentration > 0.0))
        throw InvalidArgument("concentration must be positive");

    double p1 = 0.0;
    double p0 = 0.0;

    const auto cal =
        std::find_if(kCalibration.begin(), kCalibration.end(),
                     [&](const CalibrationRow& r) {
                         return r.support == support && r.demand == demand;
                     });
    if (cal != kCalibration.end()) {
        // Invert lr_present = p1/p0, lr_absent = (1-p1)/(1-p0).
        p0 = (1.0 - cal->lr_absent) / (cal->lr_present - cal->lr_absent);
        p1 = cal->lr_present * p0;
    } else {
        const RatioPair d = demand_ratio(demand);
        p0 = clamp_prob(d.den / (d.num + d.den));
        if (support == SupportLevel::NoSupport) {
            p1 = p0; // no bearing at any demandingness
        } else {
            p1 = clamp_prob(support_ratio(support).ratio() * p0);
        }
    }

    return ConditionalPair{
        BetaParams{concentration * p1, concentration * (1.0 - p1)},
        BetaParams{concentration * p0, concentration * (1.0 - p0)},
    };
}

SupportLevel coarse_grain(SupportLevel s) {
    switch (s) {
        case SupportLevel::OverwhelmingSupport:
        case SupportLevel::StrongSupport:
            return SupportLevel::StrongSupport;
        case SupportLevel::ModerateSupport:
        case SupportLevel::WeakSupport:
            return SupportLevel::WeakSupport;
        case SupportLevel::NoSupport:
            return SupportLevel::NoSupport;
        case SupportLevel::WeakCountersupport:
        case SupportLevel::ModerateCountersupport:
            return SupportLevel::WeakCountersupport;
        case SupportLevel::StrongCountersupport:
        case SupportLevel::OverwhelmingCountersupport:
            return SupportLevel::StrongCountersupport;
    }
    return s;
}

Demandingness coarse_grain(Demandingness d) {
    switch (d) {
        case Demandingness::OverwhelminglyDemanding:
        case Demandingness::StronglyDemanding:
            return Demandingness::StronglyDemanding;
        case Demandingness::ModeratelyDemanding:
        case Demandingness::WeaklyDemanding:
            return Demandingness::WeaklyDemanding;
        case Demandingness::Neutral:
            return Demandingness::Neutral;
        case Demandingness::WeaklyUndemanding:
        case Demandingness::ModeratelyUndemanding:
            return Demandingness::WeaklyUndemanding;
        case Demandingness::StronglyUndemanding:
        case Demandingness::OverwhelminglyUndemanding:
            return Demandingness::StronglyUndemanding;
    }
    return d;
}

} // namespace dcm
