#pragma once

#include <map>
#include <string>
#include <vector>

#include "dcm/tree.hpp"

namespace dcm {

/// One trait-to-feature evidence link declared by a stance.
struct FeatureLink {
    std::string feature;
    SupportLevel support;
    Demandingness demand;

    bool operator==(const FeatureLink&) const = default;
};

/// A named set of evidence links from catalog features to the root trait.
struct StanceSpec {
    std::string name;
    std::string display_name;
    std::string description;
    std::vector<FeatureLink> links;
};

/// The shared node hierarchy below the feature tier: features (without
/// trait links), subfeatures and indicators, with the stance-independent
/// support/demandingness levels of every below-feature edge. Stances only
/// add trait-to-feature links on top; they cannot override these edges.
struct Catalog {
    std::string trait_id;
    std::string trait_name;
    std::map<std::string, TreeNode> nodes; // features have empty parent
    std::map<std::string, std::string> display_names;

    std::vector<std::string> feature_ids() const;  // sorted
    std::vector<std::string> indicator_ids() const; // sorted
};

Catalog parse_catalog(const std::string& document);
StanceSpec parse_stance(const std::string& document);

/// Validates a stance against the catalog: every referenced feature must
/// exist, the link list must be nonempty and duplicate-free.
void validate_stance(const StanceSpec& stance, const Catalog& catalog);

/// Builds the (uncompiled) model tree for one stance: the trait, the
/// stance's features with its trait links, and every catalog descendant
/// of those features.
ModelTree assemble_tree(const StanceSpec& stance, const Catalog& catalog);

/// Indicators reachable from at least one stance's features. Used by
/// validation to warn about orphan catalog indicators.
std::vector<std::string> reachable_indicators(
    const std::vector<StanceSpec>& stances, const Catalog& catalog);

} // namespace dcm
