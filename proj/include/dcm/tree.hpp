#pragma once

#include <map>
#include <string>
#include <vector>

#include "dcm/levels.hpp"

namespace dcm {

enum class NodeKind { Trait, Feature, Subfeature, Indicator };

std::string_view to_string(NodeKind k);

/// One node of the hierarchy. Non-root nodes carry the support and
/// demandingness levels of the edge to their parent; level names in files
/// are the source of truth, the ratio pairs and Beta parameters derive
/// from them.
struct TreeNode {
    std::string id;
    NodeKind kind = NodeKind::Indicator;
    std::string parent; // empty for the root trait
    SupportLevel support = SupportLevel::NoSupport;
    Demandingness demand = Demandingness::Neutral;

    bool operator==(const TreeNode&) const = default;
};

/// The root trait with its descendant features, subfeatures and
/// indicators. A forest rooted at the trait: every non-root node has
/// exactly one parent, indicators are leaves, depth is at most four
/// levels below the root. Compilation attaches a ConditionalPair to every
/// edge (keyed by the child id); a compiled tree is immutable in use and
/// safe to share across concurrent inference runs.
struct ModelTree {
    std::string root_id;
    std::map<std::string, TreeNode> nodes; // includes the root
    std::map<std::string, std::vector<std::string>> children;
    std::map<std::string, ConditionalPair> edge_params; // by child id
    double concentration = 0.0;
    bool compiled = false;

    const TreeNode& node(const std::string& id) const;
    std::vector<std::string> indicator_ids() const; // sorted
    /// Feature and subfeature nodes (everything latent except the root).
    std::vector<std::string> latent_ids() const; // sorted

    bool same_structure(const ModelTree& other) const {
        return root_id == other.root_id && nodes == other.nodes;
    }
};

/// Maximum node depth below the root (feature = 1, ..., indicator <= 4).
inline constexpr int kMaxDepth = 4;

/// Default pseudo-count scale for the Beta parameterization of edges.
inline constexpr double kDefaultConcentration = 10.0;

/// Parses a model-spec document (format "dcm-tree/1") into a validated,
/// uncompiled tree. Reports syntax errors with byte positions; rejects
/// unknown parent ids, duplicate nodes, multiple parents, cycles,
/// non-leaf indicators and over-deep branches.
ModelTree parse_model_spec(const std::string& document);

/// Canonical serialization: nodes sorted by id, two-space indent.
/// parse_model_spec(serialize_tree(t)) reproduces t exactly.
std::string serialize_tree(const ModelTree& tree);

/// Structural validation used by the parser and by assemblers that build
/// trees programmatically. Throws SpecError on the first violation.
void validate_tree(const ModelTree& tree);

/// Attaches a ConditionalPair to every edge. Pure: identical inputs give
/// identical parameters.
ModelTree compile_tree(const ModelTree& tree,
                       double concentration = kDefaultConcentration);

/// Applies the five-category collapse to every edge's levels. Returns an
/// uncompiled tree (parameters must be re-derived from the new levels).
/// Idempotent.
ModelTree coarse_grain_levels(const ModelTree& tree);

} // namespace dcm
