#include "dcm/tree.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "dcm/errors.hpp"

namespace dcm {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Trait: return "trait";
        case NodeKind::Feature: return "feature";
        case NodeKind::Subfeature: return "subfeature";
        case NodeKind::Indicator: return "indicator";
    }
    return "?";
}

namespace {

NodeKind kind_from_string(const std::string& s) {
    if (s == "feature") return NodeKind::Feature;
    if (s == "subfeature") return NodeKind::Subfeature;
    if (s == "indicator") return NodeKind::Indicator;
    throw SpecError("unknown node kind '" + s + "'");
}

SupportLevel parse_support(const std::string& s, const std::string& node_id) {
    auto lv = support_from_string(s);
    if (!lv)
        throw SpecError("node '" + node_id + "': unknown support level '" + s +
                        "'");
    return *lv;
}

Demandingness parse_demand(const std::string& s, const std::string& node_id) {
    auto lv = demand_from_string(s);
    if (!lv)
        throw SpecError("node '" + node_id +
                        "': unknown demandingness level '" + s + "'");
    return *lv;
}

int depth_of(const ModelTree& tree, const std::string& id) {
    int depth = 0;
    std::string cur = id;
    while (cur != tree.root_id) {
        cur = tree.nodes.at(cur).parent;
        ++depth;
        if (depth > static_cast<int>(tree.nodes.size()))
            throw SpecError("cycle detected at node '" + id + "'");
    }
    return depth;
}

} // namespace

const TreeNode& ModelTree::node(const std::string& id) const {
    auto it = nodes.find(id);
    if (it == nodes.end())
        throw InvalidArgument("unknown node id '" + id + "'");
    return it->second;
}

std::vector<std::string> ModelTree::indicator_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, n] : nodes)
        if (n.kind == NodeKind::Indicator) out.push_back(id);
    return out;
}

std::vector<std::string> ModelTree::latent_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, n] : nodes)
        if (n.kind == NodeKind::Feature || n.kind == NodeKind::Subfeature)
            out.push_back(id);
    return out;
}

ModelTree parse_model_spec(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw SpecError("syntax error at byte " + std::to_string(e.byte) +
                        ": " + e.what());
    }

    if (!doc.is_object() || doc.value("format", "") != "dcm-tree/1")
        throw SpecError("expected a dcm-tree/1 document");
    if (!doc.contains("trait") || !doc["trait"].contains("id"))
        throw SpecError("missing trait.id");

    ModelTree tree;
    tree.root_id = doc["trait"]["id"].get<std::string>();
    tree.nodes[tree.root_id] =
        TreeNode{tree.root_id, NodeKind::Trait, "", SupportLevel::NoSupport,
                 Demandingness::Neutral};

    for (const auto& jn : doc.value("nodes", json::array())) {
        TreeNode n;
        n.id = jn.at("id").get<std::string>();
        n.kind = kind_from_string(jn.at("kind").get<std::string>());
        n.parent = jn.at("parent").get<std::string>();
        n.support = parse_support(jn.at("support").get<std::string>(), n.id);
        n.demand =
            parse_demand(jn.at("demandingness").get<std::string>(), n.id);

        auto [it, inserted] = tree.nodes.emplace(n.id, n);
        if (!inserted) {
            if (it->second.parent != n.parent)
                throw SpecError("node '" + n.id + "' has multiple parents ('" +
                                it->second.parent + "' and '" + n.parent +
                                "')");
            throw SpecError("duplicate edge to node '" + n.id + "'");
        }
    }

    validate_tree(tree);
    return tree;
}

void validate_tree(const ModelTree& tree) {
    if (tree.nodes.find(tree.root_id) == tree.nodes.end())
        throw SpecError("root node '" + tree.root_id + "' missing");

    for (const auto& [id, n] : tree.nodes) {
        if (id == tree.root_id) {
            if (n.kind != NodeKind::Trait)
                throw SpecError("root node '" + id + "' must be the trait");
            continue;
        }
        if (n.kind == NodeKind::Trait)
            throw SpecError("node '" + id + "': only the root is a trait");
        auto pit = tree.nodes.find(n.parent);
        if (pit == tree.nodes.end())
            throw SpecError("node '" + id + "': unknown parent id '" +
                            n.parent + "'");
        const NodeKind pk = pit->second.kind;
        switch (n.kind) {
            case NodeKind::Feature:
                if (pk != NodeKind::Trait)
                    throw SpecError("feature '" + id +
                                    "' must attach to the trait");
                break;
            case NodeKind::Subfeature:
                if (pk != NodeKind::Feature && pk != NodeKind::Subfeature)
                    throw SpecError("subfeature '" + id +
                                    "' must attach to a feature or "
                                    "subfeature");
                break;
            case NodeKind::Indicator:
                if (pk != NodeKind::Feature && pk != NodeKind::Subfeature)
                    throw SpecError("indicator '" + id +
                                    "' must attach to a feature or "
                                    "subfeature");
                break;
            case NodeKind::Trait:
                break;
        }
    }

    // Depth check doubles as cycle detection: a parent chain that never
    // reaches the root trips the step limit inside depth_of.
    for (const auto& [id, n] : tree.nodes) {
        if (id == tree.root_id) continue;
        const int d = depth_of(tree, id);
        if (d > kMaxDepth)
            throw SpecError("node '" + id + "' is " + std::to_string(d) +
                            " levels below the root (max " +
                            std::to_string(kMaxDepth) + ")");
        if (n.kind == NodeKind::Indicator) {
            for (const auto& [cid, c] : tree.nodes) {
                if (cid != tree.root_id && c.parent == id)
                    throw SpecError("indicator '" + id +
                                    "' must be a leaf but has child '" + cid +
                                    "'");
            }
        }
    }
}

std::string serialize_tree(const ModelTree& tree) {
    ordered_json doc;
    doc["format"] = "dcm-tree/1";
    doc["trait"] = {{"id", tree.root_id}};
    auto nodes = ordered_json::array();
    for (const auto& [id, n] : tree.nodes) { // std::map: sorted by id
        if (id == tree.root_id) continue;
        nodes.push_back({{"id", n.id},
                         {"kind", std::string(to_string(n.kind))},
                         {"parent", n.parent},
                         {"support", std::string(to_string(n.support))},
                         {"demandingness", std::string(to_string(n.demand))}});
    }
    doc["nodes"] = std::move(nodes);
    return doc.dump(2) + "\n";
}

ModelTree compile_tree(const ModelTree& tree, double concentration) {
    validate_tree(tree);
    ModelTree out = tree;
    out.children.clear();
    out.edge_params.clear();
    for (const auto& [id, n] : tree.nodes) {
        if (id == tree.root_id) continue;
        out.children[n.parent].push_back(id);
        out.edge_params[id] =
            conditionals_from_levels(n.support, n.demand, concentration);
    }
    out.concentration = concentration;
    out.compiled = true;
    return out;
}

ModelTree coarse_grain_levels(const ModelTree& tree) {
    ModelTree out;
    out.root_id = tree.root_id;
    for (const auto& [id, n] : tree.nodes) {
        TreeNode m = n;
        if (id != tree.root_id) {
            m.support = coarse_grain(n.support);
            m.demand = coarse_grain(n.demand);
        }
        out.nodes[id] = m;
    }
    return out;
}

} // namespace dcm
