#include "dcm/catalog.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "dcm/errors.hpp"

namespace dcm {

using nlohmann::json;

namespace {

json parse_json(const std::string& document, const char* what) {
    try {
        return json::parse(document);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string(what) + ": syntax error at byte " +
                        std::to_string(e.byte) + ": " + e.what());
    }
}

} // namespace

std::vector<std::string> Catalog::feature_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, n] : nodes)
        if (n.kind == NodeKind::Feature) out.push_back(id);
    return out;
}

std::vector<std::string> Catalog::indicator_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, n] : nodes)
        if (n.kind == NodeKind::Indicator) out.push_back(id);
    return out;
}

Catalog parse_catalog(const std::string& document) {
    const json doc = parse_json(document, "catalog");
    if (doc.value("format", "") != "dcm-catalog/1")
        throw SpecError("catalog: expected a dcm-catalog/1 document");

    Catalog cat;
    cat.trait_id = doc.at("trait").at("id").get<std::string>();
    cat.trait_name = doc.at("trait").value("name", cat.trait_id);

    for (const auto& jn : doc.at("nodes")) {
        TreeNode n;
        n.id = jn.at("id").get<std::string>();
        const auto kind = jn.at("kind").get<std::string>();
        if (kind == "feature") {
            n.kind = NodeKind::Feature;
            // trait links come from stances, not the catalog
        } else if (kind == "subfeature" || kind == "indicator") {
            n.kind = kind == "subfeature" ? NodeKind::Subfeature
                                          : NodeKind::Indicator;
            n.parent = jn.at("parent").get<std::string>();
            auto sup =
                support_from_string(jn.at("support").get<std::string>());
            auto dem =
                demand_from_string(jn.at("demandingness").get<std::string>());
            if (!sup || !dem)
                throw SpecError("catalog node '" + n.id +
                                "': unknown level name");
            n.support = *sup;
            n.demand = *dem;
        } else {
            throw SpecError("catalog node '" + n.id + "': unknown kind '" +
                            kind + "'");
        }
        if (n.id == cat.trait_id)
            throw SpecError("catalog node '" + n.id +
                            "' collides with the trait id");
        if (!cat.nodes.emplace(n.id, n).second)
            throw SpecError("catalog: duplicate node id '" + n.id + "'");
        if (jn.contains("name"))
            cat.display_names[n.id] = jn["name"].get<std::string>();
    }

    // Parent references must resolve inside the catalog.
    for (const auto& [id, n] : cat.nodes) {
        if (n.kind == NodeKind::Feature) continue;
        auto pit = cat.nodes.find(n.parent);
        if (pit == cat.nodes.end())
            throw SpecError("catalog node '" + id + "': unknown parent '" +
                            n.parent + "'");
    }
    return cat;
}

StanceSpec parse_stance(const std::string& document) {
    const json doc = parse_json(document, "stance");
    if (doc.value("format", "") != "dcm-stance/1")
        throw SpecError("stance: expected a dcm-stance/1 document");

    StanceSpec st;
    st.name = doc.at("name").get<std::string>();
    st.display_name = doc.value("display_name", st.name);
    st.description = doc.value("description", "");
    for (const auto& jl : doc.at("links")) {
        FeatureLink link;
        link.feature = jl.at("feature").get<std::string>();
        auto sup = support_from_string(jl.at("support").get<std::string>());
        auto dem =
            demand_from_string(jl.at("demandingness").get<std::string>());
        if (!sup || !dem)
            throw SpecError("stance '" + st.name + "', feature '" +
                            link.feature + "': unknown level name");
        link.support = *sup;
        link.demand = *dem;
        st.links.push_back(link);
    }
    return st;
}

void validate_stance(const StanceSpec& stance, const Catalog& catalog) {
    if (stance.links.empty())
        throw SpecError("stance '" + stance.name + "' links no features");
    std::set<std::string> seen;
    for (const auto& link : stance.links) {
        if (!seen.insert(link.feature).second)
            throw SpecError("stance '" + stance.name +
                            "': duplicate link to feature '" + link.feature +
                            "'");
        auto it = catalog.nodes.find(link.feature);
        if (it == catalog.nodes.end() ||
            it->second.kind != NodeKind::Feature)
            throw SpecError("stance '" + stance.name +
                            "': unknown feature '" + link.feature + "'");
    }
}

ModelTree assemble_tree(const StanceSpec& stance, const Catalog& catalog) {
    validate_stance(stance, catalog);

    ModelTree tree;
    tree.root_id = catalog.trait_id;
    tree.nodes[tree.root_id] = TreeNode{tree.root_id, NodeKind::Trait, "",
                                        SupportLevel::NoSupport,
                                        Demandingness::Neutral};

    std::set<std::string> selected;
    for (const auto& link : stance.links) {
        TreeNode f = catalog.nodes.at(link.feature);
        f.parent = tree.root_id;
        f.support = link.support;
        f.demand = link.demand;
        tree.nodes[f.id] = f;
        selected.insert(f.id);
    }

    // Pull in every catalog node whose feature ancestor was selected.
    for (const auto& [id, n] : catalog.nodes) {
        if (n.kind == NodeKind::Feature) continue;
        std::string cur = id;
        while (catalog.nodes.at(cur).kind != NodeKind::Feature)
            cur = catalog.nodes.at(cur).parent;
        if (selected.count(cur)) tree.nodes[id] = n;
    }

    validate_tree(tree);
    return tree;
}

std::vector<std::string> reachable_indicators(
    const std::vector<StanceSpec>& stances, const Catalog& catalog) {
    std::set<std::string> features;
    for (const auto& st : stances)
        for (const auto& link : st.links) features.insert(link.feature);

    std::vector<std::string> out;
    for (const auto& id : catalog.indicator_ids()) {
        std::string cur = id;
        while (catalog.nodes.at(cur).kind != NodeKind::Feature)
            cur = catalog.nodes.at(cur).parent;
        if (features.count(cur)) out.push_back(id);
    }
    return out;
}

} // namespace dcm
