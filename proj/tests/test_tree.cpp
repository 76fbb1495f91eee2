#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "dcm/errors.hpp"
#include "dcm/rng.hpp"
#include "dcm/tree.hpp"
#include "support/generators.hpp"

using namespace dcm;

namespace {

const std::string kMinimal = R"({
  "format": "dcm-tree/1",
  "trait": {"id": "trait"},
  "nodes": [
    {"id": "f1", "kind": "feature", "parent": "trait",
     "support": "strong_support", "demandingness": "moderately_demanding"},
    {"id": "i1", "kind": "indicator", "parent": "f1",
     "support": "moderate_support", "demandingness": "weakly_demanding"}
  ]
})";

} // namespace

TEST_CASE("minimal document parses to three nodes and two edges") {
    const ModelTree tree = parse_model_spec(kMinimal);
    CHECK(tree.nodes.size() == 3);
    CHECK(tree.root_id == "trait");
    CHECK(tree.node("f1").kind == NodeKind::Feature);
    CHECK(tree.node("i1").kind == NodeKind::Indicator);
    CHECK(tree.node("i1").support == SupportLevel::ModerateSupport);
    CHECK_FALSE(tree.compiled);
}

TEST_CASE("syntax errors report a byte position") {
    try {
        parse_model_spec("{\"format\": \"dcm-tree/1\",");
        FAIL("expected SpecError");
    } catch (const SpecError& e) {
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("unknown parent id is rejected") {
    const std::string doc = R"({
      "format": "dcm-tree/1", "trait": {"id": "trait"},
      "nodes": [{"id": "i1", "kind": "indicator", "parent": "nope",
                 "support": "no_support", "demandingness": "neutral"}]
    })";
    CHECK_THROWS_WITH_AS(parse_model_spec(doc),
                         doctest::Contains("unknown parent id 'nope'"),
                         SpecError);
}

TEST_CASE("duplicate edge and multiple parents are distinct errors") {
    const std::string dup = R"({
      "format": "dcm-tree/1", "trait": {"id": "trait"},
      "nodes": [
        {"id": "f1", "kind": "feature", "parent": "trait",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "f1", "kind": "feature", "parent": "trait",
         "support": "weak_support", "demandingness": "neutral"}
      ]
    })";
    CHECK_THROWS_WITH_AS(parse_model_spec(dup),
                         doctest::Contains("duplicate edge"), SpecError);

    const std::string multi = R"({
      "format": "dcm-tree/1", "trait": {"id": "trait"},
      "nodes": [
        {"id": "f1", "kind": "feature", "parent": "trait",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "f2", "kind": "feature", "parent": "trait",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "i1", "kind": "indicator", "parent": "f1",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "i1", "kind": "indicator", "parent": "f2",
         "support": "no_support", "demandingness": "neutral"}
      ]
    })";
    CHECK_THROWS_WITH_AS(parse_model_spec(multi),
                         doctest::Contains("multiple parents"), SpecError);
}

TEST_CASE("cycles among subfeatures are detected") {
    const std::string doc = R"({
      "format": "dcm-tree/1", "trait": {"id": "trait"},
      "nodes": [
        {"id": "f1", "kind": "feature", "parent": "trait",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "s1", "kind": "subfeature", "parent": "s2",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "s2", "kind": "subfeature", "parent": "s1",
         "support": "no_support", "demandingness": "neutral"}
      ]
    })";
    CHECK_THROWS_WITH_AS(parse_model_spec(doc), doctest::Contains("cycle"),
                         SpecError);
}

TEST_CASE("indicators must be leaves") {
    const std::string doc = R"({
      "format": "dcm-tree/1", "trait": {"id": "trait"},
      "nodes": [
        {"id": "f1", "kind": "feature", "parent": "trait",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "i1", "kind": "indicator", "parent": "f1",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "i2", "kind": "indicator", "parent": "i1",
         "support": "no_support", "demandingness": "neutral"}
      ]
    })";
    CHECK_THROWS_AS(parse_model_spec(doc), SpecError);
}

TEST_CASE("depth limit of four levels below the root") {
    // feature -> sub -> sub-sub -> indicator is legal (depth 4)
    std::string ok = R"({
      "format": "dcm-tree/1", "trait": {"id": "trait"},
      "nodes": [
        {"id": "f", "kind": "feature", "parent": "trait",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "s1", "kind": "subfeature", "parent": "f",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "s2", "kind": "subfeature", "parent": "s1",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "i", "kind": "indicator", "parent": "s2",
         "support": "no_support", "demandingness": "neutral"}
      ]
    })";
    CHECK_NOTHROW(parse_model_spec(ok));

    // one more subfeature layer pushes the indicator past the limit
    std::string deep = R"({
      "format": "dcm-tree/1", "trait": {"id": "trait"},
      "nodes": [
        {"id": "f", "kind": "feature", "parent": "trait",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "s1", "kind": "subfeature", "parent": "f",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "s2", "kind": "subfeature", "parent": "s1",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "s3", "kind": "subfeature", "parent": "s2",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "i", "kind": "indicator", "parent": "s3",
         "support": "no_support", "demandingness": "neutral"}
      ]
    })";
    CHECK_THROWS_WITH_AS(parse_model_spec(deep),
                         doctest::Contains("levels below the root"),
                         SpecError);
}

TEST_CASE("features attach only to the trait") {
    const std::string doc = R"({
      "format": "dcm-tree/1", "trait": {"id": "trait"},
      "nodes": [
        {"id": "f1", "kind": "feature", "parent": "trait",
         "support": "no_support", "demandingness": "neutral"},
        {"id": "f2", "kind": "feature", "parent": "f1",
         "support": "no_support", "demandingness": "neutral"}
      ]
    })";
    CHECK_THROWS_AS(parse_model_spec(doc), SpecError);
}

TEST_CASE("serialize/parse round-trips random trees") {
    Rng rng(20240101);
    for (int trial = 0; trial < 60; ++trial) {
        const ModelTree tree =
            testing::random_tree(rng, 1 + (int)(rng.uniform() * 10));
        const ModelTree back = parse_model_spec(serialize_tree(tree));
        CHECK(back.same_structure(tree));
    }
}

TEST_CASE("compilation covers every edge and is deterministic") {
    const ModelTree tree = parse_model_spec(kMinimal);
    const ModelTree a = compile_tree(tree, 10.0);
    const ModelTree b = compile_tree(tree, 10.0);
    CHECK(a.compiled);
    CHECK(a.edge_params.size() == 2);
    for (const auto& [child, pair] : a.edge_params) {
        const auto& other = b.edge_params.at(child);
        CHECK(pair.pi1.alpha == other.pi1.alpha);
        CHECK(pair.pi1.beta == other.pi1.beta);
        CHECK(pair.pi0.alpha == other.pi0.alpha);
        CHECK(pair.pi0.beta == other.pi0.beta);
    }
}

TEST_CASE("compiled edge means follow the support sign on random trees") {
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const ModelTree tree = compile_tree(
            testing::random_tree(rng, 1 + (int)(rng.uniform() * 8)));
        for (const auto& [child, pair] : tree.edge_params) {
            const auto& n = tree.node(child);
            if (is_positive(n.support))
                CHECK(pair.pi1.mean() >= pair.pi0.mean());
            else if (is_negative(n.support))
                CHECK(pair.pi1.mean() <= pair.pi0.mean());
            else
                CHECK(pair.pi1.mean() ==
                      doctest::Approx(pair.pi0.mean()).epsilon(1e-12));
        }
    }
}

TEST_CASE("coarse_grain_levels maps edges and is idempotent") {
    ModelTree tree = parse_model_spec(kMinimal);
    tree.nodes["f1"].support = SupportLevel::OverwhelmingSupport;
    tree.nodes["f1"].demand = Demandingness::OverwhelminglyDemanding;

    const ModelTree coarse = coarse_grain_levels(tree);
    CHECK(coarse.node("f1").support == SupportLevel::StrongSupport);
    CHECK(coarse.node("f1").demand == Demandingness::StronglyDemanding);

    const ModelTree twice = coarse_grain_levels(coarse);
    CHECK(twice.same_structure(coarse));

    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const ModelTree t = testing::random_tree(rng, 6);
        const ModelTree once = coarse_grain_levels(t);
        CHECK(coarse_grain_levels(once).same_structure(once));
    }
}

TEST_CASE("compile rejects an invalid tree") {
    ModelTree tree = parse_model_spec(kMinimal);
    tree.nodes["orphan"] = {"orphan", NodeKind::Indicator, "ghost",
                            SupportLevel::NoSupport, Demandingness::Neutral};
    CHECK_THROWS_AS(compile_tree(tree, 10.0), SpecError);
}
