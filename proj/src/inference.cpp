#include "dcm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dcm/errors.hpp"
#include "dcm/parallel.hpp"
#include "dcm/rng.hpp"

namespace dcm {

namespace {

void check_inputs(const ModelTree& tree,
                  const IndicatorAssignment& assignment) {
    if (!tree.compiled)
        throw InvalidArgument("tree is not compiled");
    for (const auto& [id, st] : assignment.values) {
        (void)st;
        auto it = tree.nodes.find(id);
        if (it == tree.nodes.end() ||
            it->second.kind != NodeKind::Indicator)
            throw InvalidArgument("unknown indicator id '" + id + "'");
    }
}

// Upward message for the subtree rooted at `id`, as a likelihood pair
// (value given parent present, value given parent absent). Subtrees with
// no observed indicator carry no message. Pairs are normalized by their
// max to keep long products away from underflow; posteriors only depend
// on their ratios.
struct Message {
    double given1 = 1.0;
    double given0 = 1.0;
    bool has_evidence = false;
};

Message subtree_message(const ModelTree& tree,
                        const IndicatorAssignment& assignment,
                        const std::string& id) {
    const ConditionalPair& edge = tree.edge_params.at(id);
    const double p1 = edge.pi1.mean();
    const double p0 = edge.pi0.mean();
    const TreeNode& n = tree.nodes.at(id);

    Message msg;
    if (n.kind == NodeKind::Indicator) {
        switch (assignment.get(id)) {
            case IndicatorState::Missing:
                return msg;
            case IndicatorState::Present:
                msg = {p1, p0, true};
                break;
            case IndicatorState::Absent:
                msg = {1.0 - p1, 1.0 - p0, true};
                break;
        }
    } else {
        // Internal node: combine children under conditional independence,
        // then marginalize this node's two states.
        double like1 = 1.0; // evidence below, given this node present
        double like0 = 1.0;
        bool any = false;
        auto cit = tree.children.find(id);
        if (cit != tree.children.end()) {
            for (const auto& child : cit->second) {
                const Message m = subtree_message(tree, assignment, child);
                if (!m.has_evidence) continue;
                any = true;
                like1 *= m.given1;
                like0 *= m.given0;
            }
        }
        if (!any) return msg;
        msg.given1 = p1 * like1 + (1.0 - p1) * like0;
        msg.given0 = p0 * like1 + (1.0 - p0) * like0;
        msg.has_evidence = true;
    }

    const double scale = std::max(msg.given1, msg.given0);
    if (scale > 0.0) {
        msg.given1 /= scale;
        msg.given0 /= scale;
    }
    return msg;
}

} // namespace

PosteriorEstimate exact_posterior(const ModelTree& tree,
                                  const IndicatorAssignment& assignment,
                                  const PriorConfig& prior) {
    check_inputs(tree, assignment);

    const double m = prior.mean();
    double like1 = 1.0;
    double like0 = 1.0;
    bool any = false;
    auto rit = tree.children.find(tree.root_id);
    if (rit != tree.children.end()) {
        for (const auto& child : rit->second) {
            const Message msg = subtree_message(tree, assignment, child);
            if (!msg.has_evidence) continue;
            any = true;
            like1 *= msg.given1;
            like0 *= msg.given0;
        }
    }

    PosteriorEstimate est;
    est.method = Method::Exact;
    est.probability =
        any ? (m * like1) / (m * like1 + (1.0 - m) * like0) : m;
    return est;
}

PosteriorEstimate enumerate_posterior(const ModelTree& tree,
                                      const IndicatorAssignment& assignment,
                                      const PriorConfig& prior) {
    check_inputs(tree, assignment);

    const std::vector<std::string> latents = tree.latent_ids();
    if (latents.size() > kMaxEnumerationLatents)
        throw SizeError("enumeration over " + std::to_string(latents.size()) +
                        " latent nodes exceeds the limit of " +
                        std::to_string(kMaxEnumerationLatents));

    std::map<std::string, int> index; // latent id -> bit position
    for (size_t i = 0; i < latents.size(); ++i) index[latents[i]] = (int)i;

    // Observed indicators, with a resolved reference to their parent.
    struct Obs {
        std::string parent;
        bool present;
        double p1, p0;
    };
    std::vector<Obs> observed;
    for (const auto& id : tree.indicator_ids()) {
        const IndicatorState st = assignment.get(id);
        if (st == IndicatorState::Missing) continue;
        const ConditionalPair& e = tree.edge_params.at(id);
        observed.push_back({tree.nodes.at(id).parent,
                            st == IndicatorState::Present, e.pi1.mean(),
                            e.pi0.mean()});
    }

    const double prior_mean = prior.mean();
    double num = 0.0;
    double den = 0.0;
    const std::uint64_t combos = 1ULL << latents.size();

    for (int root = 0; root <= 1; ++root) {
        const double proot = root ? prior_mean : 1.0 - prior_mean;
        for (std::uint64_t bits = 0; bits < combos; ++bits) {
            auto state_of = [&](const std::string& id) -> int {
                if (id == tree.root_id) return root;
                return (bits >> index.at(id)) & 1ULL;
            };
            double w = proot;
            for (size_t i = 0; i < latents.size(); ++i) {
                const TreeNode& n = tree.nodes.at(latents[i]);
                const ConditionalPair& e = tree.edge_params.at(latents[i]);
                const double p =
                    state_of(n.parent) ? e.pi1.mean() : e.pi0.mean();
                w *= ((bits >> i) & 1ULL) ? p : 1.0 - p;
            }
            for (const auto& ob : observed) {
                const double p = state_of(ob.parent) ? ob.p1 : ob.p0;
                w *= ob.present ? p : 1.0 - p;
            }
            den += w;
            if (root) num += w;
        }
    }

    PosteriorEstimate est;
    est.method = Method::Exact;
    est.probability = num / den;
    return est;
}

namespace {

// Flattened tree for the sampler's inner loops.
struct FlatModel {
    int n_nodes = 0; // root + latents + observed indicators
    std::vector<int> parent;                  // -1 for root
    std::vector<std::vector<int>> children;
    std::vector<double> a1, b1, a0, b0;        // edge Beta priors (by child)
    std::vector<int> observed_value;           // -1 latent, else 0/1
    std::vector<int> topo;                     // parent-before-child order
};

FlatModel flatten(const ModelTree& tree, const IndicatorAssignment& assignment) {
    FlatModel fm;
    std::map<std::string, int> index;
    std::vector<std::string> ids;

    ids.push_back(tree.root_id);
    for (const auto& id : tree.latent_ids()) ids.push_back(id);
    for (const auto& id : tree.indicator_ids())
        if (assignment.get(id) != IndicatorState::Missing) ids.push_back(id);

    fm.n_nodes = (int)ids.size();
    for (int i = 0; i < fm.n_nodes; ++i) index[ids[i]] = i;

    fm.parent.assign(fm.n_nodes, -1);
    fm.children.resize(fm.n_nodes);
    fm.a1.assign(fm.n_nodes, 0.0);
    fm.b1.assign(fm.n_nodes, 0.0);
    fm.a0.assign(fm.n_nodes, 0.0);
    fm.b0.assign(fm.n_nodes, 0.0);
    fm.observed_value.assign(fm.n_nodes, -1);

    for (int i = 1; i < fm.n_nodes; ++i) {
        const TreeNode& n = tree.nodes.at(ids[i]);
        fm.parent[i] = index.at(n.parent);
        fm.children[fm.parent[i]].push_back(i);
        const ConditionalPair& e = tree.edge_params.at(ids[i]);
        fm.a1[i] = e.pi1.alpha;
        fm.b1[i] = e.pi1.beta;
        fm.a0[i] = e.pi0.alpha;
        fm.b0[i] = e.pi0.beta;
        if (n.kind == NodeKind::Indicator)
            fm.observed_value[i] =
                assignment.get(ids[i]) == IndicatorState::Present ? 1 : 0;
    }

    // parent-before-child order for the downward pass
    fm.topo.reserve((size_t)fm.n_nodes);
    fm.topo.push_back(0);
    for (size_t head = 0; head < fm.topo.size(); ++head)
        for (int c : fm.children[fm.topo[head]]) fm.topo.push_back(c);
    return fm;
}

// One chain. theta and the per-edge conditionals get component-wise
// conjugate updates; the binary node states are then redrawn jointly by
// an upward message pass followed by downward ancestral sampling. Joint
// state draws sidestep the mode-locking that single-site flips suffer on
// near-deterministic edges. Returns the per-sweep root states (all
// sweeps; the caller discards burn-in).
std::vector<std::uint8_t> run_chain(const FlatModel& fm,
                                    const PriorConfig& prior, long n_samples,
                                    std::uint64_t seed) {
    Rng rng(seed);
    const int n = fm.n_nodes;

    std::vector<int> state(n, 0);
    std::vector<double> pi1(n, 0.5), pi0(n, 0.5);
    // per-node message to the parent given parent state 1/0, and the
    // product of child messages given own state 1/0
    std::vector<double> msg1(n, 1.0), msg0(n, 1.0);
    std::vector<double> below1(n, 1.0), below0(n, 1.0);

    double theta = rng.beta(prior.alpha, prior.beta);
    for (int i = 1; i < n; ++i) {
        pi1[i] = rng.beta(fm.a1[i], fm.b1[i]);
        pi0[i] = rng.beta(fm.a0[i], fm.b0[i]);
    }
    state[0] = rng.bernoulli(theta);
    for (int i = 1; i < n; ++i)
        state[i] = fm.observed_value[i] >= 0 ? fm.observed_value[i]
                                             : rng.bernoulli(0.5);

    std::vector<std::uint8_t> root_draws((size_t)n_samples);

    for (long sweep = 0; sweep < n_samples; ++sweep) {
        // Trait base probability: conjugate update on one Bernoulli draw.
        theta = rng.beta(prior.alpha + state[0],
                         prior.beta + 1.0 - state[0]);

        // Edge conditionals: each governs a single (parent, child) pair,
        // so the conjugate update adds at most one pseudo-count.
        for (int i = 1; i < n; ++i) {
            const int ps = state[fm.parent[i]];
            const int cs = state[i];
            pi1[i] = rng.beta(fm.a1[i] + (ps == 1 && cs == 1),
                              fm.b1[i] + (ps == 1 && cs == 0));
            pi0[i] = rng.beta(fm.a0[i] + (ps == 0 && cs == 1),
                              fm.b0[i] + (ps == 0 && cs == 0));
        }

        // Upward pass: leaf-to-root messages under the current pi draws.
        for (size_t k = fm.topo.size(); k-- > 1;) {
            const int i = fm.topo[k];
            if (fm.observed_value[i] >= 0) {
                const int v = fm.observed_value[i];
                msg1[i] = v ? pi1[i] : 1.0 - pi1[i];
                msg0[i] = v ? pi0[i] : 1.0 - pi0[i];
                continue;
            }
            double b1 = 1.0, b0 = 1.0;
            for (int c : fm.children[i]) {
                b1 *= msg1[c];
                b0 *= msg0[c];
            }
            below1[i] = b1;
            below0[i] = b0;
            msg1[i] = pi1[i] * b1 + (1.0 - pi1[i]) * b0;
            msg0[i] = pi0[i] * b1 + (1.0 - pi0[i]) * b0;
            const double scale = std::max(msg1[i], msg0[i]);
            if (scale > 0.0) {
                msg1[i] /= scale;
                msg0[i] /= scale;
            }
        }

        // Downward pass: ancestral draw of the root and every latent.
        {
            double b1 = 1.0, b0 = 1.0;
            for (int c : fm.children[0]) {
                b1 *= msg1[c];
                b0 *= msg0[c];
            }
            const double w1 = theta * b1;
            state[0] = rng.bernoulli(w1 / (w1 + (1.0 - theta) * b0));
        }
        for (size_t k = 1; k < fm.topo.size(); ++k) {
            const int i = fm.topo[k];
            if (fm.observed_value[i] >= 0) continue;
            const double p = state[fm.parent[i]] ? pi1[i] : pi0[i];
            const double w1 = p * below1[i];
            const double w0 = (1.0 - p) * below0[i];
            state[i] = rng.bernoulli(w1 / (w1 + w0));
        }

        root_draws[(size_t)sweep] = (std::uint8_t)state[0];
    }
    return root_draws;
}

// Split-chain ratio diagnostic over the kept (post burn-in) root draws.
double split_rhat(const std::vector<std::vector<std::uint8_t>>& kept) {
    std::vector<std::pair<double, double>> seg; // (mean, variance)
    for (const auto& chain : kept) {
        const size_t half = chain.size() / 2;
        for (int part = 0; part < 2; ++part) {
            const size_t lo = part == 0 ? 0 : half;
            const size_t hi = part == 0 ? half : chain.size();
            const double len = (double)(hi - lo);
            double mean = 0.0;
            for (size_t i = lo; i < hi; ++i) mean += chain[i];
            mean /= len;
            double var = 0.0;
            for (size_t i = lo; i < hi; ++i) {
                const double d = chain[i] - mean;
                var += d * d;
            }
            var /= (len - 1.0);
            seg.emplace_back(mean, var);
        }
    }
    const double m = (double)seg.size();
    const double n = (double)(kept[0].size() / 2);

    double grand = 0.0;
    for (auto& s : seg) grand += s.first;
    grand /= m;
    double b = 0.0;
    for (auto& s : seg) b += (s.first - grand) * (s.first - grand);
    b *= n / (m - 1.0);
    double w = 0.0;
    for (auto& s : seg) w += s.second;
    w /= m;

    if (w == 0.0) return b == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(((n - 1.0) / n * w + b / n) / w);
}

} // namespace

PosteriorEstimate sample_posterior(const ModelTree& tree,
                                   const IndicatorAssignment& assignment,
                                   const PriorConfig& prior,
                                   const SamplerSettings& settings,
                                   std::uint64_t seed) {
    check_inputs(tree, assignment);
    if (settings.n_samples < 1000)
        throw InvalidArgument("n_samples must be at least 1000");
    if (settings.n_chains < 2)
        throw InvalidArgument("n_chains must be at least 2");

    const FlatModel fm = flatten(tree, assignment);

    std::vector<std::vector<std::uint8_t>> kept((size_t)settings.n_chains);
    parallel_for(
        settings.n_chains,
        [&](long c) {
            const std::uint64_t chain_seed =
                derive_seed(seed, "chain", (std::uint64_t)c);
            auto draws =
                run_chain(fm, prior, settings.n_samples, chain_seed);
            const size_t burn = draws.size() / 2;
            kept[(size_t)c].assign(draws.begin() + (long)burn, draws.end());
        },
        settings.parallel_chains);

    double sum = 0.0;
    long count = 0;
    for (const auto& chain : kept) {
        sum += std::accumulate(chain.begin(), chain.end(), 0.0);
        count += (long)chain.size();
    }

    PosteriorEstimate est;
    est.method = Method::Sampled;
    est.probability = sum / (double)count;
    est.samples = count;
    est.seed = seed;
    est.rhat = split_rhat(kept);
    est.converged = *est.rhat <= kRhatThreshold;
    return est;
}

} // namespace dcm
