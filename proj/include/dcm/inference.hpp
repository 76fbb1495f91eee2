#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "dcm/tree.hpp"

namespace dcm {

enum class IndicatorState { Present, Absent, Missing };

/// Binary (possibly partial) observation of the tree's indicators.
/// Indicators not listed are missing; missing indicators contribute no
/// evidence at all (they are excluded from the likelihood, not imputed).
struct IndicatorAssignment {
    std::map<std::string, IndicatorState> values;

    void set(const std::string& id, bool present) {
        values[id] =
            present ? IndicatorState::Present : IndicatorState::Absent;
    }
    IndicatorState get(const std::string& id) const {
        auto it = values.find(id);
        return it == values.end() ? IndicatorState::Missing : it->second;
    }
};

/// Beta prior over the root trait's base probability.
struct PriorConfig {
    double alpha = 2.0;
    double beta = 10.0;
    std::string label = "baseline";

    double mean() const { return alpha / (alpha + beta); }
};

enum class Method { Exact, Sampled };

struct PosteriorEstimate {
    double probability = 0.0;
    Method method = Method::Exact;
    std::optional<long> samples;
    std::optional<double> rhat;
    std::optional<std::uint64_t> seed;
    /// False when the split-chain diagnostic exceeded the 1.05 threshold;
    /// the estimate is still returned.
    bool converged = true;
};

/// Posterior probability of the root trait by upward message passing on
/// the forest, using each edge's marginal means Pr(child|parent = 1/0).
/// Exact for a single observation set because every conditional
/// probability governs one Bernoulli draw, so its Beta integrates out to
/// its mean. With no observed indicators the result equals the prior mean
/// exactly.
PosteriorEstimate exact_posterior(const ModelTree& tree,
                                  const IndicatorAssignment& assignment,
                                  const PriorConfig& prior);

/// Independent brute-force reference: sums the joint over all 2^L
/// configurations of the root plus latent nodes. Guarded to L <= 20.
PosteriorEstimate enumerate_posterior(const ModelTree& tree,
                                      const IndicatorAssignment& assignment,
                                      const PriorConfig& prior);

/// Maximum latent (feature/subfeature) count enumerate_posterior accepts.
inline constexpr int kMaxEnumerationLatents = 20;

struct SamplerSettings {
    long n_samples = 20000; // sweeps per chain; first half is burn-in
    int n_chains = 4;
    bool parallel_chains = true;
};

/// Gibbs sampler over the full Beta hierarchy. The trait's base
/// probability and every edge's two conditional probabilities get
/// component-wise conjugate Beta updates; the binary node states are then
/// redrawn jointly per sweep (upward messages, downward ancestral draws),
/// which mixes where single-site flips lock up on near-deterministic
/// edges. Returns the post-burn-in mean of the root samples with a
/// split-chain convergence diagnostic. Bit-reproducible for a fixed
/// (seed, n_samples, n_chains).
PosteriorEstimate sample_posterior(const ModelTree& tree,
                                   const IndicatorAssignment& assignment,
                                   const PriorConfig& prior,
                                   const SamplerSettings& settings,
                                   std::uint64_t seed);

/// Split-chain diagnostic threshold above which an estimate is flagged.
inline constexpr double kRhatThreshold = 1.05;

} // namespace dcm
