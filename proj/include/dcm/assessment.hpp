#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dcm/evidence.hpp"
#include "dcm/inference.hpp"
#include "dcm/tree.hpp"

namespace dcm {

struct RunConfig {
    int n_runs = 400;
    Method mode = Method::Exact;
    SamplerSettings sampler;
    std::uint64_t master_seed = 0;
    double concentration = kDefaultConcentration;
    bool parallel_runs = true;
};

struct Provenance {
    std::string system_id;
    std::string stance;
    std::string prior_label;
    std::uint64_t master_seed = 0;
};

/// Distribution of per-run posteriors with its summary statistics. The
/// statistics are always recomputable from `values`.
struct PosteriorSummary {
    std::vector<double> values;
    double median = 0.0;
    double mean = 0.0;
    double q05 = 0.0, q25 = 0.0, q75 = 0.0, q95 = 0.0;
    int n_runs = 0;
    Provenance prov;
    bool converged = true; // false if any sampled run was flagged
};

/// Recomputes the summary statistics from a value vector.
PosteriorSummary summarize(std::vector<double> values, Provenance prov);

/// Linear-interpolation quantile (the common "type 7" definition).
double quantile(std::vector<double> sorted_values, double q);

/// The run protocol: draws `n_runs` indicator realizations from the panel
/// (one seed per run derived from the master seed and the system id, so
/// realizations are shared across stances and priors) and computes one
/// posterior per realization. A failing run aborts the whole summary.
/// Runs are evaluated in parallel and reduced in run order.
PosteriorSummary run_stance(const ModelTree& tree,
                            const IndicatorPanel& panel,
                            const PriorConfig& prior, const RunConfig& config,
                            const std::string& stance_name);

/// Normalized stance weights.
struct StanceWeights {
    std::map<std::string, double> weights; // sum to 1
};

/// weight = mean(scores) / sum of means; abstentions are excluded from
/// the means (each stance needs at least one score).
StanceWeights weights_from_ratings(
    const std::map<std::string, std::vector<double>>& ratings);

/// Parses the plausibility ratings table (header "dcm-ratings/1"; first
/// column names the respondent, remaining columns are stances; "--"
/// marks an abstention and is excluded, not imputed).
std::map<std::string, std::vector<double>> load_ratings(
    const std::string& content, const std::string& filename = "");

/// Pools the per-stance run distributions by weighted resampling
/// (stance by weight, then a uniform run value within the stance) and
/// summarizes the pool. Provenance records the pool seed as master seed.
PosteriorSummary aggregate_stances(
    const std::map<std::string, PosteriorSummary>& summaries,
    const StanceWeights& weights, int pool_size, std::uint64_t seed);

inline constexpr int kDefaultPoolSize = 10000;

/// Scalar cross-check for aggregation: weighted average of the stance
/// medians.
double weighted_median_average(
    const std::map<std::string, PosteriorSummary>& summaries,
    const StanceWeights& weights);

/// Posterior odds divided by prior odds. Both arguments must lie strictly
/// inside (0, 1).
double likelihood_ratio(double prior_mean, double posterior);

} // namespace dcm
