#include "dcm/assessment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>

#include <sstream>

#include "dcm/errors.hpp"
#include "dcm/io_util.hpp"
#include "dcm/parallel.hpp"
#include "dcm/rng.hpp"

namespace dcm {

std::map<std::string, std::vector<double>> load_ratings(
    const std::string& content, const std::string& filename) {
    std::istringstream in(content);
    std::string line;
    int lineno = 0;
    bool saw_format = false;
    std::vector<std::string> stances;
    std::map<std::string, std::vector<double>> ratings;

    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (t.find("dcm-ratings/1") != std::string::npos)
                saw_format = true;
            continue;
        }
        auto cells = split_csv_line(t);
        for (auto& c : cells) c = trim(c);
        if (stances.empty()) {
            if (cells.size() < 2 || cells[0] != "respondent")
                throw SpecError(filename,
                                "line " + std::to_string(lineno) +
                                    ": expected 'respondent,<stances...>'");
            stances.assign(cells.begin() + 1, cells.end());
            for (const auto& s : stances) ratings[s];
            continue;
        }
        if (cells.size() != stances.size() + 1)
            throw SpecError(filename, "line " + std::to_string(lineno) +
                                          ": wrong column count");
        for (size_t i = 0; i < stances.size(); ++i) {
            const std::string& raw = cells[i + 1];
            if (raw == "--" || raw.empty()) continue; // abstention
            double score = 0.0;
            try {
                score = std::stod(raw);
            } catch (const std::exception&) {
                throw SpecError(filename, "line " + std::to_string(lineno) +
                                              ": bad score '" + raw + "'");
            }
            if (score < 0.0 || score > 10.0)
                throw SpecError(filename, "line " + std::to_string(lineno) +
                                              ": score outside [0,10]");
            ratings[stances[i]].push_back(score);
        }
    }
    if (!saw_format)
        throw SpecError(filename, "missing 'dcm-ratings/1' header line");
    if (stances.empty()) throw SpecError(filename, "missing column header");
    return ratings;
}

double quantile(std::vector<double> sorted_values, double q) {
    if (sorted_values.empty())
        throw InvalidArgument("quantile of empty sample");
    const double pos = q * (double)(sorted_values.size() - 1);
    const size_t lo = (size_t)std::floor(pos);
    const size_t hi = (size_t)std::ceil(pos);
    const double frac = pos - (double)lo;
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

PosteriorSummary summarize(std::vector<double> values, Provenance prov) {
    PosteriorSummary s;
    s.n_runs = (int)values.size();
    s.prov = std::move(prov);
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             (double)values.size();
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    s.median = quantile(sorted, 0.5);
    s.q05 = quantile(sorted, 0.05);
    s.q25 = quantile(sorted, 0.25);
    s.q75 = quantile(sorted, 0.75);
    s.q95 = quantile(sorted, 0.95);
    s.values = std::move(values);
    return s;
}

PosteriorSummary run_stance(const ModelTree& tree,
                            const IndicatorPanel& panel,
                            const PriorConfig& prior, const RunConfig& config,
                            const std::string& stance_name) {
    if (config.n_runs < 1)
        throw InvalidArgument("n_runs must be at least 1");
    if (!tree.compiled) throw InvalidArgument("tree is not compiled");

    const std::vector<std::string> tree_indicators = tree.indicator_ids();
    const std::set<std::string> in_tree(tree_indicators.begin(),
                                        tree_indicators.end());

    std::vector<double> values((size_t)config.n_runs, 0.0);
    std::vector<std::uint8_t> flagged((size_t)config.n_runs, 0);
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;
    std::string failure;

    parallel_for(
        config.n_runs,
        [&](long r) {
            if (failed.load(std::memory_order_relaxed)) return;
            try {
                // One realization of the whole panel per (system, run):
                // seeds ignore stance, prior and variant, so every cell
                // sharing a run index sees the same indicator values.
                const std::uint64_t assign_seed = derive_seed(
                    config.master_seed, "assign", panel.system_id,
                    (std::uint64_t)r);
                IndicatorAssignment assignment;
                if (!panel.credences.empty()) {
                    const IndicatorAssignment full =
                        sample_assignment(panel, assign_seed);
                    for (const auto& [id, st] : full.values)
                        if (in_tree.count(id)) assignment.values[id] = st;
                }

                PosteriorEstimate est;
                if (config.mode == Method::Exact) {
                    est = exact_posterior(tree, assignment, prior);
                } else {
                    const std::uint64_t mcmc_seed = derive_seed(
                        config.master_seed, "mcmc",
                        panel.system_id + "/" + stance_name,
                        (std::uint64_t)r);
                    SamplerSettings st = config.sampler;
                    st.parallel_chains = false; // runs already parallel
                    est = sample_posterior(tree, assignment, prior, st,
                                           mcmc_seed);
                }
                values[(size_t)r] = est.probability;
                flagged[(size_t)r] = est.converged ? 0 : 1;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure.empty()) failure = e.what();
            }
        },
        config.parallel_runs);

    if (failed.load())
        throw InvalidArgument("run failed for stance '" + stance_name +
                              "': " + failure);

    PosteriorSummary s = summarize(
        std::move(values), Provenance{panel.system_id, stance_name,
                                      prior.label, config.master_seed});
    s.converged =
        std::none_of(flagged.begin(), flagged.end(), [](auto f) { return f; });
    return s;
}

StanceWeights weights_from_ratings(
    const std::map<std::string, std::vector<double>>& ratings) {
    StanceWeights w;
    double total = 0.0;
    for (const auto& [stance, scores] : ratings) {
        if (scores.empty())
            throw InvalidArgument("stance '" + stance + "' has no scores");
        const double mean =
            std::accumulate(scores.begin(), scores.end(), 0.0) /
            (double)scores.size();
        w.weights[stance] = mean;
        total += mean;
    }
    if (total <= 0.0) throw InvalidArgument("all ratings are zero");
    for (auto& [stance, weight] : w.weights) weight /= total;
    return w;
}

PosteriorSummary aggregate_stances(
    const std::map<std::string, PosteriorSummary>& summaries,
    const StanceWeights& weights, int pool_size, std::uint64_t seed) {
    if (summaries.empty()) throw InvalidArgument("nothing to aggregate");
    if (summaries.size() != weights.weights.size())
        throw InvalidArgument("stance/weight mismatch");
    for (const auto& [stance, summary] : summaries) {
        (void)summary;
        if (!weights.weights.count(stance))
            throw InvalidArgument("no weight for stance '" + stance + "'");
    }

    // Cumulative weights in stance-name order (std::map), so the pool is
    // reproducible.
    std::vector<const PosteriorSummary*> order;
    std::vector<double> cum;
    double acc = 0.0;
    for (const auto& [stance, summary] : summaries) {
        acc += weights.weights.at(stance);
        order.push_back(&summary);
        cum.push_back(acc);
    }

    Rng rng(seed);
    std::vector<double> pool((size_t)pool_size);
    for (int k = 0; k < pool_size; ++k) {
        const double u = rng.uniform() * acc;
        const size_t idx = (size_t)(std::upper_bound(cum.begin(), cum.end(),
                                                     u) -
                                    cum.begin());
        const auto& vals = order[std::min(idx, order.size() - 1)]->values;
        const size_t j = (size_t)(rng.uniform() * (double)vals.size());
        pool[(size_t)k] = vals[std::min(j, vals.size() - 1)];
    }

    const Provenance& first = summaries.begin()->second.prov;
    return summarize(std::move(pool),
                     Provenance{first.system_id, "aggregate",
                                first.prior_label, seed});
}

double weighted_median_average(
    const std::map<std::string, PosteriorSummary>& summaries,
    const StanceWeights& weights) {
    double out = 0.0;
    for (const auto& [stance, summary] : summaries)
        out += weights.weights.at(stance) * summary.median;
    return out;
}

double likelihood_ratio(double prior_mean, double posterior) {
    if (!(prior_mean > 0.0 && prior_mean < 1.0))
        throw InvalidArgument("prior mean must lie strictly inside (0,1)");
    if (!(posterior > 0.0 && posterior < 1.0))
        throw InvalidArgument("posterior must lie strictly inside (0,1)");
    const double posterior_odds = posterior / (1.0 - posterior);
    const double prior_odds = prior_mean / (1.0 - prior_mean);
    return posterior_odds / prior_odds;
}

} // namespace dcm
