#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppi/ensemble.hpp"
#include "ppi/matrix.hpp"
#include "ppi/model.hpp"
#include "ppi/panel.hpp"
#include "ppi/spillover_network.hpp"
#include "ppi/stats.hpp"

namespace ppi {

// Weighted Jaccard similarity sum min / sum max over two nonnegative arrays of
// the same shape. Used both for network similarity and for allocation-profile
// feasibility.
inline double weighted_jaccard(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("weighted_jaccard: shape mismatch");
    double mins = 0.0, maxs = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0.0 || b[i] < 0.0)
            throw std::invalid_argument("weighted_jaccard: negative entry");
        mins += std::min(a[i], b[i]);
        maxs += std::max(a[i], b[i]);
    }
    if (maxs == 0.0) throw std::invalid_argument("weighted_jaccard: both inputs all-zero");
    return mins / maxs;
}

inline double weighted_jaccard(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("weighted_jaccard: shape mismatch");
    return weighted_jaccard(a.data(), b.data());
}

// Indices of the 10 largest entries, ties broken by lower index.
inline std::vector<std::size_t> top10_set(const std::vector<double>& profile) {
    if (profile.size() < 10)
        throw std::invalid_argument("top10: need at least 10 issues");
    std::vector<std::size_t> idx(profile.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (profile[a] != profile[b]) return profile[a] > profile[b];
        return a < b;
    });
    idx.resize(10);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Membership Jaccard |A ∩ B| / |A ∪ B| of the two top-10 sets.
inline double top10_jaccard(const std::vector<double>& profile_a,
                            const std::vector<double>& profile_b) {
    const auto a = top10_set(profile_a);
    const auto b = top10_set(profile_b);
    std::vector<std::size_t> inter, uni;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
    return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

inline double performance_mean(const SimulationTrace& trace) {
    return trace_performance(trace);
}

// ---------------------------------------------------------------------------

struct AllocationProfile {
    std::string country;
    std::string mode;  // "retrospective" or "footprint:<target>"
    std::vector<double> values;   // per-issue ensemble mean P-bar_i
    std::vector<double> stderrs;
    std::map<std::string, double> pillar_totals;
    std::size_t runs = 0;
    std::size_t converged_runs = 0;
};

inline std::map<std::string, double> aggregate_by_pillar(const IndicatorPanel& panel,
                                                         const std::vector<double>& values) {
    std::map<std::string, double> totals;
    for (std::size_t i = 0; i < values.size(); ++i)
        totals[panel.indicators()[i].pillar] += values[i];
    return totals;
}

struct RunOptions {
    double budget = 1.0;
    double gamma = 1.0;
    double epsilon = 1e-3;
    double target_tol = 1e-2;
    std::size_t max_steps = 10000;
    std::size_t runs = 1000;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;
    std::string rule_of_law_id = "P12_4";
    std::string control_of_corruption_id = "P12_1";
    MechanismToggles toggles;
};

inline SimulationConfig make_config(const IndicatorPanel& panel, std::size_t country,
                                    const std::vector<double>& initials,
                                    const std::vector<double>& targets,
                                    const RunOptions& options) {
    (void)country;
    SimulationConfig config;
    config.initial_indicators = initials;
    config.targets = targets;
    config.budget = options.budget;
    config.gamma = options.gamma;
    config.epsilon = options.epsilon;
    config.target_tol = options.target_tol;
    config.max_steps = options.max_steps;
    config.seed = options.seed;
    config.toggles = options.toggles;
    config.rule_of_law_idx = panel.indicator_index(options.rule_of_law_id);
    config.control_of_corruption_idx = panel.indicator_index(options.control_of_corruption_id);
    for (double& v : config.initial_indicators) v = std::clamp(v, 0.0, 1.0);
    for (double& v : config.targets) v = std::clamp(v, 0.0, 1.0);
    return config;
}

// Retrospective run: first-year values as initial conditions, last-year values
// as targets; the ensemble-mean profile is the country's inferred priorities.
inline AllocationProfile retrospective(const IndicatorPanel& panel, const std::string& country,
                                       const SpilloverNetwork& network,
                                       const RunOptions& options) {
    const std::size_t c = panel.country_index(country);
    const auto initials = panel.snapshot(c, 0);
    const auto targets = panel.snapshot(c, panel.years().size() - 1);
    const SimulationConfig config = make_config(panel, c, initials, targets, options);
    const EnsembleResult ensemble = run_monte_carlo(config, network, options.runs, options.jobs);

    AllocationProfile profile;
    profile.country = country;
    profile.mode = "retrospective";
    profile.values = ensemble.mean_profile;
    profile.stderrs = ensemble.profile_stderr;
    profile.pillar_totals = aggregate_by_pillar(panel, profile.values);
    profile.runs = ensemble.runs;
    profile.converged_runs = ensemble.converged_runs;
    return profile;
}

// ---------------------------------------------------------------------------

struct FootprintEdge {
    std::string follower;
    std::string target;
    double feasibility = 0.0;  // weighted Jaccard vs the retrospective profile
    std::string top_pillar;
    AllocationProfile profile;
};

struct FootprintResult {
    std::vector<FootprintEdge> edges;
    std::string most_feasible;
    std::string trivial_target;  // highest target-indicator similarity
};

// Prospective analysis: the follower adopts each candidate's terminal
// indicators as targets (keeping its own network and budget) and the most
// feasible development mode is the one whose profile moves least from the
// follower's retrospective profile.
inline FootprintResult footprints(const IndicatorPanel& panel, const std::string& follower,
                                  const AllocationProfile& retrospective_profile,
                                  const SpilloverNetwork& network,
                                  const std::vector<std::string>& candidates,
                                  const RunOptions& options) {
    if (candidates.empty())
        throw std::invalid_argument("footprints: empty candidate set");
    const std::size_t f = panel.country_index(follower);
    const std::size_t last = panel.years().size() - 1;
    const auto initials = panel.snapshot(f, last);

    FootprintResult out;
    double best_feasibility = -1.0, best_similarity = -1.0;
    for (const auto& target : candidates) {
        const std::size_t ct = panel.country_index(target);
        const auto targets = panel.snapshot(ct, last);
        const SimulationConfig config = make_config(panel, f, initials, targets, options);
        const EnsembleResult ensemble =
            run_monte_carlo(config, network, options.runs, options.jobs);

        FootprintEdge edge;
        edge.follower = follower;
        edge.target = target;
        edge.profile.country = follower;
        edge.profile.mode = "footprint:" + target;
        edge.profile.values = ensemble.mean_profile;
        edge.profile.stderrs = ensemble.profile_stderr;
        edge.profile.pillar_totals = aggregate_by_pillar(panel, edge.profile.values);
        edge.profile.runs = ensemble.runs;
        edge.profile.converged_runs = ensemble.converged_runs;
        edge.feasibility = weighted_jaccard(retrospective_profile.values, edge.profile.values);
        double top = -1.0;
        for (const auto& [pillar, total] : edge.profile.pillar_totals)
            if (total > top) {
                top = total;
                edge.top_pillar = pillar;
            }
        if (edge.feasibility > best_feasibility) {
            best_feasibility = edge.feasibility;
            out.most_feasible = target;
        }
        const double similarity = weighted_jaccard(initials, targets);
        if (similarity > best_similarity) {
            best_similarity = similarity;
            out.trivial_target = target;
        }
        out.edges.push_back(std::move(edge));
    }
    return out;
}

// ---------------------------------------------------------------------------

struct CorruptionPerformanceRow {
    std::string country;
    double simulated_corruption = 0.0;
    double simulated_performance = 0.0;
    double empirical_corruption = 0.0;
    double empirical_performance = 0.0;
};

struct CorruptionPerformanceTable {
    std::vector<CorruptionPerformanceRow> rows;
    double simulated_spearman = 0.0;
    double empirical_spearman = 0.0;
};

// Empirical corruption is the time mean of the designated diversion indicator;
// empirical performance is the mean of all remaining indicators. Simulated
// values come from the per-country ensembles.
inline CorruptionPerformanceTable corruption_performance_table(
    const IndicatorPanel& panel, const std::vector<std::string>& countries,
    const std::vector<EnsembleResult>& ensembles, const std::string& corruption_id) {
    if (countries.size() != ensembles.size())
        throw std::invalid_argument("corruption_performance_table: size mismatch");
    const std::size_t corr_idx = panel.indicator_index(corruption_id);

    CorruptionPerformanceTable table;
    std::vector<double> sim_d, sim_i, emp_d, emp_i;
    for (std::size_t k = 0; k < countries.size(); ++k) {
        const std::size_t c = panel.country_index(countries[k]);
        CorruptionPerformanceRow row;
        row.country = countries[k];
        row.simulated_corruption = ensembles[k].mean_corruption;
        row.simulated_performance = ensembles[k].mean_performance;
        double corr_sum = 0.0, perf_sum = 0.0;
        for (std::size_t y = 0; y < panel.years().size(); ++y) {
            for (std::size_t i = 0; i < panel.indicators().size(); ++i) {
                if (i == corr_idx)
                    corr_sum += panel.at(c, y, i);
                else
                    perf_sum += panel.at(c, y, i);
            }
        }
        const double ny = static_cast<double>(panel.years().size());
        row.empirical_corruption = corr_sum / ny;
        row.empirical_performance =
            perf_sum / (ny * static_cast<double>(panel.indicators().size() - 1));
        sim_d.push_back(row.simulated_corruption);
        sim_i.push_back(row.simulated_performance);
        emp_d.push_back(row.empirical_corruption);
        emp_i.push_back(row.empirical_performance);
        table.rows.push_back(std::move(row));
    }
    if (countries.size() >= 2) {
        table.simulated_spearman = stats::spearman(sim_d, sim_i);
        table.empirical_spearman = stats::spearman(emp_d, emp_i);
    }
    return table;
}

// ---------------------------------------------------------------------------

struct BinnedSeries {
    std::vector<double> strength;      // bin centers (mean strength in bin)
    std::vector<double> contribution;  // mean contribution in bin
    std::vector<std::size_t> counts;
    stats::CorrelationTest test;
};

// Bins country-node observations of (incoming strength, mean contribution)
// into 20 equal-width strength bins; bins with fewer than 3 observations merge
// rightward.
inline BinnedSeries bin_strength_contributions(const std::vector<double>& strengths,
                                               const std::vector<double>& contributions,
                                               std::size_t bins = 20) {
    if (strengths.size() != contributions.size() || strengths.empty())
        throw std::invalid_argument("bin_strength_contributions: bad input");
    const double lo = *std::min_element(strengths.begin(), strengths.end());
    const double hi = *std::max_element(strengths.begin(), strengths.end());
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;

    std::vector<double> s_sum(bins, 0.0), c_sum(bins, 0.0);
    std::vector<std::size_t> count(bins, 0);
    for (std::size_t k = 0; k < strengths.size(); ++k) {
        std::size_t b = static_cast<std::size_t>((strengths[k] - lo) / width);
        b = std::min(b, bins - 1);
        s_sum[b] += strengths[k];
        c_sum[b] += contributions[k];
        ++count[b];
    }
    // Merge sparse bins rightward.
    for (std::size_t b = 0; b + 1 < bins; ++b) {
        if (count[b] > 0 && count[b] < 3) {
            s_sum[b + 1] += s_sum[b];
            c_sum[b + 1] += c_sum[b];
            count[b + 1] += count[b];
            count[b] = 0;
        }
    }
    BinnedSeries out;
    for (std::size_t b = 0; b < bins; ++b) {
        if (count[b] == 0) continue;
        out.strength.push_back(s_sum[b] / static_cast<double>(count[b]));
        out.contribution.push_back(c_sum[b] / static_cast<double>(count[b]));
        out.counts.push_back(count[b]);
    }
    if (out.strength.size() >= 3)
        out.test = stats::spearman_test(out.strength, out.contribution);
    return out;
}

// ---------------------------------------------------------------------------

struct SensitivityCountry {
    std::string name;
    SpilloverNetwork network;
    SimulationConfig config;
};

struct SensitivityVariantResult {
    std::string variant;
    std::vector<double> corruption;   // per country
    std::vector<double> performance;  // per country
    double corruption_performance_spearman = 0.0;
};

struct SensitivityResult {
    std::vector<std::string> countries;
    std::vector<SensitivityVariantResult> variants;  // [0] is the full model
    std::vector<double> top10_jaccard_per_country;   // network vs no-network
    double mean_top10_jaccard = 0.0;
    BinnedSeries strength_with_network;
    BinnedSeries strength_without_network;
};

// Reruns every country's ensemble with one mechanism switched off at a time
// and collects the comparisons the internal-validation figures are built from.
inline SensitivityResult sensitivity_suite(const std::vector<SensitivityCountry>& countries,
                                           std::size_t runs, std::size_t jobs = 1) {
    SensitivityResult out;
    for (const auto& c : countries) out.countries.push_back(c.name);

    struct Variant {
        std::string name;
        MechanismToggles toggles;
    };
    std::vector<Variant> variants;
    variants.push_back({"full", MechanismToggles{}});
    {
        MechanismToggles t;
        t.government = MechanismToggles::Government::Random;
        variants.push_back({"random-government", t});
    }
    {
        MechanismToggles t;
        t.servants = MechanismToggles::Servants::Random;
        variants.push_back({"random-servants", t});
    }
    {
        MechanismToggles t;
        t.spillovers = MechanismToggles::Spillovers::IdentityWeighted;
        variants.push_back({"no-network", t});
    }
    {
        MechanismToggles t;
        t.supervision = MechanismToggles::Supervision::Fixed;
        t.fixed_supervision = 0.5;
        variants.push_back({"fixed-supervision", t});
    }

    std::vector<std::vector<double>> full_profiles(countries.size());
    std::vector<std::vector<double>> nonet_profiles(countries.size());
    std::vector<double> strengths, contrib_with, contrib_without;

    for (const auto& variant : variants) {
        SensitivityVariantResult vr;
        vr.variant = variant.name;
        for (std::size_t k = 0; k < countries.size(); ++k) {
            SimulationConfig config = countries[k].config;
            config.toggles = variant.toggles;
            const EnsembleResult ensemble =
                run_monte_carlo(config, countries[k].network, runs, jobs);
            vr.corruption.push_back(ensemble.mean_corruption);
            vr.performance.push_back(ensemble.mean_performance);
            if (variant.name == "full") {
                full_profiles[k] = ensemble.mean_profile;
                for (std::size_t i = 0; i < countries[k].network.size(); ++i) {
                    strengths.push_back(config.gamma * countries[k].network.in_strength(i));
                    contrib_with.push_back(ensemble.mean_contributions[i]);
                }
            } else if (variant.name == "no-network") {
                nonet_profiles[k] = ensemble.mean_profile;
                for (double c : ensemble.mean_contributions) contrib_without.push_back(c);
            }
        }
        if (countries.size() >= 2)
            vr.corruption_performance_spearman = stats::spearman(vr.corruption, vr.performance);
        out.variants.push_back(std::move(vr));
    }

    for (std::size_t k = 0; k < countries.size(); ++k) {
        const double j = top10_jaccard(full_profiles[k], nonet_profiles[k]);
        out.top10_jaccard_per_country.push_back(j);
        out.mean_top10_jaccard += j;
    }
    if (!countries.empty())
        out.mean_top10_jaccard /= static_cast<double>(countries.size());

    out.strength_with_network = bin_strength_contributions(strengths, contrib_with);
    out.strength_without_network = bin_strength_contributions(strengths, contrib_without);
    return out;
}

}  // namespace ppi
