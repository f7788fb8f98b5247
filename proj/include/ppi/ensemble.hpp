#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ppi/model.hpp"
#include "ppi/rng.hpp"

namespace ppi {

// Inter-temporal mean allocation P-bar_i over the run's steps (rows 1..steps).
// Each step conserves the budget, so the profile sums to B.
inline std::vector<double> trace_allocation_profile(const SimulationTrace& trace) {
    const std::size_t n = trace.size();
    std::vector<double> profile(n, 0.0);
    if (trace.steps == 0) return trace.allocations.row(0);
    for (std::size_t t = 1; t <= trace.steps; ++t)
        for (std::size_t i = 0; i < n; ++i) profile[i] += trace.allocations(t, i);
    for (double& v : profile) v /= static_cast<double>(trace.steps);
    return profile;
}

// Country-level corruption D-bar = (1/(N*B)) * sum_i sum_t (P - C) over the
// run's steps.
inline double trace_corruption(const SimulationTrace& trace, double budget) {
    const std::size_t n = trace.size();
    double total = 0.0;
    for (std::size_t t = 1; t <= trace.steps; ++t)
        for (std::size_t i = 0; i < n; ++i)
            total += trace.allocations(t, i) - trace.contributions(t, i);
    return total / (static_cast<double>(n) * budget);
}

// Performance I-bar: per indicator, the mean level over its first ell_i steps
// (its initial value if it starts on target); averaged across indicators.
// Indicators that never hit their target average over the whole run.
inline double trace_performance(const SimulationTrace& trace) {
    const std::size_t n = trace.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        long ell = trace.first_hit[i];
        if (ell < 0) ell = static_cast<long>(trace.steps);
        if (ell == 0) {
            total += trace.indicators(0, i);
            continue;
        }
        double s = 0.0;
        for (long t = 1; t <= ell; ++t)
            s += trace.indicators(static_cast<std::size_t>(t), i);
        total += s / static_cast<double>(ell);
    }
    return total / static_cast<double>(n);
}

// Per-indicator mean contribution over the first ell_i steps; the y-axis of
// the free-riding analysis.
inline std::vector<double> trace_mean_contributions(const SimulationTrace& trace) {
    const std::size_t n = trace.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        long ell = trace.first_hit[i];
        if (ell <= 0) ell = static_cast<long>(trace.steps);
        if (ell == 0) {
            out[i] = trace.contributions(0, i);
            continue;
        }
        double s = 0.0;
        for (long t = 1; t <= ell; ++t)
            s += trace.contributions(static_cast<std::size_t>(t), i);
        out[i] = s / static_cast<double>(ell);
    }
    return out;
}

struct RunSummary {
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    bool converged = false;
    double corruption = 0.0;
    double performance = 0.0;
};

struct EnsembleResult {
    std::vector<double> mean_profile;        // P-bar averaged over converged runs
    std::vector<double> mean_contributions;  // per-issue, averaged over converged runs
    double mean_corruption = 0.0;
    double mean_performance = 0.0;
    std::size_t runs = 0;
    std::size_t converged_runs = 0;
    std::vector<RunSummary> run_summaries;

    // Standard error of the per-issue profile mean across converged runs.
    std::vector<double> profile_stderr;
};

// Runs M independent simulations. Per-run seeds derive from config.seed and
// the run index, and per-run results land in slots indexed by run before the
// sequential reduction, so the output is independent of the thread count.
// Non-converged runs are counted but excluded from the ensemble means.
inline EnsembleResult run_monte_carlo(const SimulationConfig& config,
                                      const SpilloverNetwork& network,
                                      std::size_t runs, std::size_t jobs = 1) {
    if (runs < 1) throw std::invalid_argument("run_monte_carlo: need at least one run");
    const std::size_t n = config.size();

    struct PerRun {
        RunSummary summary;
        std::vector<double> profile;
        std::vector<double> contributions;
    };
    std::vector<PerRun> results(runs);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            SimulationConfig run_config = config;
            run_config.seed = derive_seed(config.seed, m);
            Simulation sim(run_config, network, Rng(run_config.seed));
            const SimulationTrace trace = sim.run();
            PerRun& r = results[m];
            r.summary.seed = run_config.seed;
            r.summary.steps = trace.steps;
            r.summary.converged = trace.converged;
            r.summary.corruption = trace_corruption(trace, config.budget);
            r.summary.performance = trace_performance(trace);
            r.profile = trace_allocation_profile(trace);
            r.contributions = trace_mean_contributions(trace);
        }
    };

    if (jobs <= 1) {
        work(0, runs);
    } else {
        std::vector<std::thread> threads;
        const std::size_t chunk = (runs + jobs - 1) / jobs;
        for (std::size_t j = 0; j < jobs; ++j) {
            const std::size_t begin = j * chunk;
            const std::size_t end = std::min(runs, begin + chunk);
            if (begin >= end) break;
            threads.emplace_back(work, begin, end);
        }
        for (auto& t : threads) t.join();
    }

    EnsembleResult out;
    out.runs = runs;
    out.mean_profile.assign(n, 0.0);
    out.mean_contributions.assign(n, 0.0);
    std::vector<double> profile_sq(n, 0.0);
    for (const PerRun& r : results) {
        out.run_summaries.push_back(r.summary);
        if (!r.summary.converged) continue;
        ++out.converged_runs;
        out.mean_corruption += r.summary.corruption;
        out.mean_performance += r.summary.performance;
        for (std::size_t i = 0; i < n; ++i) {
            out.mean_profile[i] += r.profile[i];
            profile_sq[i] += r.profile[i] * r.profile[i];
            out.mean_contributions[i] += r.contributions[i];
        }
    }
    if (out.converged_runs > 0) {
        const double m = static_cast<double>(out.converged_runs);
        out.mean_corruption /= m;
        out.mean_performance /= m;
        out.profile_stderr.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            out.mean_profile[i] /= m;
            out.mean_contributions[i] /= m;
            const double var =
                std::max(0.0, profile_sq[i] / m - out.mean_profile[i] * out.mean_profile[i]);
            out.profile_stderr[i] = std::sqrt(var / m);
        }
    }
    return out;
}

}  // namespace ppi
