#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ppi/matrix.hpp"
#include "ppi/rng.hpp"
#include "ppi/spillover_network.hpp"

namespace ppi {

// Switchable social mechanisms, one variant per component. The full model is
// {Adaptive, Learning, Network, Endogenous}; the sensitivity analysis swaps
// one variant at a time.
struct MechanismToggles {
    enum class Government { Adaptive, Random };
    enum class Servants { Learning, Random };
    enum class Spillovers { Network, IdentityWeighted };
    enum class Supervision { Endogenous, Fixed };

    Government government = Government::Adaptive;
    Servants servants = Servants::Learning;
    Spillovers spillovers = Spillovers::Network;
    Supervision supervision = Supervision::Endogenous;

    // Self-spillover weight when spillovers == IdentityWeighted. Negative means
    // "use the mean positive off-diagonal weight of the replaced network".
    double identity_weight = -1.0;
    // Common value for f_R and f_C when supervision == Fixed.
    double fixed_supervision = 0.5;
};

struct SimulationConfig {
    std::vector<double> targets;             // T_i in [0,1]
    std::vector<double> initial_indicators;  // I_{i,0} in [0,1]
    double budget = 1.0;
    double gamma = 1.0;
    // Stagnation tolerance on |I_t - I_{t-1}|. Per-step increments scale like
    // gamma * gap * B/n, so this must sit well below that scale or runs halt
    // mid-progress; 1e-6 is small against every configuration exercised here.
    double epsilon = 1e-6;
    double target_tol = 1e-2;   // per-indicator convergence tolerance
    std::size_t max_steps = 10000;
    std::size_t rule_of_law_idx = 0;
    std::size_t control_of_corruption_idx = 0;
    MechanismToggles toggles;
    std::uint64_t seed = 0;

    std::size_t size() const { return targets.size(); }

    void validate() const {
        if (targets.empty() || targets.size() != initial_indicators.size())
            throw std::invalid_argument("config: targets/initials size mismatch");
        for (double t : targets)
            if (t < 0.0 || t > 1.0) throw std::invalid_argument("config: target outside [0,1]");
        for (double v : initial_indicators)
            if (v < 0.0 || v > 1.0) throw std::invalid_argument("config: initial outside [0,1]");
        if (budget <= 0.0 || gamma <= 0.0 || epsilon <= 0.0 || max_steps < 1)
            throw std::invalid_argument("config: budget, gamma, epsilon, max_steps must be positive");
        if (rule_of_law_idx >= targets.size() || control_of_corruption_idx >= targets.size())
            throw std::invalid_argument("config: special indicator index out of range");
        if (toggles.supervision == MechanismToggles::Supervision::Fixed &&
            (toggles.fixed_supervision < 0.0 || toggles.fixed_supervision > 1.0))
            throw std::invalid_argument("config: fixed supervision outside [0,1]");
    }
};

// Probability that institutions act, as a function of the relevant indicator
// level: I / e^{1-I}. Monotone increasing, maps [0,1] onto [0, 1].
inline double institutional_prob(double indicator_level) {
    if (indicator_level < 0.0 || indicator_level > 1.0)
        throw std::domain_error("institutional_prob: level outside [0,1]");
    return indicator_level / std::exp(1.0 - indicator_level);
}

// One indicator update: I + gamma * (T - I) * (own contribution + spill-ins),
// clamped to [0,1]. The gap keeps its sign, so indicators above a lower target
// decay toward it.
inline double update_indicator(double indicator, double target, double gamma,
                               double own_contribution, double spillin) {
    const double next = indicator + gamma * (target - indicator) * (own_contribution + spillin);
    return std::clamp(next, 0.0, 1.0);
}

// Public servant benefit: (I + P - C) * (1 - theta * f_R).
inline double servant_benefit(double indicator, double allocation, double contribution,
                              int detected, double f_rule_of_law) {
    if (contribution > allocation + 1e-12)
        throw std::invalid_argument("servant_benefit: contribution exceeds allocation");
    return (indicator + allocation - contribution) *
           (1.0 - static_cast<double>(detected) * f_rule_of_law);
}

// Independent Bernoulli detection per issue, probability proportional to the
// diverted amount. A zero total diversion means nobody can be caught.
inline std::vector<int> draw_detections(const std::vector<double>& allocations,
                                        const std::vector<double>& contributions,
                                        double f_control, Rng& rng) {
    const std::size_t n = allocations.size();
    std::vector<int> theta(n, 0);
    double total_gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) total_gap += allocations[i] - contributions[i];
    if (total_gap <= 0.0) return theta;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = f_control * (allocations[i] - contributions[i]) / total_gap;
        theta[i] = rng.bernoulli(p) ? 1 : 0;
    }
    return theta;
}

// Directional learning step for one servant. The step direction is
// sgn(dF * dC); a zero product freezes the contribution (no information, no
// move). The result is bounded to [0, P].
inline double update_contribution(double c_prev1, double c_prev2,
                                  double f_prev1, double f_prev2, double allocation) {
    const double df = f_prev1 - f_prev2;
    const double dc = c_prev1 - c_prev2;
    const double prod = df * dc;
    const double d = prod > 0.0 ? 1.0 : (prod < 0.0 ? -1.0 : 0.0);
    const double step = std::fabs(df) * (c_prev1 + c_prev2) / 2.0;
    return std::min(allocation, std::max(0.0, c_prev1 + d * step));
}

// Adaptive allocation heuristic. Propensities q_i = gap * (K_i + 1) *
// (1 - theta_i * f_R) with the gap floored at zero; degenerate propensities
// fall back to a uniform split.
inline std::vector<double> allocate(const std::vector<double>& targets,
                                    const std::vector<double>& indicators,
                                    const std::vector<std::size_t>& out_degrees,
                                    const std::vector<int>& theta,
                                    double f_rule_of_law, double budget) {
    const std::size_t n = targets.size();
    std::vector<double> q(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double gap = std::max(0.0, targets[i] - indicators[i]);
        q[i] = gap * static_cast<double>(out_degrees[i] + 1) *
               (1.0 - static_cast<double>(theta[i]) * f_rule_of_law);
        total += q[i];
    }
    std::vector<double> p(n);
    if (total <= 0.0) {
        const double uniform = budget / static_cast<double>(n);
        std::fill(p.begin(), p.end(), uniform);
    } else {
        for (std::size_t i = 0; i < n; ++i) p[i] = q[i] / total * budget;
    }
    return p;
}

// Per-step record of a full run. Row 0 holds the initial state; rows 1..steps
// hold the post-step states.
struct SimulationTrace {
    std::size_t steps = 0;
    Matrix indicators;    // (steps+1) x n
    Matrix allocations;   // (steps+1) x n
    Matrix contributions; // (steps+1) x n
    Matrix detections;    // (steps+1) x n, entries 0/1
    std::vector<long> first_hit;  // first t with |T_i - I_{i,t}| < target_tol, -1 if never
    bool converged = false;       // halting condition met within max_steps

    std::size_t size() const { return indicators.cols(); }
};

// Mutable per-issue state of the game between steps.
struct AgentState {
    std::vector<double> indicators;
    std::vector<double> allocations;
    std::vector<double> contributions_prev1;
    std::vector<double> contributions_prev2;
    std::vector<double> benefits_prev1;
    std::vector<double> benefits_prev2;
    std::vector<int> detections;
};

// One run of the behavioral game. State at t depends on t-1 only, so a run is
// strictly sequential; independent runs parallelize at the ensemble level.
class Simulation {
public:
    Simulation(const SimulationConfig& config, const SpilloverNetwork& network, Rng rng)
        : config_(config), network_(network), rng_(rng) {
        config_.validate();
        if (network_.size() != config_.size())
            throw std::invalid_argument("simulation: network size does not match config");
        out_degrees_ = network_.out_degrees();
        identity_weight_ = config_.toggles.identity_weight >= 0.0
                               ? config_.toggles.identity_weight
                               : network_.mean_positive_weight();
        init_state();
    }

    const AgentState& state() const { return state_; }
    AgentState& state() { return state_; }

    // Applies, in order: contribution updates, indicator updates (growth
    // driven by own contribution plus spill-ins), detection draws, benefit
    // updates, allocation update.
    // Detections drawn in tick t feed both the benefits of tick t and the
    // allocation computed at the end of tick t.
    void step() {
        const std::size_t n = config_.size();
        const auto& tg = config_.toggles;

        double f_rule = 0.0, f_control = 0.0;
        if (tg.supervision == MechanismToggles::Supervision::Fixed) {
            f_rule = f_control = tg.fixed_supervision;
        } else {
            f_rule = institutional_prob(state_.indicators[config_.rule_of_law_idx]);
            f_control = institutional_prob(state_.indicators[config_.control_of_corruption_idx]);
        }

        // Contributions
        std::vector<double> contributions(n);
        if (tg.servants == MechanismToggles::Servants::Random) {
            for (std::size_t i = 0; i < n; ++i)
                contributions[i] = rng_.uniform(0.0, state_.allocations[i]);
        } else {
            for (std::size_t i = 0; i < n; ++i)
                contributions[i] = update_contribution(
                    state_.contributions_prev1[i], state_.contributions_prev2[i],
                    state_.benefits_prev1[i], state_.benefits_prev2[i],
                    state_.allocations[i]);
        }

        // Indicators
        std::vector<double> indicators(n);
        for (std::size_t i = 0; i < n; ++i) {
            double spillin = 0.0;
            if (tg.spillovers == MechanismToggles::Spillovers::Network) {
                for (std::size_t j = 0; j < n; ++j)
                    spillin += contributions[j] * network_.weight(j, i);
            } else {
                spillin = identity_weight_ * contributions[i];
            }
            indicators[i] = update_indicator(state_.indicators[i], config_.targets[i],
                                             config_.gamma, contributions[i], spillin);
        }

        // Detections and benefits
        const auto theta = draw_detections(state_.allocations, contributions, f_control, rng_);
        std::vector<double> benefits(n);
        for (std::size_t i = 0; i < n; ++i)
            benefits[i] = servant_benefit(indicators[i], state_.allocations[i],
                                          contributions[i], theta[i], f_rule);

        // Allocation for the next tick
        std::vector<double> allocations;
        if (tg.government == MechanismToggles::Government::Random) {
            allocations.resize(n);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                allocations[i] = rng_.uniform();
                total += allocations[i];
            }
            for (double& p : allocations) p = p / total * config_.budget;
        } else {
            allocations = allocate(config_.targets, indicators, out_degrees_, theta,
                                   f_rule, config_.budget);
        }

        state_.contributions_prev2 = std::move(state_.contributions_prev1);
        state_.contributions_prev1 = contributions;
        state_.benefits_prev2 = std::move(state_.benefits_prev1);
        state_.benefits_prev1 = std::move(benefits);
        state_.indicators = std::move(indicators);
        state_.detections = theta;
        // Record the allocation the contributions of this tick were drawn
        // against before replacing it.
        last_allocations_ = state_.allocations;
        state_.allocations = std::move(allocations);
    }

    SimulationTrace run() {
        const std::size_t n = config_.size();
        SimulationTrace trace;
        trace.indicators = Matrix(0, n);
        trace.allocations = Matrix(0, n);
        trace.contributions = Matrix(0, n);
        trace.detections = Matrix(0, n);
        trace.first_hit.assign(n, -1);

        auto record = [&](const std::vector<double>& ind, const std::vector<double>& alloc,
                          const std::vector<double>& contrib, const std::vector<int>& theta,
                          long t) {
            trace.indicators.push_row(ind);
            trace.allocations.push_row(alloc);
            trace.contributions.push_row(contrib);
            std::vector<double> th(theta.begin(), theta.end());
            trace.detections.push_row(th);
            for (std::size_t i = 0; i < n; ++i)
                if (trace.first_hit[i] < 0 &&
                    std::fabs(config_.targets[i] - ind[i]) < config_.target_tol)
                    trace.first_hit[i] = t;
        };

        record(state_.indicators, state_.allocations, state_.contributions_prev1,
               state_.detections, 0);

        for (std::size_t t = 1; t <= config_.max_steps; ++t) {
            const std::vector<double> prev = state_.indicators;
            step();
            record(state_.indicators, last_allocations_, state_.contributions_prev1,
                   state_.detections, static_cast<long>(t));
            ++trace.steps;
            // Primary halt: every indicator within tolerance of its target.
            bool attained = true;
            for (std::size_t i = 0; i < n; ++i)
                if (std::fabs(config_.targets[i] - state_.indicators[i]) >=
                    config_.target_tol) {
                    attained = false;
                    break;
                }
            // Secondary halt: the game stagnated (all increments negligible).
            double max_change = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                max_change = std::max(max_change, std::fabs(state_.indicators[i] - prev[i]));
            if (attained || max_change < config_.epsilon) {
                trace.converged = true;
                break;
            }
        }
        return trace;
    }

private:
    void init_state() {
        const std::size_t n = config_.size();
        const double p0 = config_.budget / static_cast<double>(n);
        state_.indicators = config_.initial_indicators;
        state_.allocations.assign(n, p0);
        state_.contributions_prev1.resize(n);
        state_.contributions_prev2.resize(n);
        state_.benefits_prev1.resize(n);
        state_.benefits_prev2.resize(n);
        state_.detections.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            state_.contributions_prev1[i] = rng_.uniform(0.0, p0);
            state_.contributions_prev2[i] = rng_.uniform(0.0, p0);
            state_.benefits_prev1[i] = rng_.uniform();
            state_.benefits_prev2[i] = rng_.uniform();
        }
    }

    SimulationConfig config_;
    const SpilloverNetwork& network_;
    Rng rng_;
    std::vector<std::size_t> out_degrees_;
    double identity_weight_ = 0.0;
    AgentState state_;
    std::vector<double> last_allocations_;
};

inline SimulationTrace run_simulation(const SimulationConfig& config,
                                      const SpilloverNetwork& network) {
    Simulation sim(config, network, Rng(config.seed));
    return sim.run();
}

}  // namespace ppi
