#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ppi/ensemble.hpp"
#include "ppi/model.hpp"
#include "ppi/rng.hpp"
#include "ppi/spillover_network.hpp"

namespace ppi {

// Candidate gamma values, strictly increasing. The default grid spans [1,30]
// with one point per country in the original sample.
inline std::vector<double> gamma_grid(double lo = 1.0, double hi = 30.0,
                                      std::size_t points = 117) {
    if (lo <= 0.0 || hi < lo || points < 1)
        throw std::invalid_argument("gamma_grid: bad range");
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = lo;
        return grid;
    }
    for (std::size_t k = 0; k < points; ++k)
        grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    return grid;
}

struct CalibrationCountry {
    std::string name;
    SpilloverNetwork network;
    SimulationConfig config;          // gamma is overwritten during the search
    double empirical_corruption = 0.0;
};

inline double simulated_corruption(const CalibrationCountry& country, double gamma,
                                   std::size_t runs, std::size_t jobs = 1) {
    SimulationConfig config = country.config;
    config.gamma = gamma;
    const EnsembleResult ensemble = run_monte_carlo(config, country.network, runs, jobs);
    return ensemble.mean_corruption;
}

// Precomputed D-bar for every (country, gamma) pair; the ratios search
// re-reads pairs heavily, so everything is simulated once up front.
class CorruptionCache {
public:
    CorruptionCache(const std::vector<CalibrationCountry>& countries,
                    const std::vector<double>& grid, std::size_t runs, std::size_t jobs = 1)
        : countries_(countries.size()), grid_(grid.size()),
          values_(countries.size() * grid.size(),
                  std::numeric_limits<double>::quiet_NaN()) {
        const std::size_t total = countries_ * grid_;
        auto work = [&](std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t c = k / grid_;
                const std::size_t g = k % grid_;
                values_[k] = simulated_corruption(countries[c], grid[g], runs, 1);
            }
        };
        if (jobs <= 1) {
            work(0, total);
        } else {
            std::vector<std::thread> threads;
            const std::size_t chunk = (total + jobs - 1) / jobs;
            for (std::size_t j = 0; j < jobs; ++j) {
                const std::size_t begin = j * chunk;
                const std::size_t end = std::min(total, begin + chunk);
                if (begin >= end) break;
                threads.emplace_back(work, begin, end);
            }
            for (auto& t : threads) t.join();
        }
    }

    double at(std::size_t country, std::size_t gamma_idx) const {
        return values_[country * grid_ + gamma_idx];
    }

private:
    std::size_t countries_, grid_;
    std::vector<double> values_;
};

struct CalibrationResult {
    std::vector<double> assignment;  // gamma per country
    std::size_t reference_country = 0;
    double reference_gamma = 0.0;
    double mse = std::numeric_limits<double>::infinity();
    std::size_t distinct_count = 0;  // h, number of distinct gammas actually used
};

inline std::size_t count_distinct(const std::vector<double>& values) {
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v.size();
}

// The ratios search over an index subset of the grid. For every candidate
// reference country and reference gamma, each evaluation country takes the
// gamma that best matches the empirical corruption ratio; the winner minimizes
// the MSE of those ratio gaps. Reference candidates with zero empirical
// corruption are skipped.
inline CalibrationResult ratios_method(const std::vector<CalibrationCountry>& countries,
                                       const std::vector<double>& grid,
                                       const std::vector<std::size_t>& subset,
                                       const CorruptionCache& cache) {
    if (countries.empty() || subset.empty())
        throw std::invalid_argument("ratios_method: empty input");
    const std::size_t s = countries.size();

    CalibrationResult best;
    for (std::size_t r = 0; r < s; ++r) {
        const double empirical_ref = countries[r].empirical_corruption;
        if (empirical_ref == 0.0) continue;
        for (std::size_t gr : subset) {
            const double d_ref = cache.at(r, gr);
            if (!(d_ref > 0.0)) continue;
            std::vector<double> assignment(s);
            assignment[r] = grid[gr];
            double sse = 0.0;
            for (std::size_t e = 0; e < s; ++e) {
                if (e == r) continue;
                const double target = countries[e].empirical_corruption / empirical_ref;
                double best_gap = std::numeric_limits<double>::infinity();
                std::size_t best_g = subset.front();
                for (std::size_t g : subset) {
                    const double gap = std::fabs(target - cache.at(e, g) / d_ref);
                    if (gap < best_gap) {
                        best_gap = gap;
                        best_g = g;
                    }
                }
                assignment[e] = grid[best_g];
                sse += best_gap * best_gap;
            }
            const double mse = sse / static_cast<double>(s);
            if (mse < best.mse) {
                best.mse = mse;
                best.reference_country = r;
                best.reference_gamma = grid[gr];
                best.assignment = std::move(assignment);
            }
        }
    }
    if (best.assignment.empty())
        throw std::runtime_error("ratios_method: no usable reference country");
    best.distinct_count = count_distinct(best.assignment);
    return best;
}

// Largest jump of the inverse RMSE across the best-MSE-per-size table;
// MSE_0^{-1/2} is defined as 0 so a single cluster is selectable.
inline std::size_t jump_method(const std::vector<double>& best_mse_per_size) {
    if (best_mse_per_size.empty())
        throw std::invalid_argument("jump_method: empty MSE table");
    std::size_t h_star = 1;
    double best_jump = -std::numeric_limits<double>::infinity();
    double prev_inv = 0.0;
    for (std::size_t h = 1; h <= best_mse_per_size.size(); ++h) {
        const double mse = best_mse_per_size[h - 1];
        const double inv = 1.0 / std::sqrt(std::max(mse, 1e-300));
        const double jump = inv - prev_inv;
        if (jump > best_jump) {
            best_jump = jump;
            h_star = h;
        }
        prev_inv = inv;
    }
    return h_star;
}

struct CalibrationOptions {
    std::size_t subset_samples = 10000;
    std::uint64_t seed = 0;
};

struct FullCalibration {
    CalibrationResult selected;      // best subset of the selected size
    std::size_t h_star = 0;
    std::vector<double> best_mse_per_size;  // infinity where no sample landed
};

// Full two-stage calibration: random subset sampling over the grid, keeping
// the best MSE per distinct-count, then the jump selection of the cluster
// count.
inline FullCalibration calibrate(const std::vector<CalibrationCountry>& countries,
                                 const std::vector<double>& grid,
                                 const CorruptionCache& cache,
                                 const CalibrationOptions& options = {}) {
    const std::size_t max_h = grid.size();
    std::vector<double> best_mse(max_h, std::numeric_limits<double>::infinity());
    std::vector<CalibrationResult> best_result(max_h);

    auto consider = [&](const CalibrationResult& result) {
        const std::size_t h = result.distinct_count;
        if (h >= 1 && h <= max_h && result.mse < best_mse[h - 1]) {
            best_mse[h - 1] = result.mse;
            best_result[h - 1] = result;
        }
    };

    // The full grid bounds the achievable MSE; singletons pin down h = 1.
    {
        std::vector<std::size_t> all(grid.size());
        for (std::size_t g = 0; g < grid.size(); ++g) all[g] = g;
        consider(ratios_method(countries, grid, all, cache));
        for (std::size_t g = 0; g < grid.size(); ++g)
            consider(ratios_method(countries, grid, {g}, cache));
    }

    Rng rng(options.seed);
    for (std::size_t sample = 0; sample < options.subset_samples; ++sample) {
        const std::size_t h = 1 + static_cast<std::size_t>(rng.below(grid.size()));
        std::vector<std::size_t> pool(grid.size());
        for (std::size_t g = 0; g < grid.size(); ++g) pool[g] = g;
        // partial Fisher-Yates for a uniform size-h subset
        for (std::size_t i = 0; i < h; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(h);
        consider(ratios_method(countries, grid, pool, cache));
    }

    // A superset can always reproduce a smaller table entry, so the best-found
    // table is made non-increasing before the jump selection.
    for (std::size_t h = 1; h < max_h; ++h)
        if (best_mse[h - 1] < best_mse[h]) {
            best_mse[h] = best_mse[h - 1];
            best_result[h] = best_result[h - 1];
        }

    std::size_t usable = max_h;
    while (usable > 0 && std::isinf(best_mse[usable - 1])) --usable;
    if (usable == 0) throw std::runtime_error("calibrate: no feasible subset found");

    FullCalibration out;
    out.best_mse_per_size.assign(best_mse.begin(), best_mse.begin() + static_cast<std::ptrdiff_t>(usable));
    out.h_star = jump_method(out.best_mse_per_size);
    out.selected = best_result[out.h_star - 1];
    return out;
}

}  // namespace ppi
