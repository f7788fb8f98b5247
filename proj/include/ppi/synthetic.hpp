#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ppi/matrix.hpp"
#include "ppi/rng.hpp"
#include "ppi/spillover_network.hpp"

namespace ppi {

// Directed Erdos-Renyi G(n, m) with uniform weights in (0, max_weight].
inline SpilloverNetwork erdos_renyi_network(std::size_t n, std::size_t edges,
                                            std::uint64_t seed, double max_weight = 1.0) {
    if (edges > n * (n - 1))
        throw std::invalid_argument("erdos_renyi_network: too many edges");
    Rng rng(seed);
    Matrix w(n, n, 0.0);
    std::size_t placed = 0;
    while (placed < edges) {
        const std::size_t i = static_cast<std::size_t>(rng.below(n));
        const std::size_t j = static_cast<std::size_t>(rng.below(n));
        if (i == j || w(i, j) > 0.0) continue;
        w(i, j) = rng.uniform() * max_weight;
        if (w(i, j) == 0.0) w(i, j) = max_weight;
        ++placed;
    }
    return SpilloverNetwork(std::move(w));
}

// Heavy-tailed incoming connectivity: node j's chance of receiving an edge
// grades smoothly from sparse to hub-like, with the last `hubs` nodes the
// strongest receivers. The graded spread (rather than a two-point hub/leaf
// split) keeps many incoming-strength bins populated in the free-riding
// analysis.
inline SpilloverNetwork hub_network(std::size_t n, std::size_t hubs, std::uint64_t seed,
                                    double max_weight = 1.0) {
    Rng rng(seed);
    Matrix w(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        // receive probability rises from 0.05 to 0.85 across the node index
        const double frac = static_cast<double>(j) / static_cast<double>(n - 1);
        double receive = 0.05 + 0.6 * frac;
        if (j + hubs >= n) receive = 0.85;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            if (rng.uniform() < receive) w(i, j) = rng.uniform(0.1, max_weight);
        }
    }
    return SpilloverNetwork(std::move(w));
}

}  // namespace ppi
