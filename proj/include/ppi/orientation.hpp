#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ppi/matrix.hpp"
#include "ppi/spillover_network.hpp"
#include "ppi/stats.hpp"
#include "ppi/tmfg.hpp"

namespace ppi {

struct OrientationOptions {
    double tie_tolerance = 1e-3;  // |R| below this falls back to skewness
};

struct OrientedEdge {
    std::size_t from, to;
    double weight;
    double statistic;       // the pairwise likelihood-ratio statistic R
    bool tie_broken = false;
};

struct OrientationResult {
    std::vector<OrientedEdge> edges;
    std::size_t dropped_negative = 0;  // edges with rho < 0, removed entirely
};

inline std::vector<double> standardize(std::vector<double> x) {
    const double m = stats::mean(x);
    const double sd = std::sqrt(stats::variance(x));
    if (sd == 0.0) throw std::invalid_argument("standardize: constant series");
    for (double& v : x) v = (v - m) / sd;
    return x;
}

// Pairwise likelihood-ratio direction statistic on standardized series:
// R = rho * mean(x*tanh(y) - tanh(x)*y). R > 0 orients x -> y.
inline double direction_statistic(const std::vector<double>& x, const std::vector<double>& y) {
    const double rho = stats::pearson(x, y);
    double s = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t)
        s += x[t] * std::tanh(y[t]) - std::tanh(x[t]) * y[t];
    return rho * s / static_cast<double>(x.size());
}

// Turns the undirected TMFG into a directed spillover structure. Edges whose
// raw correlation is negative are dropped (the model carries positive
// spillovers only); surviving edges get weight |rho| and the direction given
// by the likelihood-ratio statistic. Near-zero statistics orient from the
// series with the larger |skewness| toward the other.
inline OrientationResult orient_edges(const UndirectedFilteredGraph& graph,
                                      const Matrix& series,
                                      const OrientationOptions& options = {}) {
    if (series.rows() != graph.n)
        throw std::invalid_argument("orient_edges: series/graph size mismatch");
    OrientationResult out;
    for (const auto& edge : graph.edges) {
        const auto x = standardize(series.row(edge.a));
        const auto y = standardize(series.row(edge.b));
        const double rho = stats::pearson(x, y);
        if (rho < 0.0) {
            ++out.dropped_negative;
            continue;
        }
        const double r = direction_statistic(x, y);
        OrientedEdge oriented{};
        oriented.weight = std::fabs(rho);
        oriented.statistic = r;
        if (std::fabs(r) >= options.tie_tolerance) {
            oriented.from = r > 0.0 ? edge.a : edge.b;
            oriented.to = r > 0.0 ? edge.b : edge.a;
        } else {
            oriented.tie_broken = true;
            const bool a_first = std::fabs(stats::skewness(x)) >= std::fabs(stats::skewness(y));
            oriented.from = a_first ? edge.a : edge.b;
            oriented.to = a_first ? edge.b : edge.a;
        }
        out.edges.push_back(oriented);
    }
    return out;
}

inline SpilloverNetwork to_network(std::size_t n, const OrientationResult& oriented,
                                   std::vector<std::string> node_ids = {}) {
    Matrix weights(n, n, 0.0);
    for (const auto& e : oriented.edges) weights(e.from, e.to) = e.weight;
    return SpilloverNetwork(std::move(weights), std::move(node_ids));
}

}  // namespace ppi
