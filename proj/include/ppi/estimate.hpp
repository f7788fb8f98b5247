#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ppi/correlation.hpp"
#include "ppi/orientation.hpp"
#include "ppi/panel.hpp"
#include "ppi/spillover_network.hpp"
#include "ppi/tmfg.hpp"

namespace ppi {

struct EstimationOptions {
    bool differencing = true;
    double shrinkage = 0.2;
    OrientationOptions orientation;
};

struct EstimationReport {
    std::size_t undirected_edges = 0;
    std::size_t directed_edges = 0;
    std::size_t dropped_negative = 0;
    std::size_t tie_broken = 0;
    std::vector<std::string> dropped_constant;  // excluded indicators
};

// Per-country pipeline: correlation matrix -> TMFG on |rho| -> likelihood-
// ratio orientation. Indicators with constant (differenced) series carry no
// edges in the result and are listed in the report.
inline SpilloverNetwork estimate_network(const IndicatorPanel& panel, const std::string& country,
                                         const EstimationOptions& options = {},
                                         EstimationReport* report = nullptr) {
    const std::size_t c = panel.country_index(country);
    CorrelationInput input;
    input.series = panel.country_series(c);
    input.differencing = options.differencing;
    input.shrinkage = options.shrinkage;
    const CorrelationResult corr = correlation_matrix(input);

    const std::size_t k = corr.kept.size();
    Matrix abs_corr(k, k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            if (a != b) abs_corr(a, b) = std::fabs(corr.correlation(a, b));

    const UndirectedFilteredGraph graph = tmfg(abs_corr);
    const OrientationResult oriented =
        orient_edges(graph, corr.processed, options.orientation);

    const std::size_t n = panel.indicators().size();
    Matrix weights(n, n, 0.0);
    for (const auto& e : oriented.edges)
        weights(corr.kept[e.from], corr.kept[e.to]) = e.weight;

    if (report) {
        report->undirected_edges = graph.edges.size();
        report->directed_edges = oriented.edges.size();
        report->dropped_negative = oriented.dropped_negative;
        report->tie_broken = 0;
        for (const auto& e : oriented.edges)
            if (e.tie_broken) ++report->tie_broken;
        for (std::size_t i : corr.dropped)
            report->dropped_constant.push_back(panel.indicators()[i].id);
    }

    std::vector<std::string> ids;
    for (const auto& info : panel.indicators()) ids.push_back(info.id);
    return SpilloverNetwork(std::move(weights), std::move(ids));
}

}  // namespace ppi
