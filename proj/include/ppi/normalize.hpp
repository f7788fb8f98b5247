#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppi/panel.hpp"
#include "ppi/stats.hpp"

namespace ppi {

struct NormalizedValues {
    std::vector<double> values;
    bool skew_corrected = false;
};

// Min-max normalization over the pooled sample. If the result is heavily
// skewed (mean < 0.2 or > 0.8) the offending extreme is replaced by the 96th
// (4th) percentile and the output is clipped to [0,1].
inline NormalizedValues normalize_indicator(const std::vector<double>& raw,
                                            bool skew_rule = true) {
    double lo = raw.empty() ? 0.0 : raw[0], hi = lo;
    for (double v : raw) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (raw.size() < 2 || hi == lo)
        throw std::runtime_error("normalize_indicator: constant or empty indicator");

    NormalizedValues out;
    out.values.resize(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) out.values[k] = (raw[k] - lo) / (hi - lo);
    if (!skew_rule) return out;

    const double m = stats::mean(out.values);
    if (m < 0.2) {
        const double p96 = stats::percentile(raw, 96.0);
        if (p96 > lo) {
            for (std::size_t k = 0; k < raw.size(); ++k)
                out.values[k] = std::min(1.0, (raw[k] - lo) / (p96 - lo));
            out.skew_corrected = true;
        }
    } else if (m > 0.8) {
        const double p4 = stats::percentile(raw, 4.0);
        if (p4 < hi) {
            for (std::size_t k = 0; k < raw.size(); ++k)
                out.values[k] = std::max(0.0, (raw[k] - p4) / (hi - p4));
            out.skew_corrected = true;
        }
    }
    return out;
}

// Inverts an indicator (v -> 1-v) when it correlates negatively with GDP per
// capita, so that higher always means better. Returns whether it inverted.
inline bool orient_indicator(std::vector<double>& values, const std::vector<double>& gdp) {
    if (values.size() != gdp.size())
        throw std::invalid_argument("orient_indicator: size mismatch");
    const double r = stats::pearson(values, gdp);
    if (r < 0.0) {
        for (double& v : values) v = 1.0 - v;
        return true;
    }
    return false;
}

// Full pipeline over a raw panel: per-indicator pooled normalization with the
// skewness rule, then GDP-per-capita orientation. The GDP series is a side
// input, not one of the panel's indicators.
inline IndicatorPanel normalize_panel(const IndicatorPanel& raw,
                                      const std::map<std::string, std::map<int, double>>& gdp) {
    IndicatorPanel panel = raw;
    const std::size_t nc = panel.countries().size();
    const std::size_t ny = panel.years().size();

    std::vector<double> gdp_flat;
    gdp_flat.reserve(nc * ny);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto it = gdp.find(panel.countries()[c]);
        if (it == gdp.end())
            throw std::runtime_error("gdp series missing country " + panel.countries()[c]);
        for (int year : panel.years()) {
            const auto yit = it->second.find(year);
            if (yit == it->second.end())
                throw std::runtime_error("gdp series missing year " + std::to_string(year) +
                                         " for " + panel.countries()[c]);
            gdp_flat.push_back(yit->second);
        }
    }

    for (std::size_t i = 0; i < panel.indicators().size(); ++i) {
        std::vector<double> raw_values = raw.pooled(i);
        NormalizedValues norm;
        try {
            norm = normalize_indicator(raw_values);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("indicator " + panel.indicators()[i].id +
                                     " is constant and cannot be normalized");
        }
        const bool inverted = orient_indicator(norm.values, gdp_flat);
        panel.indicators()[i].skew_corrected = norm.skew_corrected;
        panel.indicators()[i].inverted = inverted;
        std::size_t k = 0;
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t y = 0; y < ny; ++y) panel.at(c, y, i) = norm.values[k++];
    }
    return panel;
}

}  // namespace ppi
