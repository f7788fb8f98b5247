#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppi/csv.hpp"
#include "ppi/matrix.hpp"

namespace ppi {

// Country x year x indicator panel of normalized values, with the pillar
// assignment and the per-indicator normalization flags.
class IndicatorPanel {
public:
    struct IndicatorInfo {
        std::string id;
        std::string pillar;
        bool skew_corrected = false;  // "N2" flag
        bool inverted = false;        // "Switch" flag

        bool operator==(const IndicatorInfo&) const = default;
    };

    IndicatorPanel() = default;
    IndicatorPanel(std::vector<std::string> countries, std::vector<int> years,
                   std::vector<IndicatorInfo> indicators)
        : countries_(std::move(countries)),
          years_(std::move(years)),
          indicators_(std::move(indicators)),
          values_(countries_.size() * years_.size() * indicators_.size(), 0.0) {}

    const std::vector<std::string>& countries() const { return countries_; }
    const std::vector<int>& years() const { return years_; }
    const std::vector<IndicatorInfo>& indicators() const { return indicators_; }
    std::vector<IndicatorInfo>& indicators() { return indicators_; }

    std::size_t country_index(const std::string& c) const {
        const auto it = std::find(countries_.begin(), countries_.end(), c);
        if (it == countries_.end()) throw std::runtime_error("unknown country " + c);
        return static_cast<std::size_t>(it - countries_.begin());
    }

    std::size_t indicator_index(const std::string& id) const {
        for (std::size_t i = 0; i < indicators_.size(); ++i)
            if (indicators_[i].id == id) return i;
        throw std::runtime_error("unknown indicator " + id);
    }

    double& at(std::size_t country, std::size_t year, std::size_t indicator) {
        return values_[(country * years_.size() + year) * indicators_.size() + indicator];
    }
    double at(std::size_t country, std::size_t year, std::size_t indicator) const {
        return values_[(country * years_.size() + year) * indicators_.size() + indicator];
    }

    // Rows = indicators, columns = years, for one country.
    Matrix country_series(std::size_t country) const {
        Matrix m(indicators_.size(), years_.size());
        for (std::size_t i = 0; i < indicators_.size(); ++i)
            for (std::size_t y = 0; y < years_.size(); ++y)
                m(i, y) = at(country, y, i);
        return m;
    }

    std::vector<double> snapshot(std::size_t country, std::size_t year) const {
        std::vector<double> v(indicators_.size());
        for (std::size_t i = 0; i < indicators_.size(); ++i) v[i] = at(country, year, i);
        return v;
    }

    // Pooled values of one indicator across all countries and years.
    std::vector<double> pooled(std::size_t indicator) const {
        std::vector<double> v;
        v.reserve(countries_.size() * years_.size());
        for (std::size_t c = 0; c < countries_.size(); ++c)
            for (std::size_t y = 0; y < years_.size(); ++y)
                v.push_back(at(c, y, indicator));
        return v;
    }

    // Per-country time-averaged feature vector, the clustering input.
    Matrix country_features() const {
        Matrix m(countries_.size(), indicators_.size());
        for (std::size_t c = 0; c < countries_.size(); ++c)
            for (std::size_t i = 0; i < indicators_.size(); ++i) {
                double s = 0.0;
                for (std::size_t y = 0; y < years_.size(); ++y) s += at(c, y, i);
                m(c, i) = s / static_cast<double>(years_.size());
            }
        return m;
    }

    bool operator==(const IndicatorPanel& other) const = default;

private:
    std::vector<std::string> countries_;
    std::vector<int> years_;
    std::vector<IndicatorInfo> indicators_;
    std::vector<double> values_;
};

// Long-format CSV: country,year,indicator,value. Every (country, year,
// indicator) cell must be present exactly once; missing cells are an error
// listing their coordinates (an external imputer has to fill them upstream).
inline IndicatorPanel load_panel(const std::string& path,
                                 const std::string& pillar_map_path = "") {
    const auto t = csv::read_file(path);
    const int ci = t.column("country"), yi = t.column("year"),
              ii = t.column("indicator"), vi = t.column("value");
    if (ci < 0 || yi < 0 || ii < 0 || vi < 0)
        throw std::runtime_error(path + ": expected columns country,year,indicator,value");

    std::vector<std::string> countries;
    std::vector<int> years;
    std::vector<std::string> indicator_ids;
    auto intern = [](std::vector<std::string>& pool, const std::string& v) {
        const auto it = std::find(pool.begin(), pool.end(), v);
        if (it != pool.end()) return static_cast<std::size_t>(it - pool.begin());
        pool.push_back(v);
        return pool.size() - 1;
    };

    struct Cell {
        std::size_t c, y, i;
        double v;
    };
    std::vector<Cell> cells;
    cells.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string context = path + " row " + std::to_string(r + 2);
        if (static_cast<int>(row.size()) <= std::max({ci, yi, ii, vi}))
            throw std::runtime_error(context + ": too few fields");
        Cell cell{};
        cell.c = intern(countries, row[static_cast<std::size_t>(ci)]);
        const int year = csv::parse_int(row[static_cast<std::size_t>(yi)], context);
        auto yit = std::find(years.begin(), years.end(), year);
        if (yit == years.end()) {
            years.push_back(year);
            cell.y = years.size() - 1;
        } else {
            cell.y = static_cast<std::size_t>(yit - years.begin());
        }
        cell.i = intern(indicator_ids, row[static_cast<std::size_t>(ii)]);
        cell.v = csv::parse_double(row[static_cast<std::size_t>(vi)], context);
        cells.push_back(cell);
    }

    std::map<std::string, std::string> pillar_of;
    if (!pillar_map_path.empty()) {
        const auto pm = csv::read_file(pillar_map_path);
        const int pi = pm.column("indicator"), pp = pm.column("pillar");
        if (pi < 0 || pp < 0)
            throw std::runtime_error(pillar_map_path + ": expected columns indicator,pillar");
        for (const auto& row : pm.rows)
            pillar_of[row[static_cast<std::size_t>(pi)]] = row[static_cast<std::size_t>(pp)];
    }

    std::vector<IndicatorPanel::IndicatorInfo> infos;
    for (const auto& id : indicator_ids) {
        IndicatorPanel::IndicatorInfo info;
        info.id = id;
        if (!pillar_map_path.empty()) {
            const auto it = pillar_of.find(id);
            if (it == pillar_of.end())
                throw std::runtime_error("indicator " + id + " missing from pillar map");
            info.pillar = it->second;
        }
        infos.push_back(info);
    }

    IndicatorPanel panel(countries, years, infos);
    std::vector<char> seen(countries.size() * years.size() * indicator_ids.size(), 0);
    for (const auto& cell : cells) {
        panel.at(cell.c, cell.y, cell.i) = cell.v;
        seen[(cell.c * years.size() + cell.y) * indicator_ids.size() + cell.i] = 1;
    }
    std::string missing;
    for (std::size_t c = 0; c < countries.size(); ++c)
        for (std::size_t y = 0; y < years.size(); ++y)
            for (std::size_t i = 0; i < indicator_ids.size(); ++i)
                if (!seen[(c * years.size() + y) * indicator_ids.size() + i]) {
                    missing += " (" + countries[c] + "," + std::to_string(years[y]) + "," +
                               indicator_ids[i] + ")";
                    if (missing.size() > 400) {
                        missing += " ...";
                        goto report;
                    }
                }
report:
    if (!missing.empty())
        throw std::runtime_error(path + ": missing cells:" + missing);
    return panel;
}

inline void save_panel(const IndicatorPanel& panel, const std::string& path) {
    csv::Writer w(path);
    w.row({"country", "year", "indicator", "value"});
    for (std::size_t c = 0; c < panel.countries().size(); ++c)
        for (std::size_t y = 0; y < panel.years().size(); ++y)
            for (std::size_t i = 0; i < panel.indicators().size(); ++i)
                w.row({panel.countries()[c], std::to_string(panel.years()[y]),
                       panel.indicators()[i].id, csv::fmt(panel.at(c, y, i))});
}

// Flags CSV: indicator,n2,switch
inline void save_flags(const IndicatorPanel& panel, const std::string& path) {
    csv::Writer w(path);
    w.row({"indicator", "n2", "switch"});
    for (const auto& info : panel.indicators())
        w.row({info.id, info.skew_corrected ? "1" : "0", info.inverted ? "1" : "0"});
}

// GDP-per-capita CSV: country,year,value. Returned as country -> year -> value.
inline std::map<std::string, std::map<int, double>> load_gdp(const std::string& path) {
    const auto t = csv::read_file(path);
    const int ci = t.column("country"), yi = t.column("year"), vi = t.column("value");
    if (ci < 0 || yi < 0 || vi < 0)
        throw std::runtime_error(path + ": expected columns country,year,value");
    std::map<std::string, std::map<int, double>> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string context = path + " row " + std::to_string(r + 2);
        out[row[static_cast<std::size_t>(ci)]][csv::parse_int(row[static_cast<std::size_t>(yi)], context)] =
            csv::parse_double(row[static_cast<std::size_t>(vi)], context);
    }
    return out;
}

}  // namespace ppi
