#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ppi/analysis.hpp"
#include "ppi/synthetic.hpp"

using namespace ppi;

namespace {

IndicatorPanel synthetic_panel(std::size_t countries, std::size_t years,
                               std::size_t indicators, std::uint64_t seed) {
    std::vector<IndicatorPanel::IndicatorInfo> infos(indicators);
    for (std::size_t i = 0; i < indicators; ++i) {
        infos[i].id = "N" + std::to_string(i);
        infos[i].pillar = "P" + std::to_string(i % 3);
    }
    std::vector<std::string> names;
    for (std::size_t c = 0; c < countries; ++c) names.push_back("C" + std::to_string(c));
    std::vector<int> year_ids;
    for (std::size_t y = 0; y < years; ++y) year_ids.push_back(2000 + static_cast<int>(y));
    IndicatorPanel panel(names, year_ids, infos);
    Rng rng(seed);
    for (std::size_t c = 0; c < countries; ++c)
        for (std::size_t i = 0; i < indicators; ++i) {
            const double start = rng.uniform(0.05, 0.5);
            const double end = rng.uniform(start, 0.95);
            for (std::size_t y = 0; y < years; ++y)
                panel.at(c, y, i) =
                    start + (end - start) * static_cast<double>(y) /
                                static_cast<double>(years - 1);
        }
    return panel;
}

RunOptions quick_options(std::size_t n) {
    RunOptions options;
    options.runs = 30;
    options.rule_of_law_id = "N0";
    options.control_of_corruption_id = "N" + std::to_string(n > 1 ? 1 : 0);
    options.seed = 5;
    return options;
}

}  // namespace

TEST_CASE("weighted jaccard fixtures") {
    CHECK(weighted_jaccard(std::vector<double>{0.3, 0.7},
                           std::vector<double>{0.3, 0.7}) == 1.0);
    CHECK(weighted_jaccard(std::vector<double>{1.0, 0.0},
                           std::vector<double>{0.0, 1.0}) == 0.0);
    Matrix a(2, 2, 0.0), b(2, 2, 0.0);
    a(0, 1) = 0.5;
    a(1, 0) = 0.2;
    b(0, 1) = 0.4;
    b(1, 0) = 0.3;
    CHECK_THAT(weighted_jaccard(a, b), Catch::Matchers::WithinAbs(0.75, 1e-12));
    // symmetry
    CHECK(weighted_jaccard(a, b) == weighted_jaccard(b, a));
    CHECK_THROWS(weighted_jaccard(std::vector<double>{0.0}, std::vector<double>{0.0}));
    CHECK_THROWS(weighted_jaccard(std::vector<double>{0.1}, std::vector<double>{0.1, 0.2}));
}

TEST_CASE("top-10 jaccard fixtures") {
    std::vector<double> base(20);
    for (std::size_t i = 0; i < 20; ++i) base[i] = static_cast<double>(i);
    CHECK(top10_jaccard(base, base) == 1.0);

    // disjoint top-10 sets
    std::vector<double> reversed(base.rbegin(), base.rend());
    CHECK(top10_jaccard(base, reversed) == 0.0);

    // 5 shared of 15 union: shift the top window by five positions
    std::vector<double> shifted(20, 0.0);
    for (std::size_t i = 5; i < 15; ++i) shifted[i] = 100.0 + static_cast<double>(i);
    CHECK_THAT(top10_jaccard(base, shifted), Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));

    CHECK_THROWS(top10_jaccard(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0)));
}

TEST_CASE("spearman fixtures") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> rev{4, 3, 2, 1};
    const std::vector<double> mixed{1, 3, 2, 4};
    const std::vector<double> flat{1, 1, 1, 1};
    CHECK(stats::spearman(x, x) == 1.0);
    CHECK(stats::spearman(x, rev) == -1.0);
    CHECK_THAT(stats::spearman(x, mixed), Catch::Matchers::WithinAbs(0.8, 1e-12));
    CHECK_THROWS(stats::spearman(flat, x));
}

TEST_CASE("performance mean fixtures") {
    SimulationTrace trace;
    trace.steps = 3;
    trace.indicators = Matrix(0, 1);
    trace.indicators.push_row({0.05});
    trace.indicators.push_row({0.2});
    trace.indicators.push_row({0.4});
    trace.indicators.push_row({0.6});
    trace.allocations = Matrix(4, 1, 1.0);
    trace.contributions = Matrix(4, 1, 0.0);
    trace.first_hit = {3};
    CHECK_THAT(performance_mean(trace), Catch::Matchers::WithinAbs(0.4, 1e-12));

    SECTION("constant indicators at one half") {
        SimulationTrace flat;
        flat.steps = 5;
        flat.indicators = Matrix(6, 3, 0.5);
        flat.allocations = Matrix(6, 3, 1.0 / 3.0);
        flat.contributions = Matrix(6, 3, 0.0);
        flat.first_hit = {2, 4, 5};
        CHECK_THAT(performance_mean(flat), Catch::Matchers::WithinAbs(0.5, 1e-12));
    }
    SECTION("an indicator starting on target contributes its initial value") {
        trace.first_hit = {0};
        CHECK_THAT(performance_mean(trace), Catch::Matchers::WithinAbs(0.05, 1e-12));
    }
    SECTION("permutation invariance") {
        SimulationTrace two;
        two.steps = 2;
        two.indicators = Matrix(0, 2);
        two.indicators.push_row({0.1, 0.9});
        two.indicators.push_row({0.2, 0.8});
        two.indicators.push_row({0.3, 0.7});
        two.allocations = Matrix(3, 2, 0.5);
        two.contributions = Matrix(3, 2, 0.0);
        two.first_hit = {2, 1};
        SimulationTrace swapped;
        swapped.steps = 2;
        swapped.indicators = Matrix(0, 2);
        swapped.indicators.push_row({0.9, 0.1});
        swapped.indicators.push_row({0.8, 0.2});
        swapped.indicators.push_row({0.7, 0.3});
        swapped.allocations = Matrix(3, 2, 0.5);
        swapped.contributions = Matrix(3, 2, 0.0);
        swapped.first_hit = {1, 2};
        CHECK_THAT(performance_mean(two),
                   Catch::Matchers::WithinAbs(performance_mean(swapped), 1e-12));
    }
}

TEST_CASE("retrospective profile sums to the budget by pillar") {
    const IndicatorPanel panel = synthetic_panel(2, 4, 12, 3);
    const SpilloverNetwork network = erdos_renyi_network(12, 30, 8);
    RunOptions options = quick_options(12);
    const AllocationProfile profile = retrospective(panel, "C0", network, options);
    REQUIRE(profile.converged_runs > 0);
    double total = 0.0;
    for (double v : profile.values) total += v;
    CHECK_THAT(total, Catch::Matchers::WithinAbs(options.budget, 1e-6));
    double pillar_total = 0.0;
    for (const auto& [pillar, v] : profile.pillar_totals) pillar_total += v;
    CHECK_THAT(pillar_total, Catch::Matchers::WithinAbs(total, 1e-9));
    CHECK(profile.pillar_totals.size() == 3);
    CHECK(profile.mode == "retrospective");
}

TEST_CASE("allocation ordering does not follow gap ordering alone") {
    // node 0: small gap but high out-degree; node 1: large gap, no edges
    const auto p = allocate({0.5, 0.5, 0.5}, {0.3, 0.2, 0.5}, {2, 0, 0}, {0, 0, 0},
                            0.0, 1.0);
    // q = (0.2*3, 0.3*1, 0) = (0.6, 0.3, 0)
    CHECK(p[0] > p[1]);
}

TEST_CASE("footprints rank candidate targets by profile similarity") {
    const IndicatorPanel panel = synthetic_panel(4, 4, 12, 17);
    const SpilloverNetwork network = erdos_renyi_network(12, 30, 18);
    RunOptions options = quick_options(12);
    const AllocationProfile retro = retrospective(panel, "C0", network, options);
    const FootprintResult result =
        footprints(panel, "C0", retro, network, {"C1", "C2", "C3"}, options);
    REQUIRE(result.edges.size() == 3);
    for (const auto& edge : result.edges) {
        CHECK(edge.follower == "C0");
        CHECK(edge.feasibility >= 0.0);
        CHECK(edge.feasibility <= 1.0);
        CHECK_FALSE(edge.top_pillar.empty());
    }
    // most_feasible is the argmax of feasibility
    const auto it = std::max_element(result.edges.begin(), result.edges.end(),
                                     [](const FootprintEdge& a, const FootprintEdge& b) {
                                         return a.feasibility < b.feasibility;
                                     });
    CHECK(result.most_feasible == it->target);
    CHECK_FALSE(result.trivial_target.empty());
    CHECK_THROWS(footprints(panel, "C0", retro, network, {}, options));
}

TEST_CASE("feasibility of a profile with itself is one") {
    CHECK(weighted_jaccard(std::vector<double>{0.2, 0.5, 0.3},
                           std::vector<double>{0.2, 0.5, 0.3}) == 1.0);
}

TEST_CASE("corruption-performance table and rank correlations") {
    const IndicatorPanel panel = synthetic_panel(4, 4, 6, 23);
    std::vector<EnsembleResult> ensembles(4);
    // fabricate ensembles with perfectly opposed rankings
    for (std::size_t k = 0; k < 4; ++k) {
        ensembles[k].mean_corruption = static_cast<double>(k);
        ensembles[k].mean_performance = 10.0 - static_cast<double>(k);
    }
    const auto table = corruption_performance_table(panel, {"C0", "C1", "C2", "C3"},
                                                    ensembles, "N1");
    CHECK(table.simulated_spearman == -1.0);
    REQUIRE(table.rows.size() == 4);
    for (const auto& row : table.rows) {
        CHECK(row.empirical_corruption >= 0.0);
        CHECK(row.empirical_performance >= 0.0);
        CHECK(row.empirical_performance <= 1.0);
    }
    // empirical performance excludes the corruption indicator: verify by hand
    const std::size_t c = panel.country_index("C0");
    double expected = 0.0;
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t i = 0; i < 6; ++i)
            if (panel.indicators()[i].id != "N1") expected += panel.at(c, y, i);
    expected /= 4.0 * 5.0;
    CHECK_THAT(table.rows[0].empirical_performance,
               Catch::Matchers::WithinAbs(expected, 1e-12));
}

TEST_CASE("strength binning merges sparse bins rightward") {
    std::vector<double> strengths, contributions;
    // cluster of 30 points near 0, 2 isolated points near 1 (sparse bin), 30 near 2
    for (int k = 0; k < 30; ++k) {
        strengths.push_back(0.001 * k);
        contributions.push_back(0.5);
    }
    strengths.push_back(1.0);
    contributions.push_back(0.4);
    strengths.push_back(1.01);
    contributions.push_back(0.4);
    for (int k = 0; k < 30; ++k) {
        strengths.push_back(2.0 + 0.001 * k);
        contributions.push_back(0.3);
    }
    const BinnedSeries series = bin_strength_contributions(strengths, contributions);
    for (std::size_t b = 0; b + 1 < series.counts.size(); ++b)
        CHECK(series.counts[b] >= 3);
    std::size_t total = 0;
    for (std::size_t c : series.counts) total += c;
    CHECK(total == strengths.size());
}

TEST_CASE("profiles are stable across disjoint seed sets") {
    const SpilloverNetwork network = erdos_renyi_network(10, 25, 61);
    SimulationConfig config;
    config.targets.assign(10, 0.0);
    config.initial_indicators.assign(10, 0.0);
    Rng rng(62);
    for (std::size_t i = 0; i < 10; ++i) {
        config.targets[i] = rng.uniform(0.5, 1.0);
        config.initial_indicators[i] = rng.uniform(0.0, config.targets[i]);
    }
    config.seed = 100;
    const EnsembleResult a = run_monte_carlo(config, network, 400, 1);
    config.seed = 999;
    const EnsembleResult b = run_monte_carlo(config, network, 400, 1);
    REQUIRE(a.converged_runs > 300);
    REQUIRE(b.converged_runs > 300);
    for (std::size_t i = 0; i < 10; ++i) {
        const double se = std::max(a.profile_stderr[i], b.profile_stderr[i]);
        CHECK(std::fabs(a.mean_profile[i] - b.mean_profile[i]) < 4.0 * se + 1e-9);
    }
}

TEST_CASE("sensitivity suite produces the comparison set") {
    std::vector<SensitivityCountry> countries;
    for (std::size_t k = 0; k < 3; ++k) {
        SensitivityCountry sc;
        sc.name = "C" + std::to_string(k);
        sc.network = hub_network(12, 2, 70 + k);
        sc.config.targets.assign(12, 0.0);
        sc.config.initial_indicators.assign(12, 0.0);
        Rng rng(80 + k);
        for (std::size_t i = 0; i < 12; ++i) {
            sc.config.targets[i] = rng.uniform(0.5, 1.0);
            sc.config.initial_indicators[i] = rng.uniform(0.0, sc.config.targets[i]);
        }
        sc.config.seed = 90 + k;
        countries.push_back(std::move(sc));
    }
    const SensitivityResult result = sensitivity_suite(countries, 40, 1);
    REQUIRE(result.variants.size() == 5);
    CHECK(result.variants[0].variant == "full");
    for (const auto& v : result.variants) {
        CHECK(v.corruption.size() == 3);
        CHECK(v.performance.size() == 3);
    }
    CHECK(result.top10_jaccard_per_country.size() == 3);
    for (double j : result.top10_jaccard_per_country) {
        CHECK(j >= 0.0);
        CHECK(j <= 1.0);
    }
    CHECK_FALSE(result.strength_with_network.strength.empty());
    CHECK_FALSE(result.strength_without_network.strength.empty());
}
