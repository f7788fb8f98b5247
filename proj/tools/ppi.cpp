// Command-line surface for the policy-priority toolkit: panel normalization,
// spillover-network estimation, simulation, calibration and the
// retrospective/prospective analyses. Every command writes a manifest
// sufficient to re-run it bit-identically.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppi/analysis.hpp"
#include "ppi/calibration.hpp"
#include "ppi/csv.hpp"
#include "ppi/ensemble.hpp"
#include "ppi/estimate.hpp"
#include "ppi/manifest.hpp"
#include "ppi/model.hpp"
#include "ppi/normalize.hpp"
#include "ppi/panel.hpp"
#include "ppi/spillover_network.hpp"
#include "ppi/ward.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t runs = 1000;
    std::size_t jobs = 1;
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
    const char* env_out = std::getenv("PPI_OUT_DIR");
    common.out_dir = env_out ? env_out : "out";
    cmd->add_option("--out", common.out_dir, "Output directory")
        ->capture_default_str();
    cmd->add_option("--seed", common.seed, "Master RNG seed")->capture_default_str();
    cmd->add_option("--runs", common.runs, "Monte Carlo runs per ensemble")
        ->capture_default_str();
    cmd->add_option("--jobs", common.jobs, "Worker threads")->capture_default_str();
    cmd->add_flag("--strict", common.strict,
                  "Treat non-convergence warnings as failures");
}

struct ModelFlags {
    double budget = 1.0;
    double gamma = 1.0;
    double epsilon = 1e-3;
    double target_tol = 1e-2;
    std::size_t max_steps = 10000;
    std::string rule_of_law = "P12_4";
    std::string control_of_corruption = "P12_1";
    std::string government = "adaptive";
    std::string servants = "learning";
    std::string spillovers = "network";
    std::string supervision = "endogenous";
    double identity_weight = -1.0;
    double fixed_supervision = 0.5;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
    cmd->add_option("--budget", flags.budget, "Budget B")->capture_default_str();
    cmd->add_option("--gamma", flags.gamma, "Resource impact gamma")->capture_default_str();
    cmd->add_option("--epsilon", flags.epsilon, "Halting tolerance")->capture_default_str();
    cmd->add_option("--target-tol", flags.target_tol, "Per-indicator convergence tolerance")
        ->capture_default_str();
    cmd->add_option("--max-steps", flags.max_steps, "Step limit per run")
        ->capture_default_str();
    cmd->add_option("--rule-of-law", flags.rule_of_law, "Rule-of-law indicator id")
        ->capture_default_str();
    cmd->add_option("--control-of-corruption", flags.control_of_corruption,
                    "Control-of-corruption indicator id")
        ->capture_default_str();
    cmd->add_option("--government", flags.government, "adaptive|random")
        ->check(CLI::IsMember({"adaptive", "random"}))
        ->capture_default_str();
    cmd->add_option("--servants", flags.servants, "learning|random")
        ->check(CLI::IsMember({"learning", "random"}))
        ->capture_default_str();
    cmd->add_option("--spillovers", flags.spillovers, "network|identity")
        ->check(CLI::IsMember({"network", "identity"}))
        ->capture_default_str();
    cmd->add_option("--supervision", flags.supervision, "endogenous|fixed")
        ->check(CLI::IsMember({"endogenous", "fixed"}))
        ->capture_default_str();
    cmd->add_option("--identity-weight", flags.identity_weight,
                    "Self-spillover weight for --spillovers identity (negative: "
                    "mean positive weight of the replaced network)")
        ->capture_default_str();
    cmd->add_option("--fixed-supervision", flags.fixed_supervision,
                    "Common f_R = f_C value for --supervision fixed")
        ->capture_default_str();
}

ppi::MechanismToggles to_toggles(const ModelFlags& flags) {
    ppi::MechanismToggles t;
    if (flags.government == "random") t.government = ppi::MechanismToggles::Government::Random;
    if (flags.servants == "random") t.servants = ppi::MechanismToggles::Servants::Random;
    if (flags.spillovers == "identity")
        t.spillovers = ppi::MechanismToggles::Spillovers::IdentityWeighted;
    if (flags.supervision == "fixed")
        t.supervision = ppi::MechanismToggles::Supervision::Fixed;
    t.identity_weight = flags.identity_weight;
    t.fixed_supervision = flags.fixed_supervision;
    return t;
}

ppi::RunOptions to_run_options(const ModelFlags& flags, const CommonOptions& common) {
    ppi::RunOptions o;
    o.budget = flags.budget;
    o.gamma = flags.gamma;
    o.epsilon = flags.epsilon;
    o.target_tol = flags.target_tol;
    o.max_steps = flags.max_steps;
    o.runs = common.runs;
    o.jobs = common.jobs;
    o.seed = common.seed;
    o.rule_of_law_id = flags.rule_of_law;
    o.control_of_corruption_id = flags.control_of_corruption;
    o.toggles = to_toggles(flags);
    return o;
}

ppi::RunManifest start_manifest(const std::string& command, const CommonOptions& common,
                                const std::string& config_path) {
    fs::create_directories(common.out_dir);
    ppi::RunManifest m;
    m.command = command;
    m.config_path = config_path;
    m.seed = common.seed;
    m.out_dir = common.out_dir;
    return m;
}

std::string network_path(const std::string& dir, const std::string& country) {
    return dir + "/network_" + country + ".csv";
}

void write_profile_csv(const ppi::IndicatorPanel& panel, const ppi::AllocationProfile& profile,
                       const std::string& path) {
    ppi::csv::Writer w(path);
    w.row({"indicator", "pillar", "allocation", "stderr"});
    for (std::size_t i = 0; i < profile.values.size(); ++i)
        w.row({panel.indicators()[i].id, panel.indicators()[i].pillar,
               ppi::csv::fmt(profile.values[i]),
               ppi::csv::fmt(i < profile.stderrs.size() ? profile.stderrs[i] : 0.0)});
}

void write_pillar_csv(const ppi::AllocationProfile& profile, const std::string& path) {
    ppi::csv::Writer w(path);
    w.row({"pillar", "allocation"});
    for (const auto& [pillar, total] : profile.pillar_totals)
        w.row({pillar, ppi::csv::fmt(total)});
}

int warn_or_fail(std::size_t non_converged, std::size_t total, bool strict) {
    if (non_converged == 0) return 0;
    std::cerr << "warning: " << non_converged << "/" << total
              << " runs did not converge (excluded from means)\n";
    return strict ? 1 : 0;
}

// ---------------------------------------------------------------------------

int cmd_normalize(const std::string& raw_path, const std::string& pillar_path,
                  const std::string& gdp_path, const CommonOptions& common,
                  const std::string& config_path) {
    auto manifest = start_manifest("normalize", common, config_path);
    manifest.add_input(raw_path);
    manifest.add_input(pillar_path);
    manifest.add_input(gdp_path);

    const ppi::IndicatorPanel raw = ppi::load_panel(raw_path, pillar_path);
    const auto gdp = ppi::load_gdp(gdp_path);
    const ppi::IndicatorPanel normalized = ppi::normalize_panel(raw, gdp);

    ppi::save_panel(normalized, common.out_dir + "/normalized.csv");
    ppi::save_flags(normalized, common.out_dir + "/flags.csv");
    manifest.write(common.out_dir + "/manifest.txt");
    return 0;
}

int cmd_estimate_network(const std::string& panel_path, const std::string& country, bool all,
                         bool differencing, double shrinkage, const CommonOptions& common,
                         const std::string& config_path) {
    auto manifest = start_manifest("estimate-network", common, config_path);
    manifest.add_input(panel_path);

    const ppi::IndicatorPanel panel = ppi::load_panel(panel_path);
    ppi::EstimationOptions options;
    options.differencing = differencing;
    options.shrinkage = shrinkage;

    std::vector<std::string> countries;
    if (all)
        countries = panel.countries();
    else
        countries.push_back(country);

    ppi::csv::Writer report(common.out_dir + "/estimation_report.csv");
    report.row({"country", "undirected_edges", "directed_edges", "dropped_negative",
                "tie_broken", "dropped_constant"});
    for (const auto& c : countries) {
        ppi::EstimationReport r;
        const ppi::SpilloverNetwork network = ppi::estimate_network(panel, c, options, &r);
        network.save_csv(network_path(common.out_dir, c));
        std::string dropped;
        for (const auto& id : r.dropped_constant) {
            if (!dropped.empty()) dropped += ';';
            dropped += id;
        }
        report.row({c, std::to_string(r.undirected_edges), std::to_string(r.directed_edges),
                    std::to_string(r.dropped_negative), std::to_string(r.tie_broken), dropped});
        std::cerr << "estimated " << c << ": " << r.undirected_edges
                  << " undirected edges, " << r.directed_edges << " directed\n";
    }
    manifest.write(common.out_dir + "/manifest.txt");
    return 0;
}

// Initial/target vectors either from a panel (first/last year) or from an
// inputs CSV with columns indicator,initial,target.
struct SimulationInputs {
    std::vector<std::string> ids;
    std::vector<double> initials;
    std::vector<double> targets;
    std::map<std::string, std::string> pillar;  // may be empty
};

SimulationInputs load_inputs_csv(const std::string& path) {
    const auto t = ppi::csv::read_file(path);
    const int ii = t.column("indicator"), in = t.column("initial"), tg = t.column("target");
    if (ii < 0 || in < 0 || tg < 0)
        throw std::runtime_error(path + ": expected columns indicator,initial,target");
    SimulationInputs s;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string context = path + " row " + std::to_string(r + 2);
        s.ids.push_back(row[static_cast<std::size_t>(ii)]);
        s.initials.push_back(ppi::csv::parse_double(row[static_cast<std::size_t>(in)], context));
        s.targets.push_back(ppi::csv::parse_double(row[static_cast<std::size_t>(tg)], context));
    }
    return s;
}

int cmd_simulate(const std::string& network_file, const std::string& panel_path,
                 const std::string& country, const std::string& inputs_path,
                 const ModelFlags& flags, const CommonOptions& common,
                 const std::string& config_path) {
    auto manifest = start_manifest("simulate", common, config_path);
    manifest.add_input(network_file);

    const ppi::SpilloverNetwork network = ppi::SpilloverNetwork::load_csv(network_file);

    ppi::SimulationConfig config;
    std::vector<std::string> ids;
    if (!panel_path.empty()) {
        manifest.add_input(panel_path);
        const ppi::IndicatorPanel panel = ppi::load_panel(panel_path);
        const std::size_t c = panel.country_index(country);
        const ppi::RunOptions options = to_run_options(flags, common);
        config = ppi::make_config(panel, c, panel.snapshot(c, 0),
                                  panel.snapshot(c, panel.years().size() - 1), options);
        for (const auto& info : panel.indicators()) ids.push_back(info.id);
    } else {
        manifest.add_input(inputs_path);
        const SimulationInputs inputs = load_inputs_csv(inputs_path);
        ids = inputs.ids;
        config.initial_indicators = inputs.initials;
        config.targets = inputs.targets;
        config.budget = flags.budget;
        config.gamma = flags.gamma;
        config.epsilon = flags.epsilon;
        config.target_tol = flags.target_tol;
        config.max_steps = flags.max_steps;
        config.toggles = to_toggles(flags);
        auto find_id = [&](const std::string& id) -> std::size_t {
            for (std::size_t i = 0; i < ids.size(); ++i)
                if (ids[i] == id) return i;
            return 0;  // synthetic inputs need not carry the governance indicators
        };
        config.rule_of_law_idx = find_id(flags.rule_of_law);
        config.control_of_corruption_idx = find_id(flags.control_of_corruption);
    }
    config.seed = common.seed;

    const ppi::EnsembleResult ensemble =
        ppi::run_monte_carlo(config, network, common.runs, common.jobs);

    // Full trace of the first run, one wide CSV per endogenous variable.
    {
        ppi::SimulationConfig first = config;
        first.seed = ppi::derive_seed(common.seed, 0);
        const ppi::SimulationTrace trace = ppi::run_simulation(first, network);
        auto dump = [&](const ppi::Matrix& m, const std::string& name) {
            ppi::csv::Writer w(common.out_dir + "/" + name + ".csv");
            std::vector<std::string> header{"step"};
            for (const auto& id : ids) header.push_back(id);
            w.row(header);
            for (std::size_t t = 0; t < m.rows(); ++t) {
                std::vector<std::string> row{std::to_string(t)};
                for (std::size_t i = 0; i < m.cols(); ++i) row.push_back(ppi::csv::fmt(m(t, i)));
                w.row(row);
            }
        };
        dump(trace.indicators, "indicators");
        dump(trace.allocations, "allocations");
        dump(trace.contributions, "contributions");
    }

    {
        ppi::csv::Writer w(common.out_dir + "/profile.csv");
        w.row({"indicator", "allocation", "stderr"});
        for (std::size_t i = 0; i < ensemble.mean_profile.size(); ++i)
            w.row({ids[i], ppi::csv::fmt(ensemble.mean_profile[i]),
                   ppi::csv::fmt(ensemble.profile_stderr.empty()
                                     ? 0.0
                                     : ensemble.profile_stderr[i])});
    }
    {
        std::ofstream summary(common.out_dir + "/summary.txt");
        summary << "runs=" << ensemble.runs << "\n";
        summary << "converged_runs=" << ensemble.converged_runs << "\n";
        summary << "mean_corruption=" << ppi::csv::fmt(ensemble.mean_corruption) << "\n";
        summary << "mean_performance=" << ppi::csv::fmt(ensemble.mean_performance) << "\n";
    }
    manifest.write(common.out_dir + "/manifest.txt");
    return warn_or_fail(ensemble.runs - ensemble.converged_runs, ensemble.runs, common.strict);
}

int cmd_retrospective(const std::string& panel_path, const std::string& pillar_path,
                      const std::string& network_dir, const std::string& country, bool all,
                      const ModelFlags& flags, const CommonOptions& common,
                      const std::string& config_path) {
    auto manifest = start_manifest("retrospective", common, config_path);
    manifest.add_input(panel_path);
    if (!pillar_path.empty()) manifest.add_input(pillar_path);

    const ppi::IndicatorPanel panel = ppi::load_panel(panel_path, pillar_path);
    const ppi::RunOptions options = to_run_options(flags, common);

    std::vector<std::string> countries;
    if (all)
        countries = panel.countries();
    else
        countries.push_back(country);

    std::size_t non_converged = 0, total_runs = 0;
    for (const auto& c : countries) {
        const std::string net_file = network_path(network_dir, c);
        manifest.add_input(net_file);
        const ppi::SpilloverNetwork network = ppi::SpilloverNetwork::load_csv(net_file);
        const ppi::AllocationProfile profile = ppi::retrospective(panel, c, network, options);
        write_profile_csv(panel, profile, common.out_dir + "/profile_" + c + ".csv");
        write_pillar_csv(profile, common.out_dir + "/pillars_" + c + ".csv");
        non_converged += profile.runs - profile.converged_runs;
        total_runs += profile.runs;
    }
    manifest.write(common.out_dir + "/manifest.txt");
    return warn_or_fail(non_converged, total_runs, common.strict);
}

int cmd_prospective(const std::string& panel_path, const std::string& pillar_path,
                    const std::string& network_dir, const std::string& follower,
                    std::vector<std::string> candidates, const ModelFlags& flags,
                    const CommonOptions& common, const std::string& config_path) {
    auto manifest = start_manifest("prospective", common, config_path);
    manifest.add_input(panel_path);
    if (!pillar_path.empty()) manifest.add_input(pillar_path);
    const std::string net_file = network_path(network_dir, follower);
    manifest.add_input(net_file);

    const ppi::IndicatorPanel panel = ppi::load_panel(panel_path, pillar_path);
    const ppi::SpilloverNetwork network = ppi::SpilloverNetwork::load_csv(net_file);
    const ppi::RunOptions options = to_run_options(flags, common);

    const ppi::AllocationProfile retro = ppi::retrospective(panel, follower, network, options);
    const ppi::FootprintResult result =
        ppi::footprints(panel, follower, retro, network, candidates, options);

    {
        ppi::csv::Writer w(common.out_dir + "/footprints.csv");
        w.row({"follower", "target", "feasibility", "top_pillar"});
        for (const auto& edge : result.edges)
            w.row({edge.follower, edge.target, ppi::csv::fmt(edge.feasibility),
                   edge.top_pillar});
    }
    for (const auto& edge : result.edges)
        write_profile_csv(panel, edge.profile,
                          common.out_dir + "/profile_" + follower + "_to_" + edge.target + ".csv");
    {
        std::ofstream summary(common.out_dir + "/summary.txt");
        summary << "most_feasible=" << result.most_feasible << "\n";
        summary << "trivial_target=" << result.trivial_target << "\n";
    }
    manifest.write(common.out_dir + "/manifest.txt");
    return 0;
}

int cmd_calibrate(const std::string& panel_path, const std::string& network_dir,
                  const std::string& corruption_id, double gamma_min, double gamma_max,
                  std::size_t gamma_points, std::size_t subset_samples,
                  const ModelFlags& flags, const CommonOptions& common,
                  const std::string& config_path) {
    auto manifest = start_manifest("calibrate", common, config_path);
    manifest.add_input(panel_path);

    const ppi::IndicatorPanel panel = ppi::load_panel(panel_path);
    const std::size_t corr_idx = panel.indicator_index(corruption_id);
    ppi::RunOptions options = to_run_options(flags, common);

    std::vector<ppi::CalibrationCountry> countries;
    for (const auto& name : panel.countries()) {
        const std::string net_file = network_path(network_dir, name);
        manifest.add_input(net_file);
        ppi::CalibrationCountry cc;
        cc.name = name;
        cc.network = ppi::SpilloverNetwork::load_csv(net_file);
        const std::size_t c = panel.country_index(name);
        cc.config = ppi::make_config(panel, c, panel.snapshot(c, 0),
                                     panel.snapshot(c, panel.years().size() - 1), options);
        cc.config.seed = ppi::derive_seed(common.seed, 0x5ca1ab1e + c);
        double corr_sum = 0.0;
        for (std::size_t y = 0; y < panel.years().size(); ++y)
            corr_sum += panel.at(c, y, corr_idx);
        cc.empirical_corruption = corr_sum / static_cast<double>(panel.years().size());
        countries.push_back(std::move(cc));
    }

    const std::vector<double> grid = ppi::gamma_grid(gamma_min, gamma_max, gamma_points);
    const ppi::CorruptionCache cache(countries, grid, common.runs, common.jobs);
    ppi::CalibrationOptions cal_options;
    cal_options.subset_samples = subset_samples;
    cal_options.seed = common.seed;
    const ppi::FullCalibration result = ppi::calibrate(countries, grid, cache, cal_options);

    {
        ppi::csv::Writer w(common.out_dir + "/calibration.csv");
        w.row({"country", "gamma"});
        for (std::size_t k = 0; k < countries.size(); ++k)
            w.row({countries[k].name, ppi::csv::fmt(result.selected.assignment[k])});
    }
    {
        std::ofstream summary(common.out_dir + "/summary.txt");
        summary << "reference_country=" << countries[result.selected.reference_country].name
                << "\n";
        summary << "reference_gamma=" << ppi::csv::fmt(result.selected.reference_gamma) << "\n";
        summary << "mse=" << ppi::csv::fmt(result.selected.mse) << "\n";
        summary << "h_star=" << result.h_star << "\n";
    }
    manifest.write(common.out_dir + "/manifest.txt");
    return 0;
}

int cmd_sensitivity(const std::string& panel_path, const std::string& network_dir,
                    std::vector<std::string> countries_arg, const ModelFlags& flags,
                    const CommonOptions& common, const std::string& config_path) {
    auto manifest = start_manifest("sensitivity", common, config_path);
    manifest.add_input(panel_path);

    const ppi::IndicatorPanel panel = ppi::load_panel(panel_path);
    ppi::RunOptions options = to_run_options(flags, common);
    if (countries_arg.empty()) countries_arg = panel.countries();

    std::vector<ppi::SensitivityCountry> countries;
    for (const auto& name : countries_arg) {
        const std::string net_file = network_path(network_dir, name);
        manifest.add_input(net_file);
        ppi::SensitivityCountry sc;
        sc.name = name;
        sc.network = ppi::SpilloverNetwork::load_csv(net_file);
        const std::size_t c = panel.country_index(name);
        sc.config = ppi::make_config(panel, c, panel.snapshot(c, 0),
                                     panel.snapshot(c, panel.years().size() - 1), options);
        sc.config.seed = ppi::derive_seed(common.seed, 0xfeed + c);
        countries.push_back(std::move(sc));
    }

    const ppi::SensitivityResult result =
        ppi::sensitivity_suite(countries, common.runs, common.jobs);

    {
        ppi::csv::Writer w(common.out_dir + "/corruption_by_variant.csv");
        std::vector<std::string> header{"country"};
        for (const auto& v : result.variants) header.push_back(v.variant);
        w.row(header);
        for (std::size_t k = 0; k < result.countries.size(); ++k) {
            std::vector<std::string> row{result.countries[k]};
            for (const auto& v : result.variants) row.push_back(ppi::csv::fmt(v.corruption[k]));
            w.row(row);
        }
    }
    {
        ppi::csv::Writer w(common.out_dir + "/spearman_by_variant.csv");
        w.row({"variant", "corruption_performance_spearman"});
        for (const auto& v : result.variants)
            w.row({v.variant, ppi::csv::fmt(v.corruption_performance_spearman)});
    }
    {
        ppi::csv::Writer w(common.out_dir + "/top10_jaccard.csv");
        w.row({"country", "jaccard"});
        for (std::size_t k = 0; k < result.countries.size(); ++k)
            w.row({result.countries[k], ppi::csv::fmt(result.top10_jaccard_per_country[k])});
        w.row({"mean", ppi::csv::fmt(result.mean_top10_jaccard)});
    }
    {
        std::ofstream out(common.out_dir + "/strength_bins.txt");
        ppi::csv::write_plot_series(out, "with_network", result.strength_with_network.strength,
                                    result.strength_with_network.contribution);
        ppi::csv::write_plot_series(out, "without_network",
                                    result.strength_without_network.strength,
                                    result.strength_without_network.contribution);
        out << "spearman_with_network=" << ppi::csv::fmt(result.strength_with_network.test.rho)
            << " p=" << ppi::csv::fmt(result.strength_with_network.test.p_value) << "\n";
        out << "spearman_without_network="
            << ppi::csv::fmt(result.strength_without_network.test.rho)
            << " p=" << ppi::csv::fmt(result.strength_without_network.test.p_value) << "\n";
    }
    manifest.write(common.out_dir + "/manifest.txt");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Policy-priority inference toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key-value config file; flags win");

    // normalize
    auto* normalize = app.add_subcommand("normalize", "Normalize a raw indicator panel");
    std::string raw_path, pillar_path, gdp_path;
    normalize->add_option("--raw", raw_path, "Raw panel CSV (country,year,indicator,value)")
        ->required();
    normalize->add_option("--pillars", pillar_path, "Pillar map CSV (indicator,pillar)")
        ->required();
    normalize->add_option("--gdp", gdp_path, "GDP per capita CSV (country,year,value)")
        ->required();
    CommonOptions normalize_common;
    add_common(normalize, normalize_common);

    // estimate-network
    auto* estimate = app.add_subcommand("estimate-network",
                                        "Estimate per-country spillover networks");
    std::string est_panel, est_country;
    bool est_all = false, est_no_diff = false;
    double est_shrinkage = 0.2;
    estimate->add_option("--panel", est_panel, "Normalized panel CSV")->required();
    estimate->add_option("--country", est_country, "Country id");
    estimate->add_flag("--all", est_all, "Estimate every country");
    estimate->add_flag("--no-differencing", est_no_diff, "Correlate levels, not differences");
    estimate->add_option("--shrinkage", est_shrinkage, "Correlation shrinkage lambda")
        ->capture_default_str();
    CommonOptions estimate_common;
    add_common(estimate, estimate_common);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo ensemble");
    std::string sim_network, sim_panel, sim_country, sim_inputs;
    simulate->add_option("--network", sim_network, "Adjacency CSV")->required();
    simulate->add_option("--panel", sim_panel, "Panel CSV (first year = initials, last = targets)");
    simulate->add_option("--country", sim_country, "Country id (with --panel)");
    simulate->add_option("--inputs", sim_inputs, "Inputs CSV (indicator,initial,target)");
    ModelFlags sim_flags;
    add_model_flags(simulate, sim_flags);
    CommonOptions simulate_common;
    add_common(simulate, simulate_common);

    // retrospective
    auto* retro = app.add_subcommand("retrospective", "Infer past allocation profiles");
    std::string retro_panel, retro_pillars, retro_network_dir, retro_country;
    bool retro_all = false;
    retro->add_option("--panel", retro_panel, "Normalized panel CSV")->required();
    retro->add_option("--pillars", retro_pillars, "Pillar map CSV");
    retro->add_option("--network-dir", retro_network_dir, "Directory of network_<country>.csv")
        ->required();
    retro->add_option("--country", retro_country, "Country id");
    retro->add_flag("--all", retro_all, "All countries");
    ModelFlags retro_flags;
    add_model_flags(retro, retro_flags);
    CommonOptions retro_common;
    add_common(retro, retro_common);

    // prospective
    auto* prosp = app.add_subcommand("prospective", "Development-footprint analysis");
    std::string prosp_panel, prosp_pillars, prosp_network_dir, prosp_follower;
    std::vector<std::string> prosp_targets;
    prosp->add_option("--panel", prosp_panel, "Normalized panel CSV")->required();
    prosp->add_option("--pillars", prosp_pillars, "Pillar map CSV");
    prosp->add_option("--network-dir", prosp_network_dir, "Directory of network_<country>.csv")
        ->required();
    prosp->add_option("--follower", prosp_follower, "Follower country id")->required();
    prosp->add_option("--targets", prosp_targets, "Candidate target country ids")->required();
    ModelFlags prosp_flags;
    add_model_flags(prosp, prosp_flags);
    CommonOptions prosp_common;
    add_common(prosp, prosp_common);

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "Calibrate gamma across countries");
    std::string cal_panel, cal_network_dir, cal_corruption = "P12_7";
    double cal_gamma_min = 1.0, cal_gamma_max = 30.0;
    std::size_t cal_gamma_points = 117, cal_subset_samples = 10000;
    calibrate->add_option("--panel", cal_panel, "Normalized panel CSV")->required();
    calibrate->add_option("--network-dir", cal_network_dir,
                          "Directory of network_<country>.csv")
        ->required();
    calibrate->add_option("--corruption-indicator", cal_corruption,
                          "Empirical corruption indicator id")
        ->capture_default_str();
    calibrate->add_option("--gamma-min", cal_gamma_min, "Grid lower bound")
        ->capture_default_str();
    calibrate->add_option("--gamma-max", cal_gamma_max, "Grid upper bound")
        ->capture_default_str();
    calibrate->add_option("--gamma-points", cal_gamma_points, "Grid resolution")
        ->capture_default_str();
    calibrate->add_option("--subset-samples", cal_subset_samples,
                          "Random subset samples for the jump method")
        ->capture_default_str();
    ModelFlags cal_flags;
    add_model_flags(calibrate, cal_flags);
    CommonOptions cal_common;
    add_common(calibrate, cal_common);
    cal_common.runs = 100;  // calibration default M

    // sensitivity
    auto* sensitivity = app.add_subcommand("sensitivity", "Mechanism sensitivity suite");
    std::string sens_panel, sens_network_dir;
    std::vector<std::string> sens_countries;
    sensitivity->add_option("--panel", sens_panel, "Normalized panel CSV")->required();
    sensitivity->add_option("--network-dir", sens_network_dir,
                            "Directory of network_<country>.csv")
        ->required();
    sensitivity->add_option("--countries", sens_countries, "Country ids (default: all)");
    ModelFlags sens_flags;
    add_model_flags(sensitivity, sens_flags);
    CommonOptions sens_common;
    add_common(sensitivity, sens_common);

    CLI11_PARSE(app, argc, argv);

    try {
        const CLI::Option* config_opt = app.get_config_ptr();
        const std::string config_path =
            (config_opt && config_opt->count() > 0) ? config_opt->as<std::string>() : "";
        if (normalize->parsed())
            return cmd_normalize(raw_path, pillar_path, gdp_path, normalize_common, config_path);
        if (estimate->parsed()) {
            if (!est_all && est_country.empty())
                throw std::runtime_error("estimate-network: pass --country or --all");
            return cmd_estimate_network(est_panel, est_country, est_all, !est_no_diff,
                                        est_shrinkage, estimate_common, config_path);
        }
        if (simulate->parsed()) {
            if (sim_panel.empty() == sim_inputs.empty())
                throw std::runtime_error("simulate: pass exactly one of --panel or --inputs");
            if (!sim_panel.empty() && sim_country.empty())
                throw std::runtime_error("simulate: --panel requires --country");
            return cmd_simulate(sim_network, sim_panel, sim_country, sim_inputs, sim_flags,
                                simulate_common, config_path);
        }
        if (retro->parsed()) {
            if (!retro_all && retro_country.empty())
                throw std::runtime_error("retrospective: pass --country or --all");
            return cmd_retrospective(retro_panel, retro_pillars, retro_network_dir,
                                     retro_country, retro_all, retro_flags, retro_common,
                                     config_path);
        }
        if (prosp->parsed())
            return cmd_prospective(prosp_panel, prosp_pillars, prosp_network_dir,
                                   prosp_follower, prosp_targets, prosp_flags, prosp_common,
                                   config_path);
        if (calibrate->parsed())
            return cmd_calibrate(cal_panel, cal_network_dir, cal_corruption, cal_gamma_min,
                                 cal_gamma_max, cal_gamma_points, cal_subset_samples, cal_flags,
                                 cal_common, config_path);
        if (sensitivity->parsed())
            return cmd_sensitivity(sens_panel, sens_network_dir, sens_countries, sens_flags,
                                   sens_common, config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
