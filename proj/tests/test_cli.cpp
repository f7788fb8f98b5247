#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ppi/csv.hpp"
#include "ppi/panel.hpp"
#include "ppi/rng.hpp"
#include "ppi/spillover_network.hpp"

namespace fs = std::filesystem;
using namespace ppi;

namespace {

const std::string kCli = PPI_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ppi_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

// Random-walk panel suitable for network estimation and simulation.
void write_synthetic_panel(const std::string& path, std::size_t countries,
                           std::size_t years, std::size_t indicators,
                           std::uint64_t seed) {
    Rng rng(seed);
    csv::Writer w(path);
    w.row({"country", "year", "indicator", "value"});
    for (std::size_t c = 0; c < countries; ++c)
        for (std::size_t i = 0; i < indicators; ++i) {
            double level = rng.uniform(0.2, 0.5);
            for (std::size_t y = 0; y < years; ++y) {
                level = std::clamp(level + rng.uniform(-0.05, 0.08), 0.0, 1.0);
                w.row({"C" + std::to_string(c), std::to_string(2000 + y),
                       "I" + std::to_string(i), csv::fmt(level)});
            }
        }
}

}  // namespace

TEST_CASE("cli help exits cleanly") {
    CHECK(run("--help") == 0);
    for (const char* sub : {"normalize", "estimate-network", "simulate", "calibrate",
                            "retrospective", "prospective", "sensitivity"})
        CHECK(run(std::string(sub) + " --help") == 0);
}

TEST_CASE("cli rejects a missing subcommand and bad flags") {
    CHECK(run("") != 0);
    CHECK(run("simulate --no-such-flag") != 0);
}

TEST_CASE("simulate is deterministic and thread-count independent") {
    const std::string dir = fresh_dir("simulate");
    const std::string inputs = dir + "/inputs.csv";
    {
        csv::Writer w(inputs);
        w.row({"indicator", "initial", "target"});
        for (int i = 0; i < 6; ++i)
            w.row({"I" + std::to_string(i), csv::fmt(0.1 + 0.05 * i),
                   csv::fmt(0.7 + 0.04 * i)});
    }
    const std::string network = dir + "/network.csv";
    {
        Rng rng(3);
        Matrix weights(6, 6, 0.0);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j)
                if (i != j && rng.uniform() < 0.4) weights(i, j) = rng.uniform();
        SpilloverNetwork(std::move(weights)).save_csv(network);
    }
    const std::string base = "simulate --network " + network + " --inputs " + inputs +
                             " --rule-of-law I0 --control-of-corruption I1 --seed 7 --runs 50";
    REQUIRE(run(base + " --out " + dir + "/a") == 0);
    REQUIRE(run(base + " --out " + dir + "/b") == 0);
    REQUIRE(run(base + " --jobs 4 --out " + dir + "/c") == 0);
    for (const char* f : {"profile.csv", "indicators.csv", "allocations.csv",
                          "contributions.csv", "summary.txt"}) {
        CHECK(slurp(dir + "/a/" + f) == slurp(dir + "/b/" + f));
        CHECK(slurp(dir + "/a/" + f) == slurp(dir + "/c/" + f));
    }
    CHECK(fs::exists(dir + "/a/manifest.txt"));
}

TEST_CASE("normalize writes outputs and rejects schema violations") {
    const std::string dir = fresh_dir("normalize");
    const std::string raw = dir + "/raw.csv";
    const std::string pillars = dir + "/pillars.csv";
    const std::string gdp = dir + "/gdp.csv";
    {
        csv::Writer w(raw);
        w.row({"country", "year", "indicator", "value"});
        double v = 1.0;
        for (const char* c : {"AA", "BB", "CC"})
            for (int y = 2000; y <= 2002; ++y)
                for (const char* i : {"I1", "I2"}) {
                    w.row({c, std::to_string(y), i, csv::fmt(v)});
                    v += 1.7;
                }
    }
    {
        csv::Writer w(pillars);
        w.row({"indicator", "pillar"});
        w.row({"I1", "P1"});
        w.row({"I2", "P2"});
    }
    {
        csv::Writer w(gdp);
        w.row({"country", "year", "value"});
        double g = 1000.0;
        for (const char* c : {"AA", "BB", "CC"})
            for (int y = 2000; y <= 2002; ++y) {
                w.row({c, std::to_string(y), csv::fmt(g)});
                g += 250.0;
            }
    }
    const std::string out = dir + "/out";
    REQUIRE(run("normalize --raw " + raw + " --pillars " + pillars + " --gdp " + gdp +
                " --out " + out) == 0);
    CHECK(fs::exists(out + "/normalized.csv"));
    CHECK(fs::exists(out + "/flags.csv"));
    CHECK(fs::exists(out + "/manifest.txt"));
    const IndicatorPanel normalized = load_panel(out + "/normalized.csv");
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t y = 0; y < 3; ++y)
            for (std::size_t i = 0; i < 2; ++i) {
                CHECK(normalized.at(c, y, i) >= 0.0);
                CHECK(normalized.at(c, y, i) <= 1.0);
            }

    // missing value column
    const std::string broken = dir + "/broken.csv";
    {
        csv::Writer w(broken);
        w.row({"country", "year", "indicator"});
        w.row({"AA", "2000", "I1"});
    }
    CHECK(run("normalize --raw " + broken + " --pillars " + pillars + " --gdp " + gdp +
              " --out " + dir + "/out_broken") != 0);
}

TEST_CASE("estimate-network produces loadable adjacency files") {
    const std::string dir = fresh_dir("estimate");
    const std::string panel = dir + "/panel.csv";
    write_synthetic_panel(panel, 2, 12, 8, 11);
    const std::string out = dir + "/out";
    REQUIRE(run("estimate-network --panel " + panel + " --all --out " + out) == 0);
    for (const char* c : {"C0", "C1"}) {
        const std::string file = out + "/network_" + std::string(c) + ".csv";
        REQUIRE(fs::exists(file));
        const SpilloverNetwork net = SpilloverNetwork::load_csv(file);
        CHECK(net.size() == 8);
        CHECK(net.edge_count() > 0);
    }
    CHECK(fs::exists(out + "/estimation_report.csv"));

    // determinism of the full command
    const std::string out2 = dir + "/out2";
    REQUIRE(run("estimate-network --panel " + panel + " --all --out " + out2) == 0);
    CHECK(slurp(out + "/network_C0.csv") == slurp(out2 + "/network_C0.csv"));

    CHECK(run("estimate-network --panel " + panel + " --country NOPE --out " + dir +
              "/out3") != 0);
}

TEST_CASE("retrospective profile output sums to the budget") {
    const std::string dir = fresh_dir("retro");
    const std::string panel = dir + "/panel.csv";
    write_synthetic_panel(panel, 2, 12, 10, 21);
    const std::string nets = dir + "/nets";
    REQUIRE(run("estimate-network --panel " + panel + " --all --out " + nets) == 0);
    const std::string out = dir + "/out";
    REQUIRE(run("retrospective --panel " + panel + " --network-dir " + nets +
                " --country C0 --rule-of-law I0 --control-of-corruption I1 "
                "--runs 30 --seed 5 --out " + out) == 0);
    const auto table = csv::read_file(out + "/profile_C0.csv");
    REQUIRE(table.rows.size() == 10);
    double total = 0.0;
    const int col = table.column("allocation");
    REQUIRE(col >= 0);
    for (const auto& row : table.rows)
        total += csv::parse_double(row[static_cast<std::size_t>(col)], "profile");
    CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-6));
}
