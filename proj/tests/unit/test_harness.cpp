#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dd/config.hpp"
#include "dd/error.hpp"
#include "dd/harness.hpp"

using namespace dd;

namespace {

RunConfig config_from(const std::string& text) { return make_run_config(parse_config_text(text)); }

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

const char* kRobinSmall = R"(
problem = "rdd"
profile = "double-obstacle"
epsilon = [0.4, 0.2, 0.1]
rho = 4
g = {const = 1.0}
)";

}  // namespace

TEST_CASE("key value parser") {
    const ConfigDocument doc = parse_config_text(R"(
# comment
problem = "cdd"   # trailing comment
epsilon = [0.2,
           0.1]
seed = 18446744073709551615
[thresholds]
min_halving_factor = 1.25
)");
    CHECK(doc.root["problem"] == "cdd");
    CHECK(doc.root["epsilon"].size() == 2);
    CHECK(doc.root["seed"].get<std::uint64_t>() == 18446744073709551615ull);
    CHECK(doc.root["thresholds"]["min_halving_factor"] == 1.25);
    CHECK(doc.line_of("problem") == 3);
    CHECK(doc.line_of("epsilon") == 4);
}

TEST_CASE("json configs are accepted") {
    const RunConfig cfg = config_from(R"({"problem": "sdd", "epsilon": [0.2, 0.1, 0.05], "g": {"fourier": [[1, 1.0]]}})");
    CHECK(cfg.problem.variant == Variant::SDD);
    CHECK(cfg.epsilons.size() == 3);
}

TEST_CASE("configuration errors carry key and line") {
    try {
        config_from("problem = \"rdd\"\nrho = 4\n");
        FAIL("missing epsilon accepted");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "epsilon");
    }
    try {
        config_from("epsilon = [0.2, 0.1]\nbogus = 3\n");
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "bogus");
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(config_from("epsilon = [0.1, 0.2]\n"), ConfigError);
    CHECK_THROWS_AS(config_from("epsilon = [0.2, 0.1]\nrho = 1\n"), ConfigError);
    CHECK_THROWS_AS(config_from("epsilon = [0.2, 0.1]\nproblem = \"dddh\"\nm = 2\n"), ConfigError);
    CHECK_THROWS_AS(config_from("epsilon = [0.2, 0.1]\nproblem = \"xyz\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("epsilon = [0.2, 0.1\n"), ConfigError);
}

TEST_CASE("shipped defaults match the acceptance thresholds") {
    const RunConfig cfg = config_from("epsilon = [0.2, 0.1]\n");
    CHECK(cfg.thresholds.min_halving_factor == 1.5);
    CHECK(cfg.thresholds.max_final_relative_h1 == 0.05);
    CHECK(cfg.thresholds.max_final_norm_gap == 0.02);
    CHECK(cfg.thresholds.max_energy_variation == 0.25);
    CHECK(cfg.thresholds.max_trace_ratio == 0.2);
    CHECK(cfg.solver.tol == 1e-10);
}

TEST_CASE("constant compatible data is reproduced exactly") {
    const RunConfig cfg = config_from(R"(
problem = "rdd"
epsilon = [0.2]
f = {const = 1.0}
g = {const = 1.0}
)");
    const SweepReport r = run_single(cfg);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].norms.at("h1_omega_star_err") <= 1e-8);
}

TEST_CASE("surface error shrinks from eps 0.2 to 0.05") {
    const std::string base = "problem = \"sdd\"\ng = {fourier = [[1, 1.0]]}\nepsilon = ";
    const SweepReport coarse = run_single(config_from(base + "[0.2]\n"));
    const SweepReport fine = run_single(config_from(base + "[0.05]\n"));
    const double e0 = coarse.rows[0].norms.at("h1_delta");
    const double e1 = fine.rows[0].norms.at("h1_delta");
    CHECK(std::isfinite(e1));
    CHECK(e1 < e0);
    CHECK(fine.rows[0].norms.count("h1_omega_star_err") == 0);
}

TEST_CASE("sweep needs three points") {
    CHECK_THROWS_AS(run_sweep(config_from("epsilon = [0.2, 0.1]\ng = {const = 1.0}\n")), ConfigError);
}

TEST_CASE("csv and json carry the same numbers and repeat bit for bit") {
    const RunConfig cfg = config_from(kRobinSmall);
    const SweepReport a = run_sweep(cfg);
    const SweepReport b = run_sweep(cfg);
    CHECK(a.to_csv() == b.to_csv());
    CHECK(a.to_json().dump() == b.to_json().dump());

    const auto dir = std::filesystem::temp_directory_path() / "dd_unit_report";
    std::filesystem::remove_all(dir);
    write_report(a, dir.string());
    std::ifstream jin(dir / "report.json");
    const nlohmann::json j = nlohmann::json::parse(jin);
    CHECK(j.size() == 4);
    CHECK(j.contains("config"));
    CHECK(j.contains("slopes"));
    CHECK(j.contains("flags"));

    std::ifstream cin(dir / "report.csv");
    std::string line;
    std::getline(cin, line);
    CHECK(line == "eps,h,dofs,iters,l2_xi,h1_xi,l2_delta,h1_delta,l2_delta_penalty,h1_omega_star_err");
    const std::vector<std::string> header = split(line);
    std::size_t row = 0;
    while (std::getline(cin, line)) {
        const std::vector<std::string> cells = split(line);
        REQUIRE(cells.size() == header.size());
        const nlohmann::json& jr = j["rows"][row];
        CHECK(std::stod(cells[0]) == jr["eps"].get<double>());
        CHECK(std::stod(cells[1]) == jr["h"].get<double>());
        CHECK(std::stoull(cells[2]) == jr["dofs"].get<std::size_t>());
        CHECK(std::stoi(cells[3]) == jr["iters"].get<int>());
        for (std::size_t c = 4; c < header.size(); ++c) {
            if (cells[c] == "nan") {
                CHECK_FALSE(jr["norms"].contains(header[c]));
            } else {
                CHECK(std::stod(cells[c]) == jr["norms"][header[c]].get<double>());
            }
        }
        ++row;
    }
    CHECK(row == j["rows"].size());
    CHECK(std::filesystem::exists(dir / "h1_omega_star_err.dat"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep rows are ordered by decreasing eps with slopes") {
    const SweepReport r = run_sweep(config_from(kRobinSmall));
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].eps > r.rows[1].eps);
    CHECK(r.rows[1].eps > r.rows[2].eps);
    CHECK(r.slopes.count("h1_omega_star_err") == 1);
    CHECK(r.flags.at("solver_converged"));
    CHECK(r.flags.at("spd_probe"));
}
