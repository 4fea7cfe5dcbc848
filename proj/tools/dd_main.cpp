// Command line front end: run, sweep, verify and oracle subcommands.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dd/error.hpp"
#include "dd/harness.hpp"
#include "dd/parallel.hpp"

namespace {

struct Common {
    std::string config;
    std::string out;
    int threads{0};
    std::uint64_t seed{0};
    bool seed_given{false};
};

dd::RunConfig prepare(const Common& c, CLI::App& app) {
    dd::RunConfig cfg = dd::load_run_config(c.config);
    if (!c.out.empty()) cfg.out_dir = c.out;
    if (app.count("--seed") > 0) cfg.seed = c.seed;
    const int threads = c.threads > 0 ? c.threads : cfg.threads;
    if (threads > 0) dd::set_threads(threads);
    return cfg;
}

void summarize(const dd::SweepReport& rep, const std::string& dir) {
    for (const auto& row : rep.rows) {
        std::cout << "eps=" << row.eps << " h=" << row.h << " dofs=" << row.dofs << " iters=" << row.iters;
        const auto it = row.norms.find("h1_omega_star_err");
        if (it != row.norms.end()) std::cout << " h1_omega_star_err=" << it->second;
        std::cout << "\n";
    }
    for (const auto& [k, v] : rep.flags) std::cout << (v ? "PASS " : "FAIL ") << k << "\n";
    std::cout << "report written to " << dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffuse domain solver and convergence harness"};
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", c.config, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", c.out, "output directory");
        sub->add_option("--threads", c.threads, "OpenMP threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", c.seed, "seed for the SPD probe");
    };
    CLI::App* run = app.add_subcommand("run", "solve at the first epsilon");
    CLI::App* sweep = app.add_subcommand("sweep", "solve across the epsilon list and fit rates");
    CLI::App* verify = app.add_subcommand("verify", "profile assumptions and delta-functional battery");
    CLI::App* oracle = app.add_subcommand("oracle", "sharp reference solution on the disc");
    for (CLI::App* s : {run, sweep, verify, oracle}) add_common(s);

    CLI11_PARSE(app, argc, argv);
    try {
        CLI::App* sub = app.get_subcommands().front();
        const dd::RunConfig cfg = prepare(c, *sub);
        if (sub == oracle) {
            std::filesystem::create_directories(cfg.out_dir);
            std::ofstream csv(std::filesystem::path(cfg.out_dir) / "oracle.csv");
            const auto j = dd::oracle_summary(cfg, &csv);
            std::ofstream(std::filesystem::path(cfg.out_dir) / "oracle.json") << j.dump(2) << "\n";
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        dd::SweepReport rep;
        if (sub == run)
            rep = dd::run_single(cfg);
        else if (sub == sweep)
            rep = dd::run_sweep(cfg);
        else
            rep = dd::verify_lemmas(cfg);
        dd::write_report(rep, cfg.out_dir);
        summarize(rep, cfg.out_dir);
        return 0;
    } catch (const dd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
