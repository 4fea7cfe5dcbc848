#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dd/assembly.hpp"
#include "dd/oracle.hpp"
#include "dd/solve.hpp"

namespace dd {

/// Parsed configuration text with the source line of every top-level key.
struct ConfigDocument {
    nlohmann::json root;
    std::map<std::string, int> lines;

    int line_of(const std::string& key) const;
};

/**
 * Parses a configuration file body.
 *
 * Text starting with '{' is JSON. Anything else is the key = value form:
 * one assignment per line, '#' comments, optional [section] headers, values
 * written as JSON scalars or arrays, and inline tables {k = v, ...}.
 */
ConfigDocument parse_config_text(const std::string& text);
ConfigDocument load_config_file(const std::string& path);

/// Pass/fail thresholds applied to sweep reports.
struct Thresholds {
    double min_halving_factor{1.5};
    double max_final_relative_h1{0.05};
    double max_final_norm_gap{0.02};
    double max_energy_variation{0.25};
    double max_trace_ratio{0.2};
    double exact_tol{1e-8};
};

enum class Reference { Oracle, Manufactured, None };

struct RunConfig {
    nlohmann::json source;
    ProblemSpec problem;
    std::vector<double> box{-2.0, 2.0, -2.0, 2.0};
    std::vector<double> epsilons;
    double rho{4.0};
    double h{0.0};  ///< fixed spacing when > 0, else h = eps / rho
    QuadSpec quad;
    SolveOptions solver;
    double degeneracy_floor{1e-12};
    int probe_trials{4};
    Reference reference{Reference::Oracle};
    std::vector<ModalTerm> manufactured_u;
    std::vector<FourierTerm> manufactured_v;
    OracleOptions oracle;
    Thresholds thresholds;
    std::uint64_t seed{0};
    int threads{0};
    std::string out_dir{"out"};

    double spacing(double eps) const { return h > 0.0 ? h : eps / rho; }
};

/// Validates a document and builds the run configuration. Errors carry key and line.
RunConfig make_run_config(const ConfigDocument& doc);
RunConfig load_run_config(const std::string& path);

/// Named bulk fields available as {radial = "<name>"}.
std::vector<std::string> bulk_registry_names();

}  // namespace dd
