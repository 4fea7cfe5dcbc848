#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dd/config.hpp"
#include "dd/fit.hpp"

namespace dd {

/// Sharp solution used to measure a diffuse run.
struct ReferenceSolution {
    bool has_u{false};
    bool has_v{false};
    BulkData u;     ///< on the inner domain; the homogenised solution for DDDH/NDDH
    SurfaceData v;  ///< in the curve parameter
    double eta{0};  ///< tube half-width shared with the assembly
    nlohmann::json info;
};

/// Builds the reference for a configuration. Manufactured references also fill spec.f and spec.g.
ReferenceSolution make_reference(const RunConfig& cfg, ProblemSpec& spec);

/// One epsilon of a sweep.
struct RunRow {
    double eps{0};
    double h{0};
    std::size_t dofs{0};
    int iters{0};
    bool converged{false};
    double relative_residual{0};
    std::size_t eliminated{0};
    int subdivisions{1};
    bool spd{true};
    std::map<std::string, double> norms;
};

struct SweepReport {
    nlohmann::json config;
    std::vector<RunRow> rows;
    std::map<std::string, LineFit> slopes;
    std::map<std::string, bool> flags;
    nlohmann::json extra;

    nlohmann::json to_json() const;
    /// Fixed-header CSV; absent values are written as nan.
    std::string to_csv() const;
};

/// Column order of report.csv after eps,h,dofs,iters.
const std::vector<std::string>& csv_error_keys();

RunRow run_point(const RunConfig& cfg, const ProblemSpec& spec, const ReferenceSolution& ref, double eps);
/// First epsilon of the configuration only.
SweepReport run_single(const RunConfig& cfg);
/// Every epsilon; slopes need at least three rows.
SweepReport run_sweep(const RunConfig& cfg);
/// Profile assumptions plus the delta-functional property battery across the epsilon list.
SweepReport verify_lemmas(const RunConfig& cfg);
/// Sharp solution of the configured problem; radial table written to `csv` when given.
nlohmann::json oracle_summary(const RunConfig& cfg, std::ostream* csv);

/// Writes report.json, report.csv and one <key>.dat per positive error series.
void write_report(const SweepReport& report, const std::string& dir);

}  // namespace dd
