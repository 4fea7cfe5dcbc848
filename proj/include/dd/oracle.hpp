#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dd/data.hpp"
#include "dd/geometry.hpp"

namespace dd {

/// Sharp-interface problems on a disc. DSI and NSI are the non-homogeneous
/// forms; DSIH and NSIH subtract the lifting from them.
enum class SharpVariant { CSI, SSI, RSI, DSI, NSI, DSIH, NSIH };

const char* sharp_variant_name(SharpVariant v);

/// Coefficients and data of a disc problem with A = alpha I, B = B_s I.
struct SharpData {
    Vec2 center{0.0, 0.0};
    double R{1.0};
    double alpha{1.0};
    double a{1.0};
    /// Optional radial coefficients; when set they replace alpha and a.
    std::function<double(double)> alpha_r;
    std::function<double(double)> a_r;
    BulkData f;      ///< modal about `center`
    SurfaceData g;   ///< Fourier in the polar angle
    double B{1.0};
    double b{1.0};
    double K{1.0};
    double beta{1.0};
    /// Lifting half-width for DSIH and NSIH.
    double eta{0.25};
};

struct OracleOptions {
    int modes{16};
    int radial_cells{2048};
};

/// Tabulated radial function with cubic Hermite interpolation.
class RadialProfile {
  public:
    RadialProfile() = default;
    RadialProfile(std::vector<double> r, std::vector<double> u, std::vector<double> du);

    double value(double r) const;
    double derivative(double r) const;
    const std::vector<double>& nodes() const { return r_; }
    const std::vector<double>& values() const { return u_; }
    const std::vector<double>& derivatives() const { return du_; }
    bool empty() const { return r_.empty(); }

  private:
    std::size_t interval(double r) const;
    std::vector<double> r_, u_, du_;
};

/// Radial solutions for one Fourier mode k: u = U_c(r) cos k theta + U_s(r) sin k theta.
struct ModeSolution {
    int k{0};
    RadialProfile cos_part;
    RadialProfile sin_part;
    double v_cos{0};
    double v_sin{0};
    /// max |u_2N - u_N| over the coarse nodes before extrapolation.
    double richardson_gap{0};
};

class SharpSolution {
  public:
    SharpVariant variant{SharpVariant::RSI};
    SharpData data;
    std::vector<ModeSolution> modes;
    std::vector<int> truncated_modes;
    bool has_bulk{true};
    bool has_surface{false};
    /// Lifting subtracted from the bulk solution (DSIH, NSIH).
    bool shifted{false};
    BulkData shift;

    double u(Vec2 x) const;
    Vec2 grad_u(Vec2 x) const;
    double v(double theta) const;
    double dv(double theta) const;
    /// Closures usable as references; bulk data is defined on the closed disc.
    BulkData bulk() const;
    SurfaceData surface() const;

    /// H1 norm of v from its Fourier coefficients (Parseval).
    double surface_h1_from_modes() const;
    /// H1 norm of the bulk solution over the disc, unshifted part only.
    double bulk_h1_unshifted() const;
    /// Largest pointwise residual of the radial ODEs at interior nodes.
    double max_ode_residual() const;
    /// Largest violation of the boundary or coupling condition over the modes.
    double max_boundary_residual() const;

    /// Table "r,u0c,u0s,u1c,..." with one column per retained mode part.
    void write_csv(std::ostream& os) const;

    // Filled by the solver.
    double ode_residual_{0};
    double boundary_residual_{0};
};

/**
 * Sharp reference solution on a disc by Fourier reduction.
 *
 * Each mode solves -(1/r)(r alpha u')' + (alpha k^2/r^2 + a) u = f_k with
 * vertex-centred finite volumes on N and 2N cells combined by Richardson
 * extrapolation. Boundary and coupling conditions reduce per mode to a Robin
 * law alpha u'(R) = sigma - tau u(R) (or to a Dirichlet value).
 */
SharpSolution solve_sharp_disc(SharpVariant variant, const SharpData& data, const OracleOptions& opts = {});

struct ManufacturedBundle {
    BulkData f;
    SurfaceData g;
    BulkData u;
    SurfaceData v;
};

/// Data (f, g) for which the chosen modal u (and Fourier v for SSI) solve the sharp problem.
/// Coefficients must be constant.
ManufacturedBundle manufactured(SharpVariant variant, const BulkData& u, const SurfaceData& v, const SharpData& coeffs);

struct PenaltyRow {
    double beta{0};
    double error{0};  ///< ||w_beta - w_D||_{H1(disc)}
};

/// Robin solutions with growing beta against the Dirichlet solution on the same data.
std::vector<PenaltyRow> robin_penalty_study(const SharpData& data, const std::vector<double>& betas,
                                            const OracleOptions& opts = {});

}  // namespace dd
