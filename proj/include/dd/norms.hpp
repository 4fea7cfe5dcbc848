#pragma once

#include <map>
#include <string>

#include "dd/assembly.hpp"
#include "dd/data.hpp"
#include "dd/grid.hpp"
#include "dd/profiles.hpp"

namespace dd {

enum class WeightKind { Xi, Delta, DeltaOverEps, Unit };
enum class NormOrder { L2, H1 };

/// ||u_h - ref||_{k,w}; ref may be null. Gradients of u_h are the exact bilinear-patch gradients.
double weighted_norm(const NodalField& uh, const BulkData* ref, WeightKind w, NormOrder order,
                     const ScaledWeights& weights, const QuadSpec& quad = {});
/// ||f||_{k,w} for exact data.
double weighted_norm(const BulkData& f, WeightKind w, NormOrder order, const ScaledWeights& weights,
                     const BoxGrid& grid, const QuadSpec& quad = {});

/// Squared integrals of e = u_h - ref against xi_eps and delta_eps in a single pass.
struct WeightedIntegrals {
    double xi_l2{0};      ///< int xi e^2
    double xi_grad{0};    ///< int xi |grad e|^2
    double delta_l2{0};   ///< int delta e^2
    double delta_grad{0}; ///< int delta |grad e|^2

    double l2_xi() const;
    double h1_xi() const;
    double l2_delta() const;
    double h1_delta() const;
    /// ||e||_{0, delta/eps}
    double l2_delta_penalty(double eps) const;
};
WeightedIntegrals weighted_integrals(const NodalField& uh, const BulkData* ref, const ScaledWeights& weights,
                                     const QuadSpec& quad = {});

struct RestrictedError {
    double l2{0};
    double h1{0};
};
/// Errors over the inner domain only: quadrature points with d < 0, cut cells refined 4x further.
RestrictedError restricted_error(const NodalField& uh, const BulkData& ref, const SignedGeometry& geom,
                                 const QuadSpec& quad = {}, double eps_hint = 0.0);
double restricted_h1_error(const NodalField& uh, const BulkData& ref, const SignedGeometry& geom,
                           const QuadSpec& quad = {}, double eps_hint = 0.0);
/// ||ref||_{H^1(inner domain)} on the same quadrature.
double restricted_h1_norm(const BulkData& ref, const SignedGeometry& geom, const BoxGrid& grid,
                          const QuadSpec& quad = {}, double eps_hint = 0.0);

/// L2 or H1 norm of curve data with the tangential gradient v'(t)/|gamma'(t)|.
double surface_norm_exact(const SurfaceData& v, const SignedGeometry& geom, NormOrder order, int n_p = 1024);

/// int_Omega delta_eps f dx on the grid quadrature.
double delta_functional(const BulkData& f, const ScaledWeights& weights, const BoxGrid& grid,
                        const QuadSpec& quad = {});
double delta_functional(const NodalField& f, const ScaledWeights& weights, const QuadSpec& quad = {});

/// H1 norm over the whole box.
double box_h1_norm(const BulkData& f, const BoxGrid& grid, const QuadSpec& quad = {});

/// Named norm values with run metadata.
struct NormReport {
    std::map<std::string, double> values;
    double epsilon{0};
    double h{0};
    int quad_order{0};
    int subdivisions{0};

    double at(const std::string& key) const;
    bool has(const std::string& key) const { return values.count(key) > 0; }
};

}  // namespace dd
