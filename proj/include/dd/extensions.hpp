#pragma once

#include <vector>

#include "dd/data.hpp"
#include "dd/geometry.hpp"

namespace dd {

/// C^1 cutoff: 1 on [0, 1/2], 0 on [1, inf), cubic smoothstep in between.
double cutoff(double s);
double cutoff_d1(double s);
double cutoff_d2(double s);

/// Default tube half-width min(reach/2, clearance/4).
double default_eta(const SignedGeometry& geom, const std::vector<double>& box);

/**
 * Constant normal extension of curve data.
 *
 * Inside the half tube the value is exactly g(p(x)). Beyond it the extension
 * blends to the arclength mean of g, reached at |d| = eta, so constants
 * extend to the same constant everywhere.
 */
BulkData constant_normal_extension(const SurfaceData& g, const SignedGeometry& geom, double eta);

/// u(x) inside, u(x - 2 d nu) for 0 < d < eta, and the eta-level mirror value beyond.
BulkData reflection_extension(const BulkData& u, const SignedGeometry& geom, double eta);

/// zeta(|d|/eta) g(p(x)): trace g on the curve, zero outside the tube.
BulkData dirichlet_lifting(const SurfaceData& g, const SignedGeometry& geom, double eta);

/// d zeta(|d|/eta) [g/(nu.A nu)](p(x)); its conormal derivative on the curve is g.
/// Value, gradient and Hessian are closed form up to a difference quotient for the
/// Hessian of the extended boundary factor.
BulkData neumann_lifting(const SurfaceData& g, const MatrixData& A, const SignedGeometry& geom, double eta);

/// div(A grad h) at x: A : hess(h) for constant A, fourth-order differences of the flux otherwise.
double conormal_divergence(const BulkData& h, const MatrixData& A, Vec2 x);

}  // namespace dd
