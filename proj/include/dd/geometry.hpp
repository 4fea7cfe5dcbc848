#pragma once

#include <vector>

#include "dd/vec2.hpp"

namespace dd {

enum class GeometryKind { Circle, Ellipse };

/// Result of projecting a point onto the curve.
struct Projection {
    Vec2 point;            ///< closest point on the curve
    double parameter{0};   ///< curve parameter of `point`
    double distance{0};    ///< signed distance, negative inside
};

/**
 * Closed analytic curve bounding the inner domain.
 *
 * The curve is parameterised by an angle t in [0, 2pi): polar angle about
 * the centre for a circle, the eccentric anomaly for an ellipse. Distances
 * are signed, negative inside.
 */
class SignedGeometry {
  public:
    static SignedGeometry circle(Vec2 center, double radius);
    static SignedGeometry ellipse(Vec2 center, Vec2 radii);

    GeometryKind kind() const { return kind_; }
    Vec2 center() const { return center_; }
    /// Semi-axes; both equal the radius for a circle.
    Vec2 radii() const { return radii_; }
    /// Largest tube half-width on which the closest point map is single valued.
    double reach() const;
    /// Queries deeper than this are refused by the tubular operators.
    double max_tube_width() const { return 0.99 * reach(); }
    /// Length of the curve.
    double perimeter() const;

    Vec2 point(double t) const;
    /// d(point)/dt, not normalised.
    Vec2 derivative(double t) const;
    double speed(double t) const { return norm(derivative(t)); }
    Vec2 unit_tangent(double t) const;
    Vec2 unit_normal(double t) const;
    /// Signed curvature, positive for the convex curves provided here.
    double curvature(double t) const;
    /// Parameter of a point lying on (or very near) the curve.
    double parameter_of(Vec2 p) const;

    /// Global closest point and signed distance; valid anywhere in the plane.
    Projection project(Vec2 x) const;

    /// Shortest distance from the curve to the boundary of an axis-aligned box.
    double clearance(const std::vector<double>& box) const;

  private:
    SignedGeometry(GeometryKind kind, Vec2 center, Vec2 radii) : kind_(kind), center_(center), radii_(radii) {}

    Projection project_ellipse(Vec2 x) const;

    GeometryKind kind_;
    Vec2 center_;
    Vec2 radii_;
};

/// Signed distance to the curve, negative inside.
double sdf(const SignedGeometry& geom, Vec2 x);

/// Closest point on the curve; refuses queries at or near the medial axis.
Vec2 closest_point(const SignedGeometry& geom, Vec2 x);

/// Outward unit normal at a point on the curve.
Vec2 normal(const SignedGeometry& geom, Vec2 p);

/// Hessian of the signed distance, kappa/(1 + kappa d) tau (x) tau in two dimensions.
Mat2 sdf_hessian(const SignedGeometry& geom, Vec2 x);

struct QuadNode {
    Vec2 point;
    double weight{0};
};

/// Quadrature over the band |d| < eta built from the (p, t) chart.
struct TubularRule {
    double eta{0};
    std::vector<QuadNode> nodes;
    /// Chart Jacobian |d rho_t / ds| at each node (dimensionless).
    std::vector<double> jacobian;

    double total_weight() const;
};

/// Quadrature on the curve itself.
struct SurfaceRule {
    std::vector<QuadNode> nodes;
    std::vector<double> parameters;
    std::vector<Vec2> tangents;

    double total_weight() const;
};

/// n_p curve points times n_t Gauss points in the normal coordinate.
TubularRule tubular_rule(const SignedGeometry& geom, double eta, int n_t, int n_p);

/// n_p equispaced parameter values; weights are arclengths of the parameter cells.
SurfaceRule surface_rule(const SignedGeometry& geom, int n_p);

}  // namespace dd
