#include "dd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dd/error.hpp"
#include "dd/quadrature.hpp"

namespace dd {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kEllipseMaxIter = 100;

double wrap_angle(double t) {
    t = std::fmod(t, kTwoPi);
    return t < 0.0 ? t + kTwoPi : t;
}

// Root of G(s) = (n0/(s+r0))^2 + (z1/(s+1))^2 - 1 on s > -1. G is convex and
// decreasing there; Newton is safeguarded by bisection whenever a step would
// leave the bracket or fails to halve the previous step.
double ellipse_root(double r0, double z0, double z1, double g) {
    const double n0 = r0 * z0;
    double lo = z1 - 1.0;
    double hi = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
    auto eval = [&](double s, double& val, double& der) {
        const double a = n0 / (s + r0);
        const double b = z1 / (s + 1.0);
        val = a * a + b * b - 1.0;
        der = -2.0 * (a * a / (s + r0) + b * b / (s + 1.0));
    };
    // Start mid-bracket: at s = lo the second term is singular when z1 underflows.
    double s = 0.5 * (lo + hi);
    double dx_old = hi - lo;
    double dx = dx_old;
    double val = 0.0;
    double der = 0.0;
    eval(s, val, der);
    for (int it = 0; it < kEllipseMaxIter; ++it) {
        if (val == 0.0) return s;
        const bool finite = std::isfinite(val) && std::isfinite(der);
        const bool leaves = !finite || ((s - hi) * der - val) * ((s - lo) * der - val) > 0.0;
        if (leaves || std::abs(2.0 * val) > std::abs(dx_old * der)) {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            s = lo + dx;
        } else {
            dx_old = dx;
            dx = val / der;
            s -= dx;
        }
        if (std::abs(dx) <= 1e-16 * (1.0 + std::abs(s))) return s;
        eval(s, val, der);
        // The root function blows up to +inf at the left end; treat non-finite values as positive.
        if (!(val <= 0.0)) lo = s;
        else hi = s;
    }
    throw ConvergenceError("ellipse projection did not converge in " + std::to_string(kEllipseMaxIter) +
                           " iterations (degenerate radii?)");
}

}  // namespace

SignedGeometry SignedGeometry::circle(Vec2 center, double radius) {
    DD_REQUIRE(radius > 0.0 && std::isfinite(radius), "circle radius must be positive");
    return {GeometryKind::Circle, center, {radius, radius}};
}

SignedGeometry SignedGeometry::ellipse(Vec2 center, Vec2 radii) {
    DD_REQUIRE(radii.x > 0.0 && radii.y > 0.0, "ellipse radii must be positive");
    return {GeometryKind::Ellipse, center, radii};
}

double SignedGeometry::reach() const {
    if (kind_ == GeometryKind::Circle) return radii_.x;
    const double lo = std::min(radii_.x, radii_.y);
    const double hi = std::max(radii_.x, radii_.y);
    return lo * lo / hi;
}

double SignedGeometry::perimeter() const {
    if (kind_ == GeometryKind::Circle) return kTwoPi * radii_.x;
    return integrate_composite([this](double t) { return speed(t); }, 0.0, kTwoPi, 64, 16);
}

Vec2 SignedGeometry::point(double t) const {
    return center_ + Vec2{radii_.x * std::cos(t), radii_.y * std::sin(t)};
}

Vec2 SignedGeometry::derivative(double t) const { return {-radii_.x * std::sin(t), radii_.y * std::cos(t)}; }

Vec2 SignedGeometry::unit_tangent(double t) const {
    const Vec2 d = derivative(t);
    return d / norm(d);
}

Vec2 SignedGeometry::unit_normal(double t) const {
    const Vec2 tau = unit_tangent(t);
    return {tau.y, -tau.x};
}

double SignedGeometry::curvature(double t) const {
    if (kind_ == GeometryKind::Circle) return 1.0 / radii_.x;
    const double s = speed(t);
    return radii_.x * radii_.y / (s * s * s);
}

double SignedGeometry::parameter_of(Vec2 p) const {
    const Vec2 q = p - center_;
    return wrap_angle(std::atan2(q.y / radii_.y, q.x / radii_.x));
}

Projection SignedGeometry::project(Vec2 x) const {
    if (kind_ == GeometryKind::Ellipse) return project_ellipse(x);
    const Vec2 q = x - center_;
    const double r = norm(q);
    const double R = radii_.x;
    if (r == 0.0) return {center_ + Vec2{R, 0.0}, 0.0, -R};
    const double t = wrap_angle(std::atan2(q.y, q.x));
    return {center_ + (R / r) * q, t, r - R};
}

Projection SignedGeometry::project_ellipse(Vec2 x) const {
    const Vec2 q = x - center_;
    // Work in the first quadrant with e0 >= e1.
    const bool swap = radii_.x < radii_.y;
    const double e0 = swap ? radii_.y : radii_.x;
    const double e1 = swap ? radii_.x : radii_.y;
    const double qx = swap ? q.y : q.x;
    const double qy = swap ? q.x : q.y;
    const double y0 = std::abs(qx);
    const double y1 = std::abs(qy);

    double x0 = 0.0;
    double x1 = 0.0;
    bool inside = false;
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0;
            const double z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            inside = g < 0.0;
            if (g != 0.0) {
                const double r0 = (e0 / e1) * (e0 / e1);
                const double s = ellipse_root(r0, z0, z1, g);
                x0 = r0 * y0 / (s + r0);
                x1 = y1 / (s + 1.0);
            } else {
                x0 = y0;
                x1 = y1;
            }
        } else {
            x0 = 0.0;
            x1 = e1;
            inside = y1 < e1;
        }
    } else {
        const double numer = e0 * y0;
        const double denom = e0 * e0 - e1 * e1;
        inside = y0 < e0;
        if (numer < denom) {
            const double xde0 = numer / denom;
            x0 = e0 * xde0;
            x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
        } else {
            x0 = e0;
            x1 = 0.0;
        }
    }
    const double dist = std::hypot(x0 - y0, x1 - y1);
    x0 = std::copysign(x0, qx);
    x1 = std::copysign(x1, qy);
    const Vec2 local = swap ? Vec2{x1, x0} : Vec2{x0, x1};
    Projection out;
    out.point = center_ + local;
    out.parameter = wrap_angle(std::atan2(local.y / radii_.y, local.x / radii_.x));
    out.distance = inside ? -dist : dist;
    return out;
}

double SignedGeometry::clearance(const std::vector<double>& box) const {
    DD_REQUIRE(box.size() == 4, "box must have four entries");
    return std::min({center_.x - radii_.x - box[0], box[1] - center_.x - radii_.x, center_.y - radii_.y - box[2],
                     box[3] - center_.y - radii_.y});
}

double sdf(const SignedGeometry& geom, Vec2 x) { return geom.project(x).distance; }

namespace {

Projection checked_projection(const SignedGeometry& geom, Vec2 x, const char* op) {
    if (geom.kind() == GeometryKind::Circle) {
        if (norm(x - geom.center()) <= 1e-9)
            throw PreconditionError(std::string(op) + ": query lies on the medial axis (circle centre)");
        return geom.project(x);
    }
    Projection pr = geom.project(x);
    if (pr.distance < -geom.max_tube_width())
        throw PreconditionError(std::string(op) + ": query deeper than 0.99 * reach, too close to the medial axis");
    return pr;
}

}  // namespace

Vec2 closest_point(const SignedGeometry& geom, Vec2 x) { return checked_projection(geom, x, "closest_point").point; }

Vec2 normal(const SignedGeometry& geom, Vec2 p) {
    const Projection pr = geom.project(p);
    DD_REQUIRE(std::abs(pr.distance) <= 1e-8, "point is not on the curve");
    return geom.unit_normal(pr.parameter);
}

Mat2 sdf_hessian(const SignedGeometry& geom, Vec2 x) {
    const Projection pr = checked_projection(geom, x, "sdf_hessian");
    const double kappa = geom.curvature(pr.parameter);
    const Vec2 tau = geom.unit_tangent(pr.parameter);
    return (kappa / (1.0 + kappa * pr.distance)) * Mat2::outer(tau, tau);
}

double TubularRule::total_weight() const {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight;
    return s;
}

double SurfaceRule::total_weight() const {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight;
    return s;
}

TubularRule tubular_rule(const SignedGeometry& geom, double eta, int n_t, int n_p) {
    DD_REQUIRE(eta > 0.0 && eta < geom.reach(), "tube half-width must lie in (0, reach)");
    DD_REQUIRE(n_t >= 1 && n_p >= 8, "need n_t >= 1 and n_p >= 8");
    const GaussRule& gauss = gauss_legendre(n_t);
    const double dt = kTwoPi / n_p;
    TubularRule rule;
    rule.eta = eta;
    rule.nodes.reserve(static_cast<std::size_t>(n_p) * n_t);
    rule.jacobian.reserve(rule.nodes.capacity());
    for (int j = 0; j < n_p; ++j) {
        const double s = j * dt;
        const Vec2 p = geom.point(s);
        const Vec2 nu = geom.unit_normal(s);
        const double speed = geom.speed(s);
        for (std::size_t q = 0; q < gauss.size(); ++q) {
            const double t = eta * gauss.nodes[q];
            double jac = 0.0;
            if (geom.kind() == GeometryKind::Circle) {
                jac = (geom.radii().x + t) / geom.radii().x;
            } else {
                // |d/ds (p + t nu)| per unit arclength by central differences.
                const double step = 1e-5;
                const Vec2 fwd = geom.point(s + step) + t * geom.unit_normal(s + step);
                const Vec2 bwd = geom.point(s - step) + t * geom.unit_normal(s - step);
                jac = norm(fwd - bwd) / (2.0 * step * speed);
            }
            rule.nodes.push_back({p + t * nu, speed * dt * eta * gauss.weights[q] * jac});
            rule.jacobian.push_back(jac);
        }
    }
    return rule;
}

SurfaceRule surface_rule(const SignedGeometry& geom, int n_p) {
    DD_REQUIRE(n_p >= 8, "surface rule needs at least 8 points");
    // Periodic trapezoid in the curve parameter: spectrally accurate for
    // smooth closed curves.
    const double dt = kTwoPi / n_p;
    SurfaceRule rule;
    rule.nodes.reserve(n_p);
    for (int j = 0; j < n_p; ++j) {
        const double t = j * dt;
        rule.nodes.push_back({geom.point(t), geom.speed(t) * dt});
        rule.parameters.push_back(t);
        rule.tangents.push_back(geom.unit_tangent(t));
    }
    return rule;
}

}  // namespace dd
