#include "dd/extensions.hpp"

#include <algorithm>
#include <cmath>

#include "dd/error.hpp"

namespace dd {

double cutoff(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    const double t = 2.0 * s - 1.0;
    return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

double cutoff_d1(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    const double t = 2.0 * s - 1.0;
    return 12.0 * (t * t - t);
}

double cutoff_d2(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    const double t = 2.0 * s - 1.0;
    return 24.0 * (2.0 * t - 1.0);
}

double default_eta(const SignedGeometry& geom, const std::vector<double>& box) {
    return std::min(0.5 * geom.reach(), 0.25 * geom.clearance(box));
}

namespace {

// Cutoff as a function of the signed distance, with its first two derivatives.
struct Radial {
    double z{0}, z1{0}, z2{0};
};

Radial radial_cutoff(double d, double eta) {
    const double s = std::abs(d) / eta;
    const double sign = d < 0.0 ? -1.0 : 1.0;
    return {cutoff(s), sign * cutoff_d1(s) / eta, cutoff_d2(s) / (eta * eta)};
}

// Gradient of G(p(x)) for curve data G: G'(t)/(|gamma'| (1 + kappa d)) tau.
Vec2 extended_gradient(const SurfaceData& G, const SignedGeometry& geom, const Projection& pr) {
    const double t = pr.parameter;
    const double kappa = geom.curvature(t);
    return (G.derivative(t) / (geom.speed(t) * (1.0 + kappa * pr.distance))) * geom.unit_tangent(t);
}

void require_eta(const SignedGeometry& geom, double eta) {
    DD_REQUIRE(eta > 0.0 && eta < geom.reach(), "tube half-width must lie in (0, reach)");
}

// Shared body of Ec (blend to `far`) and the Dirichlet lifting (far = 0).
BulkData blended_extension(const SurfaceData& g, const SignedGeometry& geom, double eta, double far,
                           const char* label) {
    auto value = [g, geom, eta, far](Vec2 x) {
        const Projection pr = geom.project(x);
        if (std::abs(pr.distance) >= eta) return far;
        const double gv = g.value(pr.parameter);
        return far + cutoff(std::abs(pr.distance) / eta) * (gv - far);
    };
    auto grad = [g, geom, eta, far](Vec2 x) {
        const Projection pr = geom.project(x);
        if (std::abs(pr.distance) >= eta) return Vec2{};
        const Radial c = radial_cutoff(pr.distance, eta);
        const Vec2 nu = geom.unit_normal(pr.parameter);
        return (c.z1 * (g.value(pr.parameter) - far)) * nu + c.z * extended_gradient(g, geom, pr);
    };
    return BulkData::closure(value, grad, {}, label);
}

}  // namespace

BulkData constant_normal_extension(const SurfaceData& g, const SignedGeometry& geom, double eta) {
    require_eta(geom, eta);
    return blended_extension(g, geom, eta, g.mean(geom), "constant-normal-extension");
}

BulkData dirichlet_lifting(const SurfaceData& g, const SignedGeometry& geom, double eta) {
    require_eta(geom, eta);
    return blended_extension(g, geom, eta, 0.0, "dirichlet-lifting");
}

BulkData reflection_extension(const BulkData& u, const SignedGeometry& geom, double eta) {
    require_eta(geom, eta);
    auto mirror = [geom, eta](Vec2 x, Projection& pr) {
        pr = geom.project(x);
        const double depth = std::min(pr.distance, eta);
        return pr.point - depth * geom.unit_normal(pr.parameter);
    };
    auto value = [u, mirror](Vec2 x) {
        Projection pr;
        const Vec2 m = mirror(x, pr);
        return pr.distance <= 0.0 ? u.value(x) : u.value(m);
    };
    auto grad = [u, geom, eta, mirror](Vec2 x) {
        Projection pr;
        const Vec2 m = mirror(x, pr);
        if (pr.distance <= 0.0) return u.grad(x);
        const double t = pr.parameter;
        const double kappa = geom.curvature(t);
        const Vec2 tau = geom.unit_tangent(t);
        const Vec2 nu = geom.unit_normal(t);
        const Vec2 gm = u.grad(m);
        // Jacobian of the mirror map in the (tau, nu) frame.
        if (pr.distance < eta) {
            const double ft = (1.0 - kappa * pr.distance) / (1.0 + kappa * pr.distance);
            return (ft * dot(tau, gm)) * tau - dot(nu, gm) * nu;
        }
        const double ft = (1.0 - kappa * eta) / (1.0 + kappa * pr.distance);
        return (ft * dot(tau, gm)) * tau;
    };
    return BulkData::closure(value, grad, {}, "reflection-extension");
}

BulkData neumann_lifting(const SurfaceData& g, const MatrixData& A, const SignedGeometry& geom, double eta) {
    require_eta(geom, eta);
    // Boundary factor G = g / (nu . A nu) as curve data.
    SurfaceData G;
    if (A.is_constant()) {
        const Mat2 a = A.constant_value();
        DD_REQUIRE(min_eigenvalue(a) > 0.0, "A must be uniformly elliptic");
        auto q = [a, geom](double t) {
            const Vec2 nu = geom.unit_normal(t);
            return dot(nu, a * nu);
        };
        auto val = [g, q](double t) { return g.value(t) / q(t); };
        auto der = [g, q, a, geom](double t) {
            const Vec2 nu = geom.unit_normal(t);
            const Vec2 tau = geom.unit_tangent(t);
            // d nu/dt = kappa |gamma'| tau.
            const double dq = geom.curvature(t) * geom.speed(t) * (dot(tau, a * nu) + dot(nu, a * tau));
            const double qq = q(t);
            return (g.derivative(t) * qq - g.value(t) * dq) / (qq * qq);
        };
        G = SurfaceData::closure(val, der, {}, "neumann-factor");
    } else {
        auto val = [g, A, geom](double t) {
            const Vec2 nu = geom.unit_normal(t);
            const Mat2 a = A.value(geom.point(t));
            return g.value(t) / dot(nu, a * nu);
        };
        auto der = [val](double t) {
            const double s = 1e-5;
            return (-val(t + 2 * s) + 8 * val(t + s) - 8 * val(t - s) + val(t - 2 * s)) / (12 * s);
        };
        G = SurfaceData::closure(val, der, {}, "neumann-factor");
    }

    auto value = [G, geom, eta](Vec2 x) {
        const Projection pr = geom.project(x);
        if (std::abs(pr.distance) >= eta) return 0.0;
        return pr.distance * cutoff(std::abs(pr.distance) / eta) * G.value(pr.parameter);
    };
    auto grad_ge = [G, geom](Vec2 x) { return extended_gradient(G, geom, geom.project(x)); };
    auto grad = [G, geom, eta](Vec2 x) {
        const Projection pr = geom.project(x);
        const double d = pr.distance;
        if (std::abs(d) >= eta) return Vec2{};
        const Radial c = radial_cutoff(d, eta);
        const Vec2 nu = geom.unit_normal(pr.parameter);
        return ((c.z + d * c.z1) * G.value(pr.parameter)) * nu + (d * c.z) * extended_gradient(G, geom, pr);
    };
    auto hess = [G, geom, eta, grad_ge](Vec2 x) {
        const Projection pr = geom.project(x);
        const double d = pr.distance;
        if (std::abs(d) >= eta) return Mat2{};
        const Radial c = radial_cutoff(d, eta);
        const double t = pr.parameter;
        const Vec2 nu = geom.unit_normal(t);
        const Vec2 tau = geom.unit_tangent(t);
        const double kappa = geom.curvature(t);
        const Mat2 H = (kappa / (1.0 + kappa * d)) * Mat2::outer(tau, tau);
        const double ge = G.value(t);
        const Vec2 gg = extended_gradient(G, geom, pr);
        const double psi = d * c.z;
        const double psi1 = c.z + d * c.z1;
        const double psi2 = 2.0 * c.z1 + d * c.z2;
        // Hessian of G(p(x)) by central differences of its closed-form gradient.
        const double step = 1e-5;
        const Vec2 gx = (grad_ge(x + Vec2{step, 0}) - grad_ge(x - Vec2{step, 0})) / (2 * step);
        const Vec2 gy = (grad_ge(x + Vec2{0, step}) - grad_ge(x - Vec2{0, step})) / (2 * step);
        const double off = 0.5 * (gx.y + gy.x);
        const Mat2 hge{gx.x, off, off, gy.y};
        return (psi2 * ge) * Mat2::outer(nu, nu) + psi1 * (Mat2::outer(nu, gg) + Mat2::outer(gg, nu)) +
               (psi1 * ge) * H + psi * hge;
    };
    return BulkData::closure(value, grad, hess, "neumann-lifting");
}

double conormal_divergence(const BulkData& h, const MatrixData& A, Vec2 x) {
    if (A.is_constant()) return contract(A.constant_value(), h.hessian(x));
    const double s = 1e-4;
    auto flux = [&](Vec2 y) { return A.value(y) * h.grad(y); };
    auto d4 = [&](Vec2 e, bool xcomp) {
        auto comp = [&](Vec2 y) {
            const Vec2 f = flux(y);
            return xcomp ? f.x : f.y;
        };
        return (-comp(x + 2 * s * e) + 8 * comp(x + s * e) - 8 * comp(x - s * e) + comp(x - 2 * s * e)) / (12 * s);
    };
    return d4({1, 0}, true) + d4({0, 1}, false);
}

}  // namespace dd
