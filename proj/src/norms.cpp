#include "dd/norms.hpp"

#include <cmath>

#include "dd/error.hpp"
#include "dd/parallel.hpp"
#include "dd/quadrature.hpp"

namespace dd {
namespace {

// Sums point_fn(ci, cj, s, t, x, w) -> array<N> over every quadrature point of every
// cell, cells refined by `refine(ci, cj)` extra subdivisions when it returns > 1.
template <std::size_t N, class F, class R>
std::array<double, N> integrate_cells(const BoxGrid& grid, int order, int ns, R&& refine, F&& point_fn) {
    const std::vector<CellPoint> base = cell_rule(order, ns);
    const std::vector<CellPoint> fine = cell_rule(order, 4 * ns);
    const double h = grid.h();
    const double area = h * h;
    return deterministic_reduce_n<N>(grid.num_cells(), [&](std::size_t c) {
        const int ci = static_cast<int>(c % grid.nx());
        const int cj = static_cast<int>(c / grid.nx());
        const Vec2 origin = grid.node(ci, cj);
        const std::vector<CellPoint>& rule = refine(ci, cj) ? fine : base;
        std::array<double, N> sum{};
        for (const CellPoint& q : rule) {
            const std::array<double, N> v = point_fn(ci, cj, q.s, q.t, origin + Vec2{q.s * h, q.t * h}, q.w * area);
            for (std::size_t k = 0; k < N; ++k) sum[k] += v[k];
        }
        return sum;
    });
}

constexpr auto no_refine = [](int, int) { return false; };

double weight_at(WeightKind w, const ScaledWeights& weights, double d) {
    switch (w) {
        case WeightKind::Xi: return weights.xi_from_distance(d);
        case WeightKind::Delta: return weights.delta_from_distance(d);
        case WeightKind::DeltaOverEps: return weights.delta_from_distance(d) / weights.epsilon();
        case WeightKind::Unit: return 1.0;
    }
    return 0.0;
}

int norm_subdivisions(const QuadSpec& quad, double h, double eps) {
    if (eps > 0.0) return quad.subdivisions(h, eps);
    return quad.subdiv > 0 ? quad.subdiv : 1;
}

}  // namespace

double weighted_norm(const NodalField& uh, const BulkData* ref, WeightKind w, NormOrder order,
                     const ScaledWeights& weights, const QuadSpec& quad) {
    const BoxGrid& grid = uh.grid();
    const int ns = quad.subdivisions(grid.h(), weights.epsilon());
    const bool h1 = order == NormOrder::H1;
    const auto s = integrate_cells<1>(grid, quad.order, ns, no_refine,
                                      [&](int ci, int cj, double s, double t, Vec2 x, double wq) {
        const double wt = weight_at(w, weights, sdf(weights.geometry(), x));
        if (wt == 0.0) return std::array<double, 1>{0.0};
        double e = uh.cell_value(ci, cj, s, t);
        Vec2 ge = h1 ? uh.cell_gradient(ci, cj, s, t) : Vec2{};
        if (ref) {
            e -= ref->value(x);
            if (h1) ge -= ref->grad(x);
        }
        return std::array<double, 1>{wq * wt * (e * e + (h1 ? dot(ge, ge) : 0.0))};
    });
    return std::sqrt(s[0]);
}

double weighted_norm(const BulkData& f, WeightKind w, NormOrder order, const ScaledWeights& weights,
                     const BoxGrid& grid, const QuadSpec& quad) {
    const int ns = quad.subdivisions(grid.h(), weights.epsilon());
    const bool h1 = order == NormOrder::H1;
    const auto s =
        integrate_cells<1>(grid, quad.order, ns, no_refine, [&](int, int, double, double, Vec2 x, double wq) {
            const double wt = weight_at(w, weights, sdf(weights.geometry(), x));
            if (wt == 0.0) return std::array<double, 1>{0.0};
            const double v = f.value(x);
            double g2 = 0.0;
            if (h1) {
                const Vec2 g = f.grad(x);
                g2 = dot(g, g);
            }
            return std::array<double, 1>{wq * wt * (v * v + g2)};
        });
    return std::sqrt(s[0]);
}

double WeightedIntegrals::l2_xi() const { return std::sqrt(xi_l2); }
double WeightedIntegrals::h1_xi() const { return std::sqrt(xi_l2 + xi_grad); }
double WeightedIntegrals::l2_delta() const { return std::sqrt(delta_l2); }
double WeightedIntegrals::h1_delta() const { return std::sqrt(delta_l2 + delta_grad); }
double WeightedIntegrals::l2_delta_penalty(double eps) const { return std::sqrt(delta_l2 / eps); }

WeightedIntegrals weighted_integrals(const NodalField& uh, const BulkData* ref, const ScaledWeights& weights,
                                     const QuadSpec& quad) {
    const BoxGrid& grid = uh.grid();
    const int ns = quad.subdivisions(grid.h(), weights.epsilon());
    const auto s = integrate_cells<4>(grid, quad.order, ns, no_refine,
                                      [&](int ci, int cj, double s, double t, Vec2 x, double wq) {
        const double d = sdf(weights.geometry(), x);
        const double xi = weights.xi_from_distance(d);
        const double de = weights.delta_from_distance(d);
        if (xi == 0.0 && de == 0.0) return std::array<double, 4>{};
        double e = uh.cell_value(ci, cj, s, t);
        Vec2 ge = uh.cell_gradient(ci, cj, s, t);
        if (ref) {
            e -= ref->value(x);
            ge -= ref->grad(x);
        }
        const double e2 = e * e;
        const double g2 = dot(ge, ge);
        return std::array<double, 4>{wq * xi * e2, wq * xi * g2, wq * de * e2, wq * de * g2};
    });
    return {s[0], s[1], s[2], s[3]};
}

RestrictedError restricted_error(const NodalField& uh, const BulkData& ref, const SignedGeometry& geom,
                                 const QuadSpec& quad, double eps_hint) {
    const BoxGrid& grid = uh.grid();
    const double h = grid.h();
    const int ns = norm_subdivisions(quad, h, eps_hint);
    auto cut = [&](int ci, int cj) {
        const Vec2 c = grid.node(ci, cj) + Vec2{0.5 * h, 0.5 * h};
        return std::abs(sdf(geom, c)) <= 0.75 * h;
    };
    const auto s = integrate_cells<2>(grid, quad.order, ns, cut,
                                      [&](int ci, int cj, double s, double t, Vec2 x, double wq) {
        if (!(sdf(geom, x) < 0.0)) return std::array<double, 2>{};
        const double e = uh.cell_value(ci, cj, s, t) - ref.value(x);
        const Vec2 ge = uh.cell_gradient(ci, cj, s, t) - ref.grad(x);
        return std::array<double, 2>{wq * e * e, wq * dot(ge, ge)};
    });
    return {std::sqrt(s[0]), std::sqrt(s[0] + s[1])};
}

double restricted_h1_error(const NodalField& uh, const BulkData& ref, const SignedGeometry& geom,
                           const QuadSpec& quad, double eps_hint) {
    return restricted_error(uh, ref, geom, quad, eps_hint).h1;
}

double restricted_h1_norm(const BulkData& ref, const SignedGeometry& geom, const BoxGrid& grid,
                          const QuadSpec& quad, double eps_hint) {
    return restricted_error(NodalField(grid, 0.0), ref, geom, quad, eps_hint).h1;
}

double surface_norm_exact(const SurfaceData& v, const SignedGeometry& geom, NormOrder order, int n_p) {
    const bool h1 = order == NormOrder::H1;
    DD_REQUIRE(!h1 || v.has_derivative(), "surface data has no tangential derivative closure");
    const SurfaceRule rule = surface_rule(geom, n_p);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = rule.parameters[i];
        const double val = v.value(t);
        double g2 = 0.0;
        if (h1) {
            const double gt = v.derivative(t) / geom.speed(t);
            g2 = gt * gt;
        }
        s += rule.nodes[i].weight * (val * val + g2);
    }
    return std::sqrt(s);
}

double delta_functional(const BulkData& f, const ScaledWeights& weights, const BoxGrid& grid, const QuadSpec& quad) {
    const int ns = quad.subdivisions(grid.h(), weights.epsilon());
    return integrate_cells<1>(grid, quad.order, ns, no_refine, [&](int, int, double, double, Vec2 x, double wq) {
        const double de = weights.delta_eps(x);
        return std::array<double, 1>{de == 0.0 ? 0.0 : wq * de * f.value(x)};
    })[0];
}

double delta_functional(const NodalField& f, const ScaledWeights& weights, const QuadSpec& quad) {
    const BoxGrid& grid = f.grid();
    const int ns = quad.subdivisions(grid.h(), weights.epsilon());
    return integrate_cells<1>(grid, quad.order, ns, no_refine,
                              [&](int ci, int cj, double s, double t, Vec2 x, double wq) {
        const double de = weights.delta_eps(x);
        return std::array<double, 1>{de == 0.0 ? 0.0 : wq * de * f.cell_value(ci, cj, s, t)};
    })[0];
}

double box_h1_norm(const BulkData& f, const BoxGrid& grid, const QuadSpec& quad) {
    const int ns = quad.subdiv > 0 ? quad.subdiv : 1;
    const auto s = integrate_cells<1>(grid, quad.order, ns, no_refine, [&](int, int, double, double, Vec2 x, double wq) {
        const double v = f.value(x);
        const Vec2 g = f.grad(x);
        return std::array<double, 1>{wq * (v * v + dot(g, g))};
    });
    return std::sqrt(s[0]);
}

double NormReport::at(const std::string& key) const {
    const auto it = values.find(key);
    DD_REQUIRE(it != values.end(), "norm '" + key + "' not in report");
    return it->second;
}

}  // namespace dd
