#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dd/data.hpp"
#include "dd/extensions.hpp"
#include "dd/grid.hpp"
#include "dd/norms.hpp"

using namespace dd;

namespace {
constexpr double kPi = std::numbers::pi;
const SignedGeometry kCircle = SignedGeometry::circle({0, 0}, 1.0);
}  // namespace

TEST_CASE("modal data derivatives match finite differences") {
    const BulkData f = BulkData::modal({{3, 1, 1.0, -0.5}, {2, 2, 0.3, 0.7}}, {0.1, -0.2});
    const Vec2 x{0.4, 0.3};
    const double s = 1e-5;
    const Vec2 g = f.grad(x);
    CHECK(g.x == doctest::Approx((f.value(x + Vec2{s, 0}) - f.value(x - Vec2{s, 0})) / (2 * s)).epsilon(1e-8));
    CHECK(g.y == doctest::Approx((f.value(x + Vec2{0, s}) - f.value(x - Vec2{0, s})) / (2 * s)).epsilon(1e-8));
    const double lap = (f.value(x + Vec2{s, 0}) + f.value(x - Vec2{s, 0}) + f.value(x + Vec2{0, s}) +
                        f.value(x - Vec2{0, s}) - 4 * f.value(x)) /
                       (s * s);
    CHECK(f.laplacian(x) == doctest::Approx(lap).epsilon(1e-4));
}

TEST_CASE("constant extension") {
    const BulkData one = constant_normal_extension(SurfaceData::constant(1.0), kCircle, 0.2);
    CHECK(one.value({1.05, 0.0}) == 1.0);
    CHECK(one.value({0.0, 0.3}) == 1.0);
    const BulkData c = constant_normal_extension(SurfaceData::fourier({{1, 1.0, 0.0}}), kCircle, 0.2);
    CHECK(c.value({1.05, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.value({0.0, 0.95}) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("reflection extension") {
    const BulkData r2 = BulkData::modal({{2, 0, 1.0, 0.0}});
    const BulkData e = reflection_extension(r2, kCircle, 0.5);
    CHECK(e.value({1.2, 0.0}) == doctest::Approx(0.64).epsilon(1e-14));
    const BulkData three = reflection_extension(BulkData::constant(3.0), kCircle, 0.5);
    CHECK(three.value({1.3, 0.4}) == 3.0);
    CHECK(three.value({-0.2, 0.1}) == 3.0);
    const BulkData u = BulkData::modal({{1, 1, 1.0, 0.0}, {2, 2, 0.0, 1.0}});
    const BulkData ue = reflection_extension(u, kCircle, 0.5);
    for (int i = 0; i < 64; ++i) {
        const Vec2 p{std::cos(2 * kPi * i / 64), std::sin(2 * kPi * i / 64)};
        CHECK(std::abs(ue.value(p) - u.value(p)) < 1e-12);
    }
}

TEST_CASE("dirichlet lifting") {
    const double eta = 0.25;
    const BulkData g1 = dirichlet_lifting(SurfaceData::constant(1.0), kCircle, eta);
    CHECK(g1.value({1.0, 0.0}) == doctest::Approx(1.0));
    CHECK(g1.value({0.0, -1.0}) == doctest::Approx(1.0));
    CHECK(g1.value({1.3, 0.0}) == 0.0);
    CHECK(g1.value({0.7, 0.0}) == 0.0);

    // Grid H1 norm settles under refinement.
    const BulkData gc = dirichlet_lifting(SurfaceData::fourier({{1, 1.0, 0.0}}), kCircle, eta);
    const std::vector<double> box{-2, 2, -2, 2};
    const double n1 = box_h1_norm(gc, BoxGrid::with_spacing(box, 0.05));
    const double n2 = box_h1_norm(gc, BoxGrid::with_spacing(box, 0.025));
    const double n3 = box_h1_norm(gc, BoxGrid::with_spacing(box, 0.0125));
    CHECK(std::isfinite(n3));
    CHECK(n3 / n2 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(n2 / n1 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("neumann lifting has the prescribed conormal derivative") {
    const BulkData h = neumann_lifting(SurfaceData::constant(1.0), MatrixData::identity(), kCircle, 0.25);
    const double s = 1e-5;
    for (double t : {0.0, 1.0, 2.5, 4.0}) {
        const Vec2 n{std::cos(t), std::sin(t)};
        const double dr = (h.value((1 + s) * n) - h.value((1 - s) * n)) / (2 * s);
        CHECK(dr == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(h.value(n)) < 1e-14);
    }
    const BulkData z = neumann_lifting(SurfaceData::constant(0.0), MatrixData::identity(), kCircle, 0.25);
    CHECK(z.value({1.1, 0.2}) == 0.0);
    CHECK(z.value({0.2, 0.3}) == 0.0);
}

TEST_CASE("cutoff is C1 with the documented plateaus") {
    CHECK(cutoff(0.0) == 1.0);
    CHECK(cutoff(0.5) == 1.0);
    CHECK(cutoff(1.0) == 0.0);
    CHECK(cutoff(3.0) == 0.0);
    CHECK(cutoff_d1(0.5) == doctest::Approx(0.0).scale(1.0));
    CHECK(cutoff_d1(1.0) == doctest::Approx(0.0).scale(1.0));
    for (double s = 0.51; s < 1.0; s += 0.05) CHECK(cutoff_d1(s) < 0.0);
}

TEST_CASE("bilinear interpolation") {
    const BoxGrid grid(-1, 1, -1, 1, 200, 200);
    const NodalField c(grid, 2.5);
    CHECK(c.interpolate({0.123, -0.77}) == 2.5);
    const NodalField x = inject(grid, BulkData::closure([](Vec2 p) { return p.x; }));
    CHECK(x.interpolate({0.1234, 0.5}) == doctest::Approx(0.1234).epsilon(1e-14));
    const NodalField s = inject(grid, BulkData::closure([](Vec2 p) { return std::sin(p.x); }));
    for (double q = -0.95; q < 1.0; q += 0.137) {
        CHECK(std::abs(s.interpolate({q, 0.2}) - std::sin(q)) < 0.5 * 0.01 * 0.01);
    }
    CHECK_THROWS(c.interpolate({1.5, 0.0}));
}

TEST_CASE("surface data") {
    const SurfaceData v = SurfaceData::fourier({{0, 0.5, 0.0}, {2, 1.0, -1.0}});
    CHECK(v.value(0.0) == doctest::Approx(1.5));
    CHECK(v.derivative(0.0) == doctest::Approx(-2.0));
    CHECK(v.mean(kCircle) == doctest::Approx(0.5).epsilon(1e-12));
}
