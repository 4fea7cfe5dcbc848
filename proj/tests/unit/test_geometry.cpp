#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dd/error.hpp"
#include "dd/geometry.hpp"

using namespace dd;

namespace {

constexpr double kPi = std::numbers::pi;

// Distance to an ellipse by brute-force minimisation over a dense parameter grid.
double brute_distance(Vec2 radii, Vec2 x) {
    double best = 1e300;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n;
        best = std::min(best, norm(x - Vec2{radii.x * std::cos(t), radii.y * std::sin(t)}));
    }
    const bool inside = (x.x * x.x) / (radii.x * radii.x) + (x.y * x.y) / (radii.y * radii.y) < 1.0;
    return inside ? -best : best;
}

}  // namespace

TEST_CASE("circle signed distance") {
    const auto c = SignedGeometry::circle({0, 0}, 1.0);
    CHECK(sdf(c, {2, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sdf(c, {0, 0}) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("ellipse signed distance matches a dense parameter sweep") {
    const auto e = SignedGeometry::ellipse({0, 0}, {2, 1});
    CHECK(sdf(e, {3, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 20; ++i) {
        const Vec2 x{u(rng), u(rng)};
        // Skip the medial axis neighbourhood where the projection is refused.
        if (std::abs(x.y) < 0.05 && std::abs(x.x) < 1.6) continue;
        const double d = sdf(e, x);
        CHECK(std::abs(d - brute_distance({2, 1}, x)) < 1e-6);
    }
}

TEST_CASE("ellipse projection near the axes") {
    const auto e = SignedGeometry::ellipse({0.1, -0.2}, {1.2, 0.8});
    for (double tiny : {1e-300, 1e-17, 1e-12, 1e-8}) {
        for (double sx : {-1.0, 1.0}) {
            CHECK(sdf(e, {0.1 + sx * 1.2, -0.2 + tiny}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
            CHECK(sdf(e, {0.1 + sx * 1.5, -0.2 - tiny}) == doctest::Approx(0.3).epsilon(1e-12));
            CHECK(sdf(e, {0.1 + sx * 1.0, -0.2 + tiny}) == doctest::Approx(-0.2).epsilon(1e-12));
        }
        CHECK(sdf(e, {0.1 + tiny, 0.7}) == doctest::Approx(0.1).epsilon(1e-12));
    }
}

TEST_CASE("closest point examples") {
    const auto c = SignedGeometry::circle({0, 0}, 1.0);
    const Vec2 p1 = closest_point(c, {2, 0});
    const Vec2 p2 = closest_point(c, {0.5, 0});
    CHECK(p1.x == doctest::Approx(1.0));
    CHECK(std::abs(p1.y) < 1e-15);
    CHECK(p2.x == doctest::Approx(1.0));
    const auto e = SignedGeometry::ellipse({0, 0}, {2, 1});
    const Vec2 p3 = closest_point(e, {0, 2});
    CHECK(std::abs(p3.x) < 1e-12);
    CHECK(p3.y == doctest::Approx(1.0));
}

TEST_CASE("closest point refuses the medial axis") {
    const auto c = SignedGeometry::circle({0, 0}, 1.0);
    CHECK_THROWS_AS(closest_point(c, {0.0, 0.0}), PreconditionError);
}

TEST_CASE("normals") {
    const auto c = SignedGeometry::circle({0, 0}, 1.0);
    CHECK(normal(c, {1, 0}).x == doctest::Approx(1.0));
    CHECK(normal(c, {0, 1}).y == doctest::Approx(1.0));
    const auto e = SignedGeometry::ellipse({0, 0}, {2, 1});
    const Vec2 n = normal(e, {2, 0});
    CHECK(n.x == doctest::Approx(1.0));
    CHECK(std::abs(n.y) < 1e-12);
}

TEST_CASE("signed distance Hessian") {
    const auto c = SignedGeometry::circle({0, 0}, 1.0);
    const Mat2 h2 = sdf_hessian(c, {2, 0});
    CHECK(std::abs(h2.xx) < 1e-14);
    CHECK(h2.yy == doctest::Approx(0.5));
    const Mat2 h1 = sdf_hessian(c, {1, 0});
    CHECK(h1.yy == doctest::Approx(1.0));

    // Finite-difference Hessian of the iterative ellipse distance.
    const auto e = SignedGeometry::ellipse({0, 0}, {2, 1});
    const Mat2 he = sdf_hessian(e, {2, 0});
    const double s = 1e-4;
    const double fd_yy = (sdf(e, {2, s}) - 2.0 * sdf(e, {2, 0}) + sdf(e, {2, -s})) / (s * s);
    CHECK(he.yy == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(he.yy == doctest::Approx(fd_yy).epsilon(1e-5));
    CHECK(std::abs(he.xx) < 1e-12);
    CHECK(std::abs(he.xy) < 1e-12);
}

TEST_CASE("gradient of the distance has unit length in the tube") {
    const auto e = SignedGeometry::ellipse({0.1, -0.2}, {1.2, 0.8});
    const double s = 1e-6;
    for (int i = 0; i < 32; ++i) {
        const double t = 2.0 * kPi * i / 32;
        const Vec2 x = e.point(t) + 0.1 * e.unit_normal(t);
        const Vec2 g{(sdf(e, x + Vec2{s, 0}) - sdf(e, x - Vec2{s, 0})) / (2 * s),
                     (sdf(e, x + Vec2{0, s}) - sdf(e, x - Vec2{0, s})) / (2 * s)};
        CHECK(norm(g) == doctest::Approx(1.0).epsilon(1e-6));
        // x = p(x) + d(x) nu(p(x))
        const Vec2 p = closest_point(e, x);
        const Vec2 back = p + sdf(e, x) * normal(e, p);
        CHECK(norm(back - x) < 1e-10);
    }
}

TEST_CASE("tubular rule weights") {
    const auto c = SignedGeometry::circle({0, 0}, 1.0);
    const TubularRule r = tubular_rule(c, 0.5, 8, 256);
    CHECK(r.total_weight() == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    // Annulus area on an ellipse: perimeter times width (curvature terms integrate to zero).
    const auto e = SignedGeometry::ellipse({0, 0}, {2, 1});
    const double eta = 0.2;
    const TubularRule re = tubular_rule(e, eta, 8, 2048);
    CHECK(re.total_weight() == doctest::Approx(2.0 * eta * e.perimeter()).epsilon(1e-8));
}

TEST_CASE("surface rule weights") {
    CHECK(surface_rule(SignedGeometry::circle({0, 0}, 1.0), 64).total_weight() ==
          doctest::Approx(2.0 * kPi).epsilon(1e-12));
    CHECK(surface_rule(SignedGeometry::circle({0, 0}, 2.0), 8).total_weight() ==
          doctest::Approx(4.0 * kPi).epsilon(1e-12));
    // Perimeter 4 a E(e) with the complete elliptic integral of the second kind.
    const double ecc = std::sqrt(1.0 - 0.25);
    const double exact = 4.0 * 2.0 * std::comp_ellint_2(ecc);
    CHECK(exact == doctest::Approx(9.688448).epsilon(1e-7));
    const double w = surface_rule(SignedGeometry::ellipse({0, 0}, {2, 1}), 512).total_weight();
    CHECK(std::abs(w - exact) < 1e-6);
}
