#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dd/fit.hpp"
#include "dd/grid.hpp"
#include "dd/norms.hpp"

using namespace dd;

namespace {
constexpr double kPi = std::numbers::pi;
const SignedGeometry kCircle = SignedGeometry::circle({0, 0}, 1.0);
const std::vector<double> kBox{-2, 2, -2, 2};

BulkData fx(double (*f)(Vec2)) { return BulkData::closure([f](Vec2 p) { return f(p); }); }
}  // namespace

TEST_CASE("delta weighted norm of one is the curve length") {
    for (double eps : {0.2, 0.1, 0.05}) {
        const ScaledWeights w(Profile::double_obstacle(), eps, kCircle);
        const BoxGrid grid = BoxGrid::with_spacing(kBox, eps / 4);
        const double n = weighted_norm(BulkData::constant(1.0), WeightKind::Delta, NormOrder::L2, w, grid);
        CHECK(n == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-3));
        CHECK(weighted_norm(BulkData(), WeightKind::Delta, NormOrder::H1, w, grid) == 0.0);
    }
}

TEST_CASE("xi weighted norm of x approaches the disc integral") {
    double prev = 1e300;
    double last = 0.0;
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
        const ScaledWeights w(Profile::double_obstacle(), eps, kCircle);
        const BoxGrid grid = BoxGrid::with_spacing(kBox, 0.0125);
        const double n = weighted_norm(fx([](Vec2 p) { return p.x; }), WeightKind::Xi, NormOrder::L2, w, grid);
        const double err = std::abs(n * n - kPi / 4);
        CHECK(err < prev);
        prev = err;
        last = n * n;
    }
    CHECK(last == doctest::Approx(kPi / 4).epsilon(0.01));
}

TEST_CASE("restricted errors") {
    const BulkData ref = BulkData::modal({{2, 2, 1.0, 0.0}, {1, 1, 0.0, 1.0}, {0, 0, 0.5, 0.0}});
    std::vector<RestrictedError> errs;
    for (double h : {0.1, 0.05, 0.025}) {
        const BoxGrid grid = BoxGrid::with_spacing(kBox, h);
        errs.push_back(restricted_error(inject(grid, ref), ref, kCircle));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
        CHECK(errs[i - 1].l2 / errs[i].l2 == doctest::Approx(4.0).epsilon(0.1));
        CHECK(errs[i - 1].h1 / errs[i].h1 == doctest::Approx(2.0).epsilon(0.1));
    }
    const BoxGrid grid = BoxGrid::with_spacing(kBox, 0.05);
    const RestrictedError zero = restricted_error(NodalField(grid, 3.0), BulkData::constant(3.0), kCircle);
    CHECK(zero.h1 <= 1e-14);
    const RestrictedError area = restricted_error(NodalField(grid, 0.0), BulkData::constant(1.0), kCircle);
    CHECK(area.l2 * area.l2 == doctest::Approx(kPi).epsilon(1e-3));
}

TEST_CASE("surface norms") {
    CHECK(surface_norm_exact(SurfaceData::constant(1.0), kCircle, NormOrder::H1) ==
          doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-12));
    CHECK(surface_norm_exact(SurfaceData::fourier({{1, 1.0, 0.0}}), kCircle, NormOrder::H1) ==
          doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-12));
    // cos 2t on radius 2: midpoint-rule oracle of (v^2 + (v'/2)^2) 2 dt.
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double t = 2 * kPi * (i + 0.5) / n;
        s += (std::pow(std::cos(2 * t), 2) + std::pow(std::sin(2 * t), 2)) * 2.0 * (2 * kPi / n);
    }
    const SignedGeometry c2 = SignedGeometry::circle({0, 0}, 2.0);
    CHECK(surface_norm_exact(SurfaceData::fourier({{2, 1.0, 0.0}}), c2, NormOrder::H1) ==
          doctest::Approx(std::sqrt(s)).epsilon(1e-10));
}

TEST_CASE("delta functional") {
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    std::vector<double> err;
    for (double eps : eps_list) {
        const ScaledWeights w(Profile::double_obstacle(), eps, kCircle);
        const BoxGrid grid = BoxGrid::with_spacing(kBox, eps / 4);
        CHECK(delta_functional(BulkData::constant(1.0), w, grid) == doctest::Approx(2 * kPi).epsilon(1e-3 / (2 * kPi)));
        CHECK(std::abs(delta_functional(fx([](Vec2 p) { return p.y; }), w, grid)) < 1e-6);
        err.push_back(std::abs(delta_functional(fx([](Vec2 p) { return p.x * p.x; }), w, grid) - kPi));
    }
    const LineFit fit = fit_loglog(eps_list, err);
    CHECK(fit.slope >= 1.0);
}

TEST_CASE("weighted integrals agree with the single norms") {
    const ScaledWeights w(Profile::double_well(), 0.1, kCircle);
    const BoxGrid grid = BoxGrid::with_spacing(kBox, 0.025);
    const BulkData ref = BulkData::modal({{1, 1, 1.0, 0.0}});
    const NodalField uh(grid, 0.25);
    const WeightedIntegrals wi = weighted_integrals(uh, &ref, w);
    CHECK(wi.h1_delta() == doctest::Approx(weighted_norm(uh, &ref, WeightKind::Delta, NormOrder::H1, w)).epsilon(1e-12));
    CHECK(wi.l2_xi() == doctest::Approx(weighted_norm(uh, &ref, WeightKind::Xi, NormOrder::L2, w)).epsilon(1e-12));
    CHECK(wi.l2_delta_penalty(0.1) ==
          doctest::Approx(weighted_norm(uh, &ref, WeightKind::DeltaOverEps, NormOrder::L2, w)).epsilon(1e-12));
    CHECK(wi.h1_xi() >= wi.l2_xi());
}

TEST_CASE("line fits") {
    const LineFit exact = fit_loglog({0.2, 0.1, 0.05}, {0.04, 0.01, 0.0025});
    CHECK(exact.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(exact.ci95 < 1e-10);
    const LineFit noisy = fit_line({0, 1, 2, 3}, {0.1, 0.9, 2.2, 2.8});
    CHECK(noisy.slope == doctest::Approx(0.94));
    CHECK(noisy.ci95 > 0.0);
    CHECK(noisy.points == 4);
}
