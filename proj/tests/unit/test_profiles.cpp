#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dd/profiles.hpp"
#include "dd/quadrature.hpp"

using namespace dd;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("profile values") {
    const Profile dw = Profile::double_well();
    const Profile dob = Profile::double_obstacle();
    CHECK(dw.xi(0.0) == 0.5);
    CHECK(dob.xi(0.0) == 0.5);
    CHECK(dob.xi(kPi / 2) == 0.0);
    CHECK(dob.xi(-kPi) == 1.0);
    CHECK(dob.delta(0.0) == doctest::Approx(2.0 / kPi).epsilon(1e-15));
    CHECK(dob.delta(kPi) == 0.0);
}

TEST_CASE("double well density is normalised") {
    const Profile dw = Profile::double_well();
    // Independent tanh-sinh integral of the printed sech^4 density.
    boost::math::quadrature::tanh_sinh<double> ts;
    const double raw = ts.integrate(
        [](double s) {
            const double c = std::cosh(s / std::numbers::sqrt2);
            return 3.0 / (2.0 * std::numbers::sqrt2) / (c * c * c * c);
        },
        -40.0, 40.0);
    CHECK(raw == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(dw.raw_integral() == doctest::Approx(raw).epsilon(1e-10));
    const double total = integrate_composite([&](double s) { return dw.delta(s); }, -40.0, 40.0, 1600, 10);
    CHECK(std::abs(total - 1.0) < 1e-8);
}

TEST_CASE("C_xi constants") {
    CHECK(cxi_constant(Profile::double_obstacle()) >= kPi / 8);
    const double cw = cxi_constant(Profile::double_well());
    CHECK(cw > 0.0);
    CHECK(std::isfinite(cw));
    const Profile dw = Profile::double_well();
    for (double s = -30.0; s <= 30.0; s += 0.01) CHECK_LE(cw * dw.delta(s), dw.xi(s));
}

TEST_CASE("C_xi fails when delta lives where xi vanishes") {
    const Profile bad = Profile::custom(
        "broken", [](double s) { return s < 0.0 ? 1.0 - 0.5 * std::exp(s) : (s < 1.0 ? 0.5 * (1.0 - s) : 0.0); },
        [](double s) { return std::abs(s) < 2.0 ? 0.25 : 0.0; }, 2.0);
    CHECK_THROWS(cxi_constant(bad));
    CHECK_FALSE(verify_profile(bad).passed());
}

TEST_CASE("shipped profiles pass the assumption battery") {
    const ProfileReport dob = verify_profile(Profile::double_obstacle());
    CHECK_MESSAGE(dob.passed(), (dob.failures.empty() ? "" : dob.failures.front()));
    CHECK(std::isfinite(dob.c_delta_int));
    const ProfileReport dw = verify_profile(Profile::double_well());
    CHECK_MESSAGE(dw.passed(), (dw.failures.empty() ? "" : dw.failures.front()));
    CHECK(std::isfinite(dw.c_delta_int));
    CHECK(dw.evenness_max == 0.0);
    CHECK(dob.xi_at_zero == 0.5);
}

TEST_CASE("Cauchy tails fail the moment check") {
    Profile cauchy = Profile::custom(
        "cauchy", [](double s) { return 0.5 - std::atan(s) / kPi; }, [](double s) { return 1.0 / (kPi * (1.0 + s * s)); });
    const ProfileReport r = verify_profile(cauchy);
    CHECK_FALSE(r.passed());
    CHECK_THROWS(cauchy.certify());
}

TEST_CASE("scaled weights") {
    const ScaledWeights w(Profile::double_obstacle(), 0.1, SignedGeometry::circle({0, 0}, 1.0));
    CHECK(w.xi_eps({0.0, 0.5}) == 1.0);
    CHECK(w.xi_eps({1.0, 0.0}) == doctest::Approx(0.5));
    CHECK(w.delta_eps({1.0, 0.0}) == doctest::Approx(20.0 / kPi));
    CHECK(w.delta_eps({2.0, 0.0}) == 0.0);
}

TEST_CASE("profile monotonicity and evenness as properties") {
    for (const Profile& p : {Profile::double_well(), Profile::double_obstacle()}) {
        for (double s = 0.0; s < 6.0; s += 0.013) {
            CHECK(p.delta(s) == p.delta(-s));
            CHECK(p.xi(s) <= p.xi(s - 0.013));
            CHECK(p.xi(s) + p.xi(-s) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(p.xi(s) >= 0.0);
            CHECK(p.xi(-s) <= 1.0);
        }
    }
}
