#include "dd/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dd/error.hpp"
#include "dd/quadrature.hpp"

namespace dd {
namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kTailCut = 40.0;

// Printed double-well density (3/(2 sqrt 2)) sech^4(s/sqrt 2), before normalisation.
double dw_delta_raw(double s) {
    const double x = std::abs(s) / std::numbers::sqrt2;
    const double e = std::exp(-x);
    const double sech = 2.0 * e / (1.0 + e * e);
    const double s2 = sech * sech;
    return 3.0 / (2.0 * std::numbers::sqrt2) * s2 * s2;
}

double integrate_window(const std::function<double(double)>& f, double half_width) {
    // Panels scale with the window so that ~40 panels cover each unit of s.
    const int panels = std::max(64, static_cast<int>(std::ceil(40.0 * half_width)));
    return integrate_composite(f, -half_width, half_width, panels, 10);
}

double dw_raw_integral() {
    static const double value = integrate_window(dw_delta_raw, kTailCut);
    return value;
}

}  // namespace

double xi_base(ProfileKind kind, double s) {
    switch (kind) {
        case ProfileKind::DoubleWell:
            // 1/2 (1 - tanh(s/sqrt 2)) written without cancellation.
            return 1.0 / (1.0 + std::exp(std::numbers::sqrt2 * s));
        case ProfileKind::DoubleObstacle:
            if (s <= -kHalfPi) return 1.0;
            if (s >= kHalfPi) return 0.0;
            if (s <= 0.0) return 0.5 * (1.0 - std::sin(s));
            // 1 - sin s = cos^2 s / (1 + sin s), free of cancellation near pi/2.
            {
                const double c = std::cos(s);
                return 0.5 * c * c / (1.0 + std::sin(s));
            }
        case ProfileKind::Custom:
            break;
    }
    throw PreconditionError("xi_base: custom profiles have no base formula");
}

double delta_base(ProfileKind kind, double s) {
    switch (kind) {
        case ProfileKind::DoubleWell:
            return dw_delta_raw(s) / dw_raw_integral();
        case ProfileKind::DoubleObstacle: {
            const double a = std::abs(s);
            if (a >= kHalfPi) return 0.0;
            const double c = std::cos(a);
            return 2.0 / std::numbers::pi * c * c;
        }
        case ProfileKind::Custom:
            break;
    }
    throw PreconditionError("delta_base: custom profiles have no base formula");
}

Profile Profile::double_well() {
    Profile p;
    p.kind_ = ProfileKind::DoubleWell;
    p.name_ = "double-well";
    p.raw_integral_ = dw_raw_integral();
    p.normalization_ = 1.0 / p.raw_integral_;
    p.verified_ = true;
    return p;
}

Profile Profile::double_obstacle() {
    Profile p;
    p.kind_ = ProfileKind::DoubleObstacle;
    p.name_ = "double-obstacle";
    p.support_ = kHalfPi;
    p.verified_ = true;
    return p;
}

Profile Profile::custom(std::string name, std::function<double(double)> xi, std::function<double(double)> delta,
                        double support) {
    DD_REQUIRE(xi && delta, "custom profile needs both xi and delta");
    DD_REQUIRE(support > 0.0, "support half-width must be positive");
    Profile p;
    p.kind_ = ProfileKind::Custom;
    p.name_ = std::move(name);
    p.xi_ = std::move(xi);
    p.delta_ = std::move(delta);
    p.support_ = support;
    p.raw_integral_ = integrate_window(p.delta_, std::min(support, kTailCut));
    return p;
}

double Profile::xi(double s) const { return kind_ == ProfileKind::Custom ? xi_(s) : xi_base(kind_, s); }

double Profile::delta(double s) const { return kind_ == ProfileKind::Custom ? delta_(s) : delta_base(kind_, s); }

void Profile::certify(double tol) {
    const ProfileReport report = verify_profile(*this, tol);
    if (!report.passed()) {
        std::string msg = "profile '" + name_ + "' failed verification:";
        for (const auto& f : report.failures) msg += " [" + f + "]";
        throw PreconditionError(msg);
    }
    verified_ = true;
}

double profile_window(const Profile& profile) { return std::min(profile.delta_support(), kTailCut); }

ScaledWeights::ScaledWeights(Profile profile, double epsilon, SignedGeometry geom)
    : profile_(std::move(profile)), eps_(epsilon), geom_(geom) {
    DD_REQUIRE(epsilon > 0.0, "epsilon must be positive");
}

double cxi_constant(const Profile& profile) {
    // xi/delta = pi / (4 (1 + sin s)), whose infimum pi/8 is approached at the support edge.
    if (profile.kind() == ProfileKind::DoubleObstacle) return std::numbers::pi / 8.0;
    const double w = profile_window(profile);
    const int n = 200000;
    const double step = 2.0 * w / n;
    double inf = std::numeric_limits<double>::infinity();
    double where = 0.0;
    for (int i = 0; i < n; ++i) {
        // Cell midpoints keep the scan off the support endpoints.
        const double s = -w + (i + 0.5) * step;
        const double d = profile.delta(s);
        if (d <= 0.0) continue;
        const double ratio = profile.xi(s) / d;
        if (ratio < inf) {
            inf = ratio;
            where = s;
        }
    }
    if (!(inf > 0.0) || !std::isfinite(inf)) {
        std::ostringstream os;
        os << "cxi_constant: inf xi/delta = " << inf << " near s = " << where << "; no C_xi > 0 exists";
        throw Error(os.str());
    }
    return 0.99 * inf;
}

ProfileReport verify_profile(const Profile& profile, double tol, double decay_eta) {
    ProfileReport rep;
    rep.name = profile.name();
    rep.raw_integral = profile.raw_integral();
    const double w = profile_window(profile);
    auto fail = [&rep](const std::string& what) { rep.failures.push_back(what); };

    rep.integral = integrate_window([&](double s) { return profile.delta(s); }, w);
    if (!(std::abs(rep.integral - 1.0) <= tol)) fail("integral of delta = " + std::to_string(rep.integral));

    const int n = 20000;
    const double step = w / n;
    for (int i = 0; i <= n; ++i) {
        const double s = i * step;
        rep.evenness_max = std::max(rep.evenness_max, std::abs(profile.delta(s) - profile.delta(-s)));
        if (i < n && profile.delta(s + step) > profile.delta(s)) ++rep.delta_monotonicity_violations;
    }
    for (int i = -n; i < n; ++i) {
        if (profile.xi((i + 1) * step) > profile.xi(i * step)) ++rep.xi_monotonicity_violations;
    }
    if (rep.evenness_max != 0.0) fail("delta not even, max asymmetry " + std::to_string(rep.evenness_max));
    if (rep.delta_monotonicity_violations > 0) fail("delta not non-increasing in |s|");
    if (rep.xi_monotonicity_violations > 0) fail("xi not non-increasing");

    rep.xi_at_zero = profile.xi(0.0);
    rep.xi_left = profile.xi(-w - 10.0);
    rep.xi_right = profile.xi(w + 10.0);
    if (rep.xi_at_zero != 0.5) fail("xi(0) != 1/2");
    if (std::abs(rep.xi_left - 1.0) > 1e-12 || std::abs(rep.xi_right) > 1e-12) fail("xi limits are not 1 and 0");

    try {
        rep.c_xi = cxi_constant(profile);
        // Confirm on a grid ten times finer than the scan.
        const int fine = 2000000;
        const double fs = 2.0 * w / fine;
        for (int i = 0; i < fine; ++i) {
            const double s = -w + (i + 0.25) * fs;
            if (rep.c_xi * profile.delta(s) > profile.xi(s)) {
                fail("C_xi delta <= xi violated at s = " + std::to_string(s));
                break;
            }
        }
    } catch (const Error& e) {
        fail(e.what());
    }

    // C_delta,int = int |delta'|^2/delta + int sqrt(delta) + int delta (|s| + s^2).
    auto fisher = [&](double s) {
        const double d = profile.delta(s);
        if (d <= 0.0) return 0.0;
        const double hs = 1e-5;
        const double dd = (profile.delta(s + hs) - profile.delta(s - hs)) / (2.0 * hs);
        return dd * dd / d;
    };
    auto root = [&](double s) { return std::sqrt(profile.delta(s)); };
    auto moment = [&](double s) { return profile.delta(s) * (std::abs(s) + s * s); };
    rep.fisher_term = integrate_window(fisher, w);
    rep.sqrt_term = integrate_window(root, w);
    rep.moment_term = integrate_window(moment, w);
    rep.c_delta_int = rep.fisher_term + rep.sqrt_term + rep.moment_term;
    if (!std::isfinite(rep.c_delta_int)) fail("C_delta,int is not finite");
    if (!profile.compact()) {
        // Truncated integrals must have settled: doubling the window may not change them.
        const double wide = 2.0 * w;
        const struct {
            const char* name;
            double narrow;
            double wide;
        } terms[] = {{"int |delta'|^2/delta", rep.fisher_term, integrate_window(fisher, wide)},
                     {"int sqrt(delta)", rep.sqrt_term, integrate_window(root, wide)},
                     {"int delta (|s| + s^2)", rep.moment_term, integrate_window(moment, wide)}};
        for (const auto& t : terms) {
            if (!(std::abs(t.wide - t.narrow) <= 1e-6 * std::max(1.0, std::abs(t.narrow))))
                fail(std::string(t.name) + " diverges (C_delta,int infinite)");
        }
    }

    for (int q : {1, 2}) {
        double prev = std::numeric_limits<double>::infinity();
        bool ok = true;
        double last = 0.0;
        for (double eps : {0.1, 0.05, 0.025}) {
            const double v = std::pow(eps, -q) * profile.delta(decay_eta / eps);
            rep.decay.push_back({q, eps, v});
            if (!(v < prev || v == 0.0)) ok = false;
            prev = v;
            last = v;
        }
        if (!ok || last > 1e-6) fail("eps^-" + std::to_string(q) + " delta(eta/eps) does not decay");
    }
    return rep;
}

}  // namespace dd
