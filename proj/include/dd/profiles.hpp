#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dd/geometry.hpp"

namespace dd {

enum class ProfileKind { DoubleWell, DoubleObstacle, Custom };

/// Smoothed indicator xi(s) (1 inside, 0 outside) and its companion surface density delta(s).
double xi_base(ProfileKind kind, double s);
/// Normalised density; integrates to one for both shipped kinds.
double delta_base(ProfileKind kind, double s);

/**
 * A regularisation profile pair.
 *
 * Custom profiles start unverified; `certify` runs the full assumption battery
 * and only a passing profile may be handed to the assembler.
 */
class Profile {
  public:
    static Profile double_well();
    static Profile double_obstacle();
    /// `delta` is used as given (normalisation 1); `support` is the half-width of supp delta.
    static Profile custom(std::string name, std::function<double(double)> xi, std::function<double(double)> delta,
                          double support = std::numeric_limits<double>::infinity());

    ProfileKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double xi(double s) const;
    double delta(double s) const;
    /// Half-width of supp delta; infinity for the double well.
    double delta_support() const { return support_; }
    bool compact() const { return std::isfinite(support_); }
    /// Factor applied to the printed delta formula to make it integrate to one.
    double normalization() const { return normalization_; }
    /// Integral of the printed (unnormalised) delta.
    double raw_integral() const { return raw_integral_; }
    bool verified() const { return verified_; }

    /// Runs verify_profile and marks the profile usable; throws if any check fails.
    void certify(double tol = 1e-8);

  private:
    ProfileKind kind_{ProfileKind::DoubleWell};
    std::string name_;
    std::function<double(double)> xi_;
    std::function<double(double)> delta_;
    double support_{std::numeric_limits<double>::infinity()};
    double normalization_{1.0};
    double raw_integral_{1.0};
    bool verified_{false};
};

/// Quadrature window for a profile: its support, capped at |s| = 40.
double profile_window(const Profile& profile);

/// xi_eps(x) = xi(d(x)/eps) and delta_eps(x) = delta(d(x)/eps)/eps.
class ScaledWeights {
  public:
    ScaledWeights(Profile profile, double epsilon, SignedGeometry geom);

    const Profile& profile() const { return profile_; }
    double epsilon() const { return eps_; }
    const SignedGeometry& geometry() const { return geom_; }

    double xi_eps(Vec2 x) const { return xi_from_distance(sdf(geom_, x)); }
    double delta_eps(Vec2 x) const { return delta_from_distance(sdf(geom_, x)); }
    double xi_from_distance(double d) const { return profile_.xi(d / eps_); }
    double delta_from_distance(double d) const { return profile_.delta(d / eps_) / eps_; }

  private:
    Profile profile_;
    double eps_;
    SignedGeometry geom_;
};

/// Largest C with C delta <= xi: exact for the double obstacle, otherwise the infimum over a
/// dense grid of supp delta shrunk by 1%. Throws if it is not positive.
double cxi_constant(const Profile& profile);

struct DecaySample {
    int q{1};
    double epsilon{0};
    double value{0};  ///< eps^-q delta(eta/eps)
};

struct ProfileReport {
    std::string name;
    double raw_integral{0};
    double integral{0};
    double evenness_max{0};
    int xi_monotonicity_violations{0};
    int delta_monotonicity_violations{0};
    double xi_at_zero{0};
    double xi_left{0};
    double xi_right{0};
    double c_xi{0};
    double c_delta_int{0};
    double fisher_term{0};     ///< integral of |delta'|^2 / delta
    double sqrt_term{0};       ///< integral of sqrt(delta)
    double moment_term{0};     ///< integral of delta (|s| + s^2)
    std::vector<DecaySample> decay;
    std::vector<std::string> failures;

    bool passed() const { return failures.empty(); }
};

/// Numerical check of every assumption placed on (xi, delta). Never throws on a failed check.
ProfileReport verify_profile(const Profile& profile, double tol = 1e-8, double decay_eta = 0.25);

}  // namespace dd
