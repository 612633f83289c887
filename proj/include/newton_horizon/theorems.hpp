#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "constants.hpp"
#include "errors.hpp"
#include "mass_distribution.hpp"
#include "potential.hpp"

namespace newton_horizon {

enum class BoundFrame {
    SphericalFromCenter,  // bound on ||u(t) - center||
    GeneralFromClosure,   // bound on dist_to_closure(u(t))
};

/// Confinement guarantee for a sub-escape launch: the framed distance never
/// exceeds radius_bound = GM / eta, where eta is the (positive) energy defect.
struct ConfinementBound {
    double eta = 0.0;           // J/kg
    double radius_bound = 0.0;  // m
    BoundFrame frame = BoundFrame::SphericalFromCenter;
};

enum class Criterion {
    MaxPairDistance,
    Diameter,
    DensityBall,
    DensitySymmetric,
    DensityAsymmetric,
};

inline const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::MaxPairDistance: return "max-pair-distance";
        case Criterion::Diameter: return "diameter";
        case Criterion::DensityBall: return "density-ball";
        case Criterion::DensitySymmetric: return "density-symmetric";
        case Criterion::DensityAsymmetric: return "density-asymmetric";
    }
    return "?";
}

inline std::optional<Criterion> criterion_from_name(const std::string& name) {
    for (Criterion c : {Criterion::MaxPairDistance, Criterion::Diameter, Criterion::DensityBall,
                        Criterion::DensitySymmetric, Criterion::DensityAsymmetric})
        if (name == criterion_name(c)) return c;
    return std::nullopt;
}

/// Outcome of one black-hole criterion. margin is attained / required, so the
/// verdict is true exactly when margin > 1 (strict; equality reports false
/// with margin 1). The photon confinement radius is the bound on
/// dist(u(t), support) for a photon entering B, available for the two
/// distance criteria when the verdict is positive.
struct BlackHoleVerdict {
    Criterion criterion = Criterion::Diameter;
    bool is_black_hole = false;
    double margin = 0.0;
    std::optional<double> photon_confinement_radius;
};

inline double escape_speed_spherical(double M, double R, const PhysicalConstants& consts = {}) {
    if (!(M > 0.0) || !(R > 0.0))
        throw BadParameters("escape_speed_spherical: M and R must be positive");
    return std::sqrt(2.0 * consts.G * M / R);
}

/// Confinement radius for a launch at distance R from the center of a
/// spherically symmetric body of mass M: ||u(t)|| <= GM / eta.
inline ConfinementBound confinement_radius_spherical(double M, double R, double v0_speed,
                                                     const PhysicalConstants& consts = {}) {
    if (!(M > 0.0) || !(R > 0.0))
        throw BadParameters("confinement_radius_spherical: M and R must be positive");
    if (!(v0_speed >= 0.0))
        throw BadParameters("confinement_radius_spherical: speed must be >= 0");
    double gm = consts.G * M;
    double eta = gm / R - 0.5 * v0_speed * v0_speed;
    if (!(eta > 0.0))
        throw AtOrAboveEscape("confinement_radius_spherical: launch speed is at or above sqrt(2GM/R)");
    return {eta, gm / eta, BoundFrame::SphericalFromCenter};
}

/// Confinement for an arbitrary body: dist(u(t), support) <= GM / eta with
/// eta = U(u0) - ||v0||^2 / 2. Throws AtOrAboveEscape when eta <= 0 and
/// InsideBody when u0 is not exterior.
inline ConfinementBound confinement_distance_general(const MassDistribution& d, const Vec3& u0,
                                                     const Vec3& v0,
                                                     const PhysicalConstants& consts = {},
                                                     const QuadratureOptions& opt = {}) {
    double eta = potential(d, u0, consts, opt) - 0.5 * norm_squared(v0);
    if (!(eta > 0.0))
        throw AtOrAboveEscape("confinement_distance_general: ||v0||^2 >= 2 U(u0)");
    return {eta, consts.G * d.total_mass() / eta, BoundFrame::GeneralFromClosure};
}

/// Lower bound on the escape speed at u0: sqrt(2GM / max_dist_over_closure).
/// Equals the exact escape speed for a point mass.
inline double escape_speed_lower_bound(const MassDistribution& d, const Vec3& u0,
                                       const PhysicalConstants& consts = {}) {
    return std::sqrt(2.0 * consts.G * d.total_mass() / max_dist_over_closure(d, u0));
}

enum class RadialBranch {
    GrowUp,    // outward at exactly escape speed, unbounded
    Collapse,  // inward at exactly escape speed, reaches the center in finite time
};

/// Zero-energy radial solution y(t) = (R^{3/2} +- (3/2) sqrt(gamma) t)^{2/3}
/// with gamma = 2GM. Throws DomainExceeded past the collapse time.
inline double parabolic_radial(double R, double gamma, RadialBranch branch, double t) {
    if (!(R > 0.0) || !(gamma > 0.0))
        throw BadParameters("parabolic_radial: R and gamma must be positive");
    double sign = branch == RadialBranch::GrowUp ? 1.0 : -1.0;
    double base = std::pow(R, 1.5) + sign * 1.5 * std::sqrt(gamma) * t;
    if (base < 0.0)
        throw DomainExceeded("parabolic_radial: time is past the collapse to the center");
    return std::cbrt(base * base);
}

/// Time for the collapsing zero-energy radial solution to fall from R to r:
/// (2/3) (R^{3/2} - r^{3/2}) / sqrt(gamma).
inline double parabolic_collapse_time(double R, double gamma, double r = 0.0) {
    if (!(R > 0.0) || !(gamma > 0.0))
        throw BadParameters("parabolic_collapse_time: R and gamma must be positive");
    if (!(r >= 0.0) || !(r <= R))
        throw BadParameters("parabolic_collapse_time: need 0 <= r <= R");
    return (2.0 / 3.0) * (std::pow(R, 1.5) - std::pow(r, 1.5)) / std::sqrt(gamma);
}

/// Apex of the bounded radial solution with energy defect eta: gamma / (2 eta).
/// This attains the spherical confinement bound exactly. Requires a launch
/// that is sub-escape (eta > 0) and radially consistent (gamma/R >= 2 eta,
/// i.e. the radial speed at R is real; equality is the launch at rest).
inline double radial_apex(double R, double gamma, double eta) {
    if (!(R > 0.0) || !(gamma > 0.0) || !(eta > 0.0))
        throw BadParameters("radial_apex: R, gamma and eta must be positive");
    if (gamma / R - 2.0 * eta < 0.0)
        throw BadParameters("radial_apex: eta exceeds gamma/(2R), not a radial sub-escape launch");
    return gamma / (2.0 * eta);
}

namespace detail {

inline bool same_ball(const Ball& a, const Ball& b) {
    double tol = 1e-12 * std::max(a.radius, b.radius);
    return distance(a.center, b.center) <= tol && std::abs(a.radius - b.radius) <= tol;
}

}  // namespace detail

/// Applies one black-hole criterion to the body inside the candidate ball B.
/// All thresholds are strict; margin is the attained-over-required ratio.
/// B must contain the support (NotContaining otherwise). The density-by-radius
/// criteria additionally require the support to be exactly the ball B
/// (WrongShape otherwise): for a body that underfills B they would be unsound.
inline BlackHoleVerdict classify_black_hole(const MassDistribution& d, const Ball& B,
                                            Criterion crit, const PhysicalConstants& consts = {}) {
    if (!is_finite(B.center) || !std::isfinite(B.radius) || !(B.radius > 0.0))
        throw std::invalid_argument("classify_black_hole: B must be a finite ball of positive radius");
    if (!closure_within(d, B))
        throw NotContaining("classify_black_hole: B does not contain the body support");

    const double gm2 = 2.0 * consts.G * d.total_mass();
    const double c2 = consts.c * consts.c;

    auto distance_verdict = [&](double x) {
        BlackHoleVerdict v;
        v.criterion = crit;
        v.margin = gm2 / (c2 * x);
        v.is_black_hole = v.margin > 1.0;
        if (v.is_black_hole) v.photon_confinement_radius = x / (1.0 - c2 * x / gm2);
        return v;
    };

    switch (crit) {
        case Criterion::MaxPairDistance:
            // Worst separation between a point of B and a point of the support.
            return distance_verdict(max_dist_over_closure(d, B.center) + B.radius);
        case Criterion::Diameter:
            return distance_verdict(2.0 * B.radius);
        case Criterion::DensityBall: {
            double required = c2 * B.radius / (consts.G * d.support_volume());
            BlackHoleVerdict v;
            v.criterion = crit;
            v.margin = average_density(d) / required;
            v.is_black_hole = v.margin > 1.0;
            return v;
        }
        case Criterion::DensitySymmetric:
        case Criterion::DensityAsymmetric: {
            auto sb = support_ball(d);
            if (!sb)
                throw WrongShape("classify_black_hole: criterion needs a body whose support is a ball");
            if (!detail::same_ball(*sb, B))
                throw WrongShape("classify_black_hole: criterion needs B equal to the support ball");
            double r = sb->radius;
            double base = 3.0 * c2 / (8.0 * std::numbers::pi * consts.G * r * r);
            double required = crit == Criterion::DensitySymmetric ? base : 2.0 * base;
            BlackHoleVerdict v;
            v.criterion = crit;
            v.margin = average_density(d) / required;
            v.is_black_hole = v.margin > 1.0;
            return v;
        }
    }
    throw BadParameters("classify_black_hole: unknown criterion");
}

/// Black-hole threshold for a homogeneous ball of cosmological size:
/// K = (3/4pi) c^2 / G, threshold density K / r^2, and whether the given
/// density exceeds it.
struct CosmologyReport {
    double K = 0.0;          // kg/m
    double threshold = 0.0;  // kg/m^3
    double ratio = 0.0;
    bool verdict = false;
};

inline CosmologyReport cosmology_report(double r_universe, double density,
                                        const PhysicalConstants& consts = {}) {
    if (!(r_universe > 0.0))
        throw BadParameters("cosmology_report: radius must be positive");
    if (!(density >= 0.0))
        throw BadParameters("cosmology_report: density must be >= 0");
    double K = 3.0 * consts.c * consts.c / (4.0 * std::numbers::pi * consts.G);
    double threshold = K / (r_universe * r_universe);
    double ratio = density / threshold;
    return {K, threshold, ratio, ratio > 1.0};
}

}  // namespace newton_horizon
