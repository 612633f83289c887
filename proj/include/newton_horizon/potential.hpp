#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "mass_distribution.hpp"
#include "vec3.hpp"

namespace newton_horizon {

struct QuadratureOptions {
    double rel_tol = 1e-8;
    int max_subdivisions = 12;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Vec3& v) { return norm(v); }

template <class T>
constexpr T zero_value() {
    if constexpr (std::is_same_v<T, double>) return 0.0;
    else return T{};
}

/// 2-point Gauss product rule over the box [lo, hi], 8 nodes.
template <class T, class F>
T gauss8(const Vec3& lo, const Vec3& hi, F&& f) {
    constexpr double g = 0.57735026918962576451;  // 1/sqrt(3)
    Vec3 c = (lo + hi) * 0.5;
    Vec3 h = (hi - lo) * 0.5;
    double w = h.x * h.y * h.z;  // box volume / 8
    T sum = zero_value<T>();
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1})
                sum += f(Vec3{c.x + sx * g * h.x, c.y + sy * g * h.y, c.z + sz * g * h.z});
    return sum * w;
}

template <class T>
struct QuadNode {
    Vec3 lo;
    Vec3 hi;
    double rho = 0.0;
    T fine = zero_value<T>();  // sum of the 8 children's rules, rho folded in
    std::array<T, 8> child_coarse{};
    double err = 0.0;  // |fine - own single rule|
    int depth = 0;
    std::uint64_t seq = 0;
};

template <class T>
struct NodeWorse {
    bool operator()(const QuadNode<T>& a, const QuadNode<T>& b) const {
        if (a.err != b.err) return a.err < b.err;
        return a.seq > b.seq;  // deterministic tie-break, older node first
    }
};

template <class T, class F>
QuadNode<T> make_node(const Vec3& lo, const Vec3& hi, double rho, int depth, std::uint64_t seq,
                      F&& f, const T* known_coarse = nullptr) {
    QuadNode<T> n{lo, hi, rho, zero_value<T>(), {}, 0.0, depth, seq};
    T coarse = known_coarse ? *known_coarse : gauss8<T>(lo, hi, f) * rho;
    Vec3 mid = (lo + hi) * 0.5;
    int c = 0;
    for (int sx : {0, 1})
        for (int sy : {0, 1})
            for (int sz : {0, 1}) {
                Vec3 clo{sx ? mid.x : lo.x, sy ? mid.y : lo.y, sz ? mid.z : lo.z};
                Vec3 chi{sx ? hi.x : mid.x, sy ? hi.y : mid.y, sz ? hi.z : mid.z};
                n.child_coarse[c] = gauss8<T>(clo, chi, f) * rho;
                n.fine += n.child_coarse[c];
                ++c;
            }
    n.err = magnitude(n.fine - coarse);
    return n;
}

/// Adaptive integration of f (times per-box density) over a set of boxes.
/// Keeps a max-heap of leaf cells by estimated error (single rule vs children
/// sum) and splits the worst cell until the total estimate drops below
/// rel_tol times the gross (unsigned) contribution. Cells nearest the
/// evaluation point carry the largest estimates, so effort lands there.
template <class T, class F>
T adaptive_box_quadrature(const std::vector<DensityBox>& boxes, const QuadratureOptions& opt,
                          F&& f) {
    std::priority_queue<QuadNode<T>, std::vector<QuadNode<T>>, NodeWorse<T>> heap;
    T total = zero_value<T>();
    double gross = 0.0;
    double err_total = 0.0;
    std::uint64_t seq = 0;

    for (const auto& b : boxes) {
        QuadNode<T> n = make_node<T>(b.lo, b.hi, b.density, 0, seq++, f);
        total += n.fine;
        gross += magnitude(n.fine);
        err_total += n.err;
        heap.push(std::move(n));
    }

    while (err_total > opt.rel_tol * gross) {
        QuadNode<T> worst = heap.top();
        heap.pop();
        if (worst.depth >= opt.max_subdivisions)
            throw ToleranceNotMet(
                "quadrature: subdivision cap " + std::to_string(opt.max_subdivisions) +
                " reached with error estimate " + std::to_string(worst.err) + " in a cell");
        total -= worst.fine;
        gross -= magnitude(worst.fine);
        err_total -= worst.err;
        Vec3 mid = (worst.lo + worst.hi) * 0.5;
        int c = 0;
        for (int sx : {0, 1})
            for (int sy : {0, 1})
                for (int sz : {0, 1}) {
                    Vec3 clo{sx ? mid.x : worst.lo.x, sy ? mid.y : worst.lo.y,
                             sz ? mid.z : worst.lo.z};
                    Vec3 chi{sx ? worst.hi.x : mid.x, sy ? worst.hi.y : mid.y,
                             sz ? worst.hi.z : mid.z};
                    QuadNode<T> child = make_node<T>(clo, chi, worst.rho, worst.depth + 1, seq++,
                                                     f, &worst.child_coarse[c]);
                    total += child.fine;
                    gross += magnitude(child.fine);
                    err_total += child.err;
                    heap.push(std::move(child));
                    ++c;
                }
    }
    return total;
}

/// ln(s + r) for r = |(s, a, b)|, rewritten through r^2 - s^2 = a^2 + b^2 when
/// s < 0 so the sum never cancels. Callers multiply by a coefficient that is
/// zero whenever a^2 + b^2 is, so the q == 0 fallback value is never observed.
inline double ln_plus_r(double s, double a, double b, double r) {
    if (s >= 0.0) return std::log(s + r);
    double q = a * a + b * b;
    if (q == 0.0) return 0.0;
    return std::log(q) - std::log(r - s);
}

/// Exact integral of 1 / |x - u| over the box [lo, hi], per unit density:
/// the classic rectangular-prism closed form with corner-sign alternation.
/// Valid at any u strictly outside the box; stable arbitrarily close to it.
inline double box_potential_exact(const Vec3& lo, const Vec3& hi, const Vec3& u) {
    const double X[2] = {lo.x - u.x, hi.x - u.x};
    const double Y[2] = {lo.y - u.y, hi.y - u.y};
    const double Z[2] = {lo.z - u.z, hi.z - u.z};
    double sum = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double x = X[i], y = Y[j], z = Z[k];
                double r = std::sqrt(x * x + y * y + z * z);
                double sgn = ((i + j + k) & 1) ? 1.0 : -1.0;
                double w = 0.0;
                if (x != 0.0 && y != 0.0) w += x * y * ln_plus_r(z, x, y, r);
                if (y != 0.0 && z != 0.0) w += y * z * ln_plus_r(x, y, z, r);
                if (z != 0.0 && x != 0.0) w += z * x * ln_plus_r(y, z, x, r);
                if (x != 0.0) w -= 0.5 * x * x * std::atan(y * z / (x * r));
                if (y != 0.0) w -= 0.5 * y * y * std::atan(z * x / (y * r));
                if (z != 0.0) w -= 0.5 * z * z * std::atan(x * y / (z * r));
                sum += sgn * w;
            }
    return sum;
}

/// Exact integral of (x - u) / |x - u|^3 over the box, per unit density;
/// the gradient of box_potential_exact in u.
inline Vec3 box_field_exact(const Vec3& lo, const Vec3& hi, const Vec3& u) {
    const double X[2] = {lo.x - u.x, hi.x - u.x};
    const double Y[2] = {lo.y - u.y, hi.y - u.y};
    const double Z[2] = {lo.z - u.z, hi.z - u.z};
    Vec3 sum{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double x = X[i], y = Y[j], z = Z[k];
                double r = std::sqrt(x * x + y * y + z * z);
                double sgn = ((i + j + k) & 1) ? -1.0 : 1.0;
                Vec3 f{};
                if (y != 0.0) f.x += y * ln_plus_r(z, x, y, r);
                if (z != 0.0) f.x += z * ln_plus_r(y, z, x, r);
                if (x != 0.0) f.x -= x * std::atan(y * z / (x * r));
                if (z != 0.0) f.y += z * ln_plus_r(x, y, z, r);
                if (x != 0.0) f.y += x * ln_plus_r(z, x, y, r);
                if (y != 0.0) f.y -= y * std::atan(z * x / (y * r));
                if (x != 0.0) f.z += x * ln_plus_r(y, z, x, r);
                if (y != 0.0) f.z += y * ln_plus_r(x, y, z, r);
                if (z != 0.0) f.z -= z * std::atan(x * y / (z * r));
                sum += f * sgn;
            }
    return sum;
}

/// Reach of the closed forms, in cell sizes. Their corner sums cancel to a
/// value ~(h/d)^3 of the individual terms, so rounding grows cubically with
/// distance: relative error ~6e-15 (d/h)^3. Solving for a tenth of rel_tol
/// gives the radius inside which the closed form beats the quadrature; past
/// the cap the cells are point-like and the quadrature converges instantly.
inline double exact_cell_reach(const QuadratureOptions& opt) {
    return std::clamp(std::cbrt(opt.rel_tol / 6e-14), 2.0, 256.0);
}

inline void require_exterior(const MassDistribution& d, const Vec3& u, const char* who) {
    if (!is_finite(u))
        throw std::invalid_argument(std::string(who) + ": evaluation point must be finite");
    if (!(signed_dist_to_closure(d, u) > 0.0))
        throw InsideBody(std::string(who) + ": point is inside or on the body support");
}

inline void check_quadrature(const QuadratureOptions& opt, const char* who) {
    if (!(opt.rel_tol > 0.0 && opt.rel_tol < 1.0))
        throw std::invalid_argument(std::string(who) + ": quadrature rel_tol must be in (0, 1)");
    if (opt.max_subdivisions < 1)
        throw std::invalid_argument(std::string(who) +
                                    ": quadrature needs at least one subdivision level");
}

/// Mass of a radial profile within radius s of its center.
inline double profile_mass_within(const RadialProfile& p, double s) {
    double m = 0.0;
    double prev = 0.0;
    for (const auto& shell : p.shells) {
        double a = std::min(s, prev);
        double b = std::min(s, shell.outer_radius);
        if (b > a) m += shell.density * (ball_volume(b) - ball_volume(a));
        prev = shell.outer_radius;
    }
    return m;
}

/// Potential of a radial profile divided by G, valid at any point outside the
/// support (including gap interiors and the central hole): interior-mass term
/// plus the constant contribution of the shells beyond s.
inline double profile_potential_over_G(const RadialProfile& p, double s) {
    double inner = s > 0.0 ? profile_mass_within(p, s) / s : 0.0;
    double outer = 0.0;
    double prev = 0.0;
    for (const auto& shell : p.shells) {
        double a = std::max(s, prev);
        double b = shell.outer_radius;
        if (b > a) outer += 2.0 * std::numbers::pi * shell.density * (b * b - a * a);
        prev = shell.outer_radius;
    }
    return inner + outer;
}

}  // namespace detail

/// Specific potential U(u) = G * integral of density(x) / ||u - x||, positive.
/// Closed forms for the spherically symmetric shapes and ball unions. Voxel
/// grids mix exact prism integrals for cells near u with adaptive quadrature
/// (within opt.rel_tol) for the rest.
inline double potential(const MassDistribution& d, const Vec3& u,
                        const PhysicalConstants& consts = {},
                        const QuadratureOptions& opt = {}) {
    detail::require_exterior(d, u, "potential");
    detail::check_quadrature(opt, "potential");
    const double G = consts.G;
    struct Visitor {
        const MassDistribution& d;
        const Vec3& u;
        double G;
        const QuadratureOptions& opt;
        double operator()(const PointMass& p) const { return G * p.mass / distance(u, p.position); }
        double operator()(const UniformBall& b) const { return G * b.mass / distance(u, b.center); }
        double operator()(const RadialProfile& p) const {
            return G * detail::profile_potential_over_G(p, distance(u, p.center));
        }
        double operator()(const BallUnion& un) const {
            double sum = 0.0;
            for (const auto& b : un.balls) sum += b.mass / distance(u, b.center);
            return G * sum;
        }
        double operator()(const VoxelGrid& g) const {
            // Cells within reach of u get the closed form (the quadrature
            // cannot resolve the near-singular integrand at any finite
            // budget, and the closed form is cheaper wherever it is sound);
            // cells past it keep the adaptive rule, which converges quickly.
            const double near = detail::exact_cell_reach(opt) * g.cell_size;
            double exact = 0.0;
            std::vector<detail::DensityBox> far;
            far.reserve(d.occupied_cells().size());
            for (const auto& b : d.occupied_cells()) {
                if (detail::signed_dist_box(u, b.lo, b.hi) < near)
                    exact += b.density * detail::box_potential_exact(b.lo, b.hi, u);
                else
                    far.push_back(b);
            }
            double raw = far.empty() ? 0.0
                                     : detail::adaptive_box_quadrature<double>(
                                           far, opt,
                                           [this](const Vec3& x) { return 1.0 / distance(u, x); });
            return G * (exact + raw);
        }
    };
    return std::visit(Visitor{d, u, G, opt}, d.shape());
}

/// Gravitational acceleration a(u) = -G * integral density(x) (u - x) / ||u - x||^3,
/// the gradient of the potential, pointing toward the masses.
inline Vec3 field(const MassDistribution& d, const Vec3& u,
                  const PhysicalConstants& consts = {},
                  const QuadratureOptions& opt = {}) {
    detail::require_exterior(d, u, "field");
    detail::check_quadrature(opt, "field");
    const double G = consts.G;
    struct Visitor {
        const MassDistribution& d;
        const Vec3& u;
        double G;
        const QuadratureOptions& opt;
        Vec3 point_form(const Vec3& center, double mass) const {
            Vec3 r = u - center;
            double s = norm(r);
            return r * (-G * mass / (s * s * s));
        }
        Vec3 operator()(const PointMass& p) const { return point_form(p.position, p.mass); }
        Vec3 operator()(const UniformBall& b) const { return point_form(b.center, b.mass); }
        Vec3 operator()(const RadialProfile& p) const {
            double s = distance(u, p.center);
            return point_form(p.center, detail::profile_mass_within(p, s));
        }
        Vec3 operator()(const BallUnion& un) const {
            Vec3 sum{};
            for (const auto& b : un.balls) sum += point_form(b.center, b.mass);
            return sum;
        }
        Vec3 operator()(const VoxelGrid& g) const {
            const double near = detail::exact_cell_reach(opt) * g.cell_size;
            Vec3 exact{};
            std::vector<detail::DensityBox> far;
            far.reserve(d.occupied_cells().size());
            for (const auto& b : d.occupied_cells()) {
                if (detail::signed_dist_box(u, b.lo, b.hi) < near)
                    exact += detail::box_field_exact(b.lo, b.hi, u) * b.density;
                else
                    far.push_back(b);
            }
            Vec3 raw = far.empty() ? Vec3{}
                                   : detail::adaptive_box_quadrature<Vec3>(
                                         far, opt, [this](const Vec3& x) {
                                             Vec3 r = x - u;
                                             double s = norm(r);
                                             return r / (s * s * s);
                                         });
            return (exact + raw) * G;
        }
    };
    return std::visit(Visitor{d, u, G, opt}, d.shape());
}

/// Geometric bracket on the potential: GM / max_dist <= U(u) <= GM / min_dist.
/// First element is the lower bound.
inline std::pair<double, double> potential_bounds(const MassDistribution& d, const Vec3& u,
                                                  const PhysicalConstants& consts = {}) {
    detail::require_exterior(d, u, "potential_bounds");
    double gm = consts.G * d.total_mass();
    return {gm / max_dist_over_closure(d, u), gm / dist_to_closure(d, u)};
}

}  // namespace newton_horizon
