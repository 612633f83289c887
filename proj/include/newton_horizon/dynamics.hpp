#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "mass_distribution.hpp"
#include "potential.hpp"
#include "vec3.hpp"

namespace newton_horizon {

struct State {
    double t = 0.0;
    Vec3 u;
    Vec3 v;
};

struct IntegrationOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double t_end = 0.0;                  // absolute end time, must exceed the initial time
    double escape_radius_factor = 1e3;   // times the bounding radius
    std::int64_t max_steps = 1'000'000;  // accepted steps
    double sample_dt = 0.0;              // 0: sample at accepted steps; >0: uniform grid
    QuadratureOptions quadrature{};      // used by the field evaluations
};

struct ReachedTEnd {};
struct CollapsedIntoBody {
    double t_hit = 0.0;
};
struct EscapedFarField {
    double t_exit = 0.0;
};
struct StepLimit {};

using Termination = std::variant<ReachedTEnd, CollapsedIntoBody, EscapedFarField, StepLimit>;

struct Trajectory {
    std::vector<State> samples;  // times strictly increasing, first == initial state
    Termination termination;
};

/// Specific energy E = ||v||^2 / 2 - U(u). Conserved along exterior trajectories.
inline double energy(const MassDistribution& d, const State& s,
                     const PhysicalConstants& consts = {}, const QuadratureOptions& opt = {}) {
    return 0.5 * norm_squared(s.v) - potential(d, s.u, consts, opt);
}

namespace detail {

struct Phase {
    std::array<double, 6> y{};

    Vec3 u() const { return {y[0], y[1], y[2]}; }
    Vec3 v() const { return {y[3], y[4], y[5]}; }

    Phase& operator+=(const Phase& o) {
        for (int i = 0; i < 6; ++i) y[i] += o.y[i];
        return *this;
    }
};

inline Phase make_phase(const Vec3& u, const Vec3& v) {
    return {{u.x, u.y, u.z, v.x, v.y, v.z}};
}

inline Phase operator+(Phase a, const Phase& b) { return a += b; }

inline Phase operator*(const Phase& a, double s) {
    Phase r = a;
    for (double& c : r.y) c *= s;
    return r;
}

// Dormand-Prince 5(4) tableau.
inline constexpr double A21 = 1.0 / 5;
inline constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
inline constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
inline constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                        A54 = -212.0 / 729;
inline constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                        A64 = 49.0 / 176, A65 = -5103.0 / 18656;
inline constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                        B5 = -2187.0 / 6784, B6 = 11.0 / 84;
inline constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                        E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
inline constexpr double D1 = -12715105075.0 / 11282082432, D3 = 87487479700.0 / 32700410799,
                        D4 = -10690763975.0 / 1880347072, D5 = 701980252875.0 / 199316789632,
                        D6 = -1453857185.0 / 822651844, D7 = 69997945.0 / 29380423;

/// 4th-order interpolant over one accepted step [t0, t0 + h].
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<Phase, 5> r{};

    Phase eval(double theta) const {
        Phase inner = r[3] + r[4] * (1.0 - theta);
        Phase mid = r[2] + inner * theta;
        Phase outer = r[1] + mid * (1.0 - theta);
        return r[0] + outer * theta;
    }

    State state_at(double t) const {
        double theta = (t - t0) / h;
        Phase p = eval(theta);
        return {t, p.u(), p.v()};
    }
};

struct StepResult {
    Phase y1;
    Phase k7;  // = f(y1), reused as the next step's first stage
    double err = 0.0;
    DenseStep dense;
};

template <class Rhs>
StepResult dopri5_step(Rhs&& f, const Phase& y0, const Phase& k1, double t0, double h,
                       double abs_tol, double rel_tol) {
    Phase k2 = f(y0 + k1 * (h * A21));
    Phase k3 = f(y0 + k1 * (h * A31) + k2 * (h * A32));
    Phase k4 = f(y0 + k1 * (h * A41) + k2 * (h * A42) + k3 * (h * A43));
    Phase k5 = f(y0 + k1 * (h * A51) + k2 * (h * A52) + k3 * (h * A53) + k4 * (h * A54));
    Phase k6 = f(y0 + k1 * (h * A61) + k2 * (h * A62) + k3 * (h * A63) + k4 * (h * A64) +
                 k5 * (h * A65));
    Phase y1 = y0 + k1 * (h * B1) + k3 * (h * B3) + k4 * (h * B4) + k5 * (h * B5) + k6 * (h * B6);
    Phase k7 = f(y1);

    double err = 0.0;
    for (int i = 0; i < 6; ++i) {
        double e = h * (E1 * k1.y[i] + E3 * k3.y[i] + E4 * k4.y[i] + E5 * k5.y[i] +
                        E6 * k6.y[i] + E7 * k7.y[i]);
        double sc = abs_tol + rel_tol * std::max(std::abs(y0.y[i]), std::abs(y1.y[i]));
        err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / 6.0);

    DenseStep dense;
    dense.t0 = t0;
    dense.h = h;
    Phase ydiff = y1 + y0 * -1.0;
    dense.r[0] = y0;
    dense.r[1] = ydiff;
    dense.r[2] = k1 * h + ydiff * -1.0;
    dense.r[3] = ydiff + k7 * -h + dense.r[2] * -1.0;
    dense.r[4] = (k1 * D1 + k3 * D3 + k4 * D4 + k5 * D5 + k6 * D6 + k7 * D7) * h;
    return {y1, k7, err, dense};
}

template <class Rhs>
double initial_step_size(Rhs&& f, const Phase& y0, const Phase& k1, double duration,
                         double abs_tol, double rel_tol) {
    double d0 = 0.0, d1 = 0.0;
    std::array<double, 6> sc{};
    for (int i = 0; i < 6; ++i) {
        sc[i] = abs_tol + rel_tol * std::abs(y0.y[i]);
        d0 += (y0.y[i] / sc[i]) * (y0.y[i] / sc[i]);
        d1 += (k1.y[i] / sc[i]) * (k1.y[i] / sc[i]);
    }
    d0 = std::sqrt(d0 / 6.0);
    d1 = std::sqrt(d1 / 6.0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * duration : 0.01 * d0 / d1;
    h0 = std::min(h0, duration);

    Phase k2;
    try {
        k2 = f(y0 + k1 * h0);
    } catch (const Error&) {  // probe entered the body or its unresolvable band
        return std::max(h0 * 0.01, 1e-12 * duration);
    }
    double d2 = 0.0;
    for (int i = 0; i < 6; ++i) {
        double diff = (k2.y[i] - k1.y[i]) / sc[i];
        d2 += diff * diff;
    }
    d2 = std::sqrt(d2 / 6.0) / h0;

    double m = std::max(d1, d2);
    double h1 = m <= 1e-15 ? std::max(1e-6 * duration, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    return std::min({100.0 * h0, h1, duration});
}

/// First time in (0, window] at which the ballistic model
/// u + v t + a t^2 / 2 touches the support, bracketed to time_tol.
/// Returns {exterior-side time, interior-side time}.
inline std::optional<std::pair<double, double>> first_boundary_touch(
    const MassDistribution& d, const Vec3& u, const Vec3& v, const Vec3& a, double window,
    double time_tol) {
    auto g = [&](double tau) {
        return signed_dist_to_closure(d, u + v * tau + a * (0.5 * tau * tau));
    };
    const int n = 64;
    double lo = 0.0;
    double hi = 0.0;
    bool found = false;
    for (int i = 1; i <= n; ++i) {
        double tau = window * double(i) / n;
        if (g(tau) <= 0.0) {
            hi = tau;
            lo = window * double(i - 1) / n;
            found = true;
            break;
        }
    }
    if (!found) return std::nullopt;
    while (hi - lo > time_tol) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::make_pair(lo, hi);
}

/// Width of the band outside the support in which the field cannot be
/// evaluated (the quadrature budget is exhausted by the near-singularity).
/// Bisects along the ballistic path from an evaluable start to a failing end
/// and reports the distance remaining at the evaluability frontier.
template <class Evaluable>
double measure_unresolvable_shell(const MassDistribution& d, const Vec3& u, const Vec3& v,
                                  const Vec3& a, double tau_inside, Evaluable&& evaluable) {
    auto at = [&](double s) { return u + v * s + a * (0.5 * s * s); };
    double lo = 0.0, hi = tau_inside;
    for (int i = 0; i < 24; ++i) {
        double mid = 0.5 * (lo + hi);
        (evaluable(at(mid)) ? lo : hi) = mid;
    }
    return dist_to_closure(d, at(hi));
}

}  // namespace detail

/// Integrates u'' = field(u) from the initial state until t_end, collapse into
/// the body, far-field escape, or the step limit. The initial point must be
/// strictly exterior. Collapse is localized to within 1e-9 of the integration
/// span; the final collapse sample sits on the exterior side of the boundary.
/// Around bodies whose field quadrature gives up near the surface (voxel
/// grids close to a face), the final stretch is completed with the ballistic
/// model through the unresolvable band, which widens the collapse time
/// uncertainty to roughly that band's crossing time.
inline Trajectory integrate(const MassDistribution& d, const State& initial,
                            const IntegrationOptions& opt, const PhysicalConstants& consts = {}) {
    using detail::Phase;

    if (!is_finite(initial.u) || !is_finite(initial.v) || !std::isfinite(initial.t))
        throw std::invalid_argument("integrate: initial state must be finite");
    if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");
    if (!(opt.t_end > initial.t))
        throw std::invalid_argument("integrate: t_end must exceed the initial time");
    if (!(opt.escape_radius_factor >= 1.0))
        throw std::invalid_argument("integrate: escape_radius_factor must be >= 1");
    if (opt.max_steps < 1) throw std::invalid_argument("integrate: max_steps must be >= 1");
    if (!(opt.sample_dt >= 0.0))
        throw std::invalid_argument("integrate: sample_dt must be >= 0");
    if (!(signed_dist_to_closure(d, initial.u) > 0.0))
        throw InsideBody("integrate: initial point is inside or on the body support");

    const double duration = opt.t_end - initial.t;
    const double time_tol = 1e-9 * duration;
    const Ball bound = bounding_ball(d);
    const double escape_scale = std::max(bound.radius, distance(initial.u, bound.center));
    const double escape_radius = opt.escape_radius_factor * escape_scale;
    // Measured lazily on the first near-surface quadrature failure; within
    // this distance of the support contact is declared ballistically.
    double contact_shell = 0.0;

    auto rhs = [&](const Phase& y) {
        return detail::make_phase(y.v(), field(d, y.u(), consts, opt.quadrature));
    };

    Trajectory traj;
    traj.termination = StepLimit{};
    traj.samples.push_back(initial);

    Phase y = detail::make_phase(initial.u, initial.v);
    double t = initial.t;
    Phase k1 = rhs(y);
    double h = detail::initial_step_size(rhs, y, k1, duration, opt.abs_tol, opt.rel_tol);

    // Uniform sampling grid state (sample_dt > 0); n counts emitted grid points.
    std::int64_t grid_n = 1;
    auto next_grid_time = [&] { return initial.t + double(grid_n) * opt.sample_dt; };

    auto push_sample = [&](const State& s) {
        if (s.t > traj.samples.back().t) traj.samples.push_back(s);
    };

    auto emit_grid_until = [&](const detail::DenseStep& dense, double cutoff) {
        if (opt.sample_dt <= 0.0) return;
        double tg = next_grid_time();
        while (tg <= cutoff) {
            if (tg > dense.t0) push_sample(dense.state_at(tg));
            ++grid_n;
            double tn = next_grid_time();
            if (!(tn > tg)) break;  // grid spacing lost to rounding against t
            tg = tn;
        }
    };

    std::int64_t accepted = 0;
    std::int64_t attempts = 0;
    const std::int64_t attempt_cap = 4 * opt.max_steps + 64;
    bool reduced = false;  // last attempt was rejected; cap growth

    while (true) {
        if (t >= opt.t_end) {
            traj.termination = ReachedTEnd{};
            break;
        }
        if (accepted >= opt.max_steps || attempts >= attempt_cap) {
            traj.termination = StepLimit{};
            break;
        }
        bool last_step = false;
        if (t + h >= opt.t_end) {
            h = opt.t_end - t;
            last_step = true;
        }
        if (!(h > 1e-14 * duration)) {
            traj.termination = StepLimit{};
            break;
        }

        ++attempts;
        detail::StepResult step;
        try {
            step = detail::dopri5_step(rhs, y, k1, t, h, opt.abs_tol, opt.rel_tol);
        } catch (const Error& ex) {
            // A trial stage entered the body, or the field quadrature gave up
            // close to its surface. Fall back to the ballistic model
            // u + v tau + a tau^2 / 2 and locate its first boundary contact.
            bool penetrated = dynamic_cast<const InsideBody*>(&ex) != nullptr;
            bool budget = dynamic_cast<const ToleranceNotMet*>(&ex) != nullptr;
            if (!penetrated && !budget) throw;

            const Vec3 a = k1.v();
            double window = 1.5 * h;
            if (budget) {
                // The quadrature fails some distance before geometric contact,
                // so search a few crossing times of the remaining gap.
                double gap = signed_dist_to_closure(d, y.u());
                double speed = norm(y.v());
                double anorm = norm(a);
                double inf = std::numeric_limits<double>::infinity();
                double crossing = std::min(speed > 0.0 ? gap / speed : inf,
                                           anorm > 0.0 ? std::sqrt(2.0 * gap / anorm) : inf);
                if (std::isfinite(crossing)) window = std::max(window, 4.0 * crossing);
            }
            // Contact past t_end is not a collapse; the cap makes the search
            // come up empty instead.
            window = std::min(window, opt.t_end - t);
            auto touch = detail::first_boundary_touch(d, y.u(), y.v(), a, window, time_tol);
            if (!touch) {
                // No contact ahead. A penetrated stage just means the step was
                // too long; a quadrature failure with no approach in sight is a
                // genuine budget inadequacy and must stay loud.
                if (budget) throw;
                h *= 0.5;
                reduced = true;
                continue;
            }
            if (budget && contact_shell <= 0.0)
                contact_shell = 2.0 * detail::measure_unresolvable_shell(
                                          d, y.u(), y.v(), a, touch->second, [&](const Vec3& p) {
                                              try {
                                                  field(d, p, consts, opt.quadrature);
                                                  return true;
                                              } catch (const Error&) {
                                                  return false;
                                              }
                                          });
            bool at_contact =
                touch->first <= time_tol ||
                (contact_shell > 0.0 && signed_dist_to_closure(d, y.u()) <= contact_shell);
            if (at_contact) {
                double tau = touch->first;
                auto ballistic = [&](double s) -> State {
                    return {t + s, y.u() + y.v() * s + a * (0.5 * s * s), y.v() + a * s};
                };
                if (opt.sample_dt > 0.0) {
                    double tg = next_grid_time();
                    while (tg <= t + tau) {
                        if (tg > t) push_sample(ballistic(tg - t));
                        ++grid_n;
                        double tn = next_grid_time();
                        if (!(tn > tg)) break;
                        tg = tn;
                    }
                }
                push_sample(ballistic(tau));
                traj.termination = CollapsedIntoBody{t + tau};
                break;
            }
            // min with h/2 keeps the retry sequence shrinking even when the
            // state cannot advance (repeated failures at the same point).
            h = std::max(std::min(0.9 * touch->first, 0.5 * h), 1e-14 * duration);
            reduced = true;
            continue;
        }

        if (!(step.err <= 1.0)) {  // rejected (or non-finite error)
            double fac = std::isfinite(step.err)
                             ? std::clamp(0.9 * std::pow(step.err, -0.2), 0.2, 0.9)
                             : 0.2;
            h *= fac;
            reduced = true;
            continue;
        }

        double t_new = last_step ? opt.t_end : t + h;

        // Collapse scan over the dense interpolant.
        double theta_prev = 0.0;
        double theta_hit = -1.0;
        for (int i = 1; i <= 8; ++i) {
            double theta = double(i) / 8.0;
            Vec3 us = step.dense.eval(theta).u();
            if (signed_dist_to_closure(d, us) <= 0.0) {
                theta_hit = theta;
                break;
            }
            theta_prev = theta;
        }
        if (theta_hit > 0.0) {
            double lo = theta_prev, hi = theta_hit;
            while ((hi - lo) * h > time_tol) {
                double mid = 0.5 * (lo + hi);
                (signed_dist_to_closure(d, step.dense.eval(mid).u()) > 0.0 ? lo : hi) = mid;
            }
            double t_hit = t + lo * h;
            emit_grid_until(step.dense, t_hit);
            Phase ph = step.dense.eval(lo);
            push_sample({t_hit, ph.u(), ph.v()});
            traj.termination = CollapsedIntoBody{t_hit};
            break;
        }

        emit_grid_until(step.dense, t_new);
        y = step.y1;
        k1 = step.k7;
        t = t_new;
        ++accepted;
        if (opt.sample_dt <= 0.0) push_sample({t, y.u(), y.v()});

        if (distance(y.u(), bound.center) > escape_radius) {
            double e = 0.5 * norm_squared(y.v()) - potential(d, y.u(), consts, opt.quadrature);
            if (e >= 0.0) {
                push_sample({t, y.u(), y.v()});
                traj.termination = EscapedFarField{t};
                break;
            }
        }

        double fac = step.err <= 0.0 ? 5.0 : 0.9 * std::pow(step.err, -0.2);
        h *= std::clamp(fac, 0.2, reduced ? 1.0 : 5.0);
        reduced = false;
    }

    // A trajectory that stalls or times out still reports its last reached state.
    if (traj.samples.back().t < t) push_sample({t, y.u(), y.v()});
    return traj;
}

/// Largest relative energy deviation over the trajectory samples:
/// max |E(t) - E(0)| / max(|E(0)|, ||v0||^2 / 2). Zero for a single sample.
/// The final sample of a collapsed trajectory sits on the boundary, where the
/// exterior energy expression is not evaluable; it is excluded.
inline double energy_drift(const MassDistribution& d, const Trajectory& traj,
                           const PhysicalConstants& consts = {},
                           const QuadratureOptions& opt = {}) {
    if (traj.samples.empty()) throw std::invalid_argument("energy_drift: empty trajectory");
    const State& first = traj.samples.front();
    double e0 = energy(d, first, consts, opt);
    double scale = std::max(std::abs(e0), 0.5 * norm_squared(first.v));
    if (scale <= 0.0) return 0.0;
    std::size_t count = traj.samples.size();
    if (count > 1 && std::holds_alternative<CollapsedIntoBody>(traj.termination)) --count;
    double worst = 0.0;
    for (std::size_t i = 1; i < count; ++i) {
        double e = energy(d, traj.samples[i], consts, opt);
        worst = std::max(worst, std::abs(e - e0));
    }
    return worst / scale;
}

/// True iff the speed is strictly decreasing at the initial instant,
/// i.e. v . a < 0. A state at rest reports false.
inline bool initial_speed_decreasing(const MassDistribution& d, const State& s,
                                     const PhysicalConstants& consts = {},
                                     const QuadratureOptions& opt = {}) {
    return dot(s.v, field(d, s.u, consts, opt)) < 0.0;
}

}  // namespace newton_horizon
