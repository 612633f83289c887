// Acceptance gate: ten go/no-go checks over the whole library, one printed
// line each. Exit code is the number of failed checks. Every randomized
// sweep is seeded, so a run is reproducible bit for bit.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <string>
#include <variant>
#include <vector>

#include <newton_horizon/newton_horizon.hpp>

#include "oracles.hpp"

using namespace newton_horizon;

namespace {

const PhysicalConstants kUnit{1.0, 1.0};

// Energy drift of every trajectory integrated by the checks below; the
// conservation gate takes the maximum.
std::vector<double> g_drifts;

std::string str(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

Trajectory run_collect(const MassDistribution& d, const State& s0, const IntegrationOptions& opt,
                       const PhysicalConstants& consts) {
    Trajectory traj = integrate(d, s0, opt, consts);
    g_drifts.push_back(energy_drift(d, traj, consts, opt.quadrature));
    return traj;
}

struct Outcome {
    bool ok = false;
    std::string detail;
};

double orbital_span(double bound, double GM) {
    double a = 0.5 * bound;
    return 2.0 * 2.0 * std::numbers::pi * std::sqrt(a * a * a / GM);
}

// 1. The critical-density constant and the size-density tradeoff at
// cosmological scale, with SI constants.
Outcome check_cosmology() {
    CosmologyReport rep = cosmology_report(4e26, 1e-23);
    bool ok = std::abs(rep.K - 3.22e26) <= 0.01 * 3.22e26 &&
              std::abs(rep.threshold - 2e-27) <= 0.10 * 2e-27 && rep.ratio >= 4000.0 &&
              rep.ratio <= 6000.0 && rep.verdict;
    return {ok, str("K=%.6g kg/m, threshold=%.6g kg/m^3, ratio=%.1f, verdict=%s", rep.K,
                    rep.threshold, rep.ratio, rep.verdict ? "exceeds" : "below")};
}

// 2. Escape-threshold infall onto a uniform ball hits the surface at the
// closed-form collapse time.
Outcome check_collapse_time() {
    MassDistribution body(UniformBall{{0, 0, 0}, 0.25, 0.5});  // gamma = 2GM = 1
    IntegrationOptions opt;
    opt.t_end = 1.0;
    Trajectory traj = run_collect(body, {0.0, {1, 0, 0}, {-1, 0, 0}}, opt, kUnit);
    auto* hit = std::get_if<CollapsedIntoBody>(&traj.termination);
    if (!hit) return {false, "trajectory did not collapse"};
    double want = parabolic_collapse_time(1.0, 1.0, 0.25);
    double rel = std::abs(hit->t_hit - want) / want;
    return {rel <= 1e-6, str("t_hit=%.9f vs %.9f, rel err %.2e", hit->t_hit, want, rel)};
}

// 3. Spherical confinement: 200 seeded sub-escape launches never leave
// GM/eta, within integration slack.
Outcome check_spherical_confinement() {
    MassDistribution body(UniformBall{{0, 0, 0}, 0.5, 1.0});
    SplitMix64 rng(101);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        double r0 = rng.uniform(1.2, 3.0);
        Vec3 u0 = rng.unit_vector() * r0;
        double speed = rng.uniform(0.05, 0.95) * escape_speed_spherical(1.0, r0, kUnit);
        Vec3 v0 = rng.unit_vector() * speed;
        ConfinementBound cb = confinement_radius_spherical(1.0, r0, speed, kUnit);
        IntegrationOptions opt;
        opt.t_end = orbital_span(cb.radius_bound, 1.0);
        Trajectory traj = run_collect(body, {0.0, u0, v0}, opt, kUnit);
        if (std::holds_alternative<StepLimit>(traj.termination) ||
            std::holds_alternative<EscapedFarField>(traj.termination))
            return {false, str("launch %d left the bound frame", i)};
        for (const State& s : traj.samples)
            worst = std::max(worst, norm(s.u) / cb.radius_bound);
    }
    return {worst <= 1.0 + 1e-6, str("200 launches, max ||u||/bound = %.9f", worst)};
}

// 4. General confinement: seeded launches around a two-ball union and a
// 4x4x4 voxel grid stay within G M_total / eta of the support.
Outcome check_general_confinement() {
    BallUnion pair;
    pair.balls = {UniformBall{{-1.5, 0, 0}, 1.0, 1.0}, UniformBall{{1.5, 0, 0}, 1.0, 2.0}};
    VoxelGrid grid;
    grid.origin = {0, 0, 0};
    grid.cell_size = 1.0;
    grid.shape = {4, 4, 4};
    for (int i = 0; i < 64; ++i)
        grid.density.push_back(i % 5 == 0 ? 0.0 : 0.4 + 0.015 * i);

    MassDistribution bodies[] = {MassDistribution(pair), MassDistribution(grid)};
    SplitMix64 rng(202);
    double worst = 0.0;
    int launches = 0;
    for (const MassDistribution& body : bodies) {
        double GM = total_mass(body);
        Ball bb = bounding_ball(body);
        IntegrationOptions opt;
        for (int i = 0; i < 25; ++i) {
            Vec3 u0 = bb.center + rng.unit_vector() * (rng.uniform(1.3, 2.2) * bb.radius);
            double esc = std::sqrt(2.0 * potential(body, u0, kUnit, opt.quadrature));
            Vec3 v0 = rng.unit_vector() * (rng.uniform(0.2, 0.9) * esc);
            ConfinementBound cb = confinement_distance_general(body, u0, v0, kUnit, opt.quadrature);
            opt.t_end = orbital_span(cb.radius_bound, GM);
            opt.sample_dt = opt.t_end / 400.0;
            Trajectory traj = run_collect(body, {0.0, u0, v0}, opt, kUnit);
            ++launches;
            if (std::holds_alternative<StepLimit>(traj.termination) ||
                std::holds_alternative<EscapedFarField>(traj.termination))
                return {false, str("launch %d left the bound frame", launches)};
            for (const State& s : traj.samples)
                worst = std::max(worst, dist_to_closure(body, s.u) / cb.radius_bound);
        }
    }
    return {worst <= 1.0 + 1e-5, str("%d launches, max dist/bound = %.9f", launches, worst)};
}

// 5. The radial apex is where integration actually turns around, and it
// equals the confinement radius identically.
Outcome check_apex_optimality() {
    SplitMix64 rng(303);
    double worst_sim = 0.0, worst_id = 0.0;
    for (int i = 0; i < 20; ++i) {
        double M = rng.uniform(0.2, 20.0);
        double R = rng.uniform(0.3, 5.0);
        double f = rng.uniform(0.1, 0.9);
        double speed = f * escape_speed_spherical(M, R, kUnit);
        ConfinementBound cb = confinement_radius_spherical(M, R, speed, kUnit);
        double apex = radial_apex(R, 2.0 * M, cb.eta);
        worst_id = std::max(worst_id, std::abs(apex - cb.radius_bound) / cb.radius_bound);

        MassDistribution body(UniformBall{{0, 0, 0}, 0.25 * R, M});
        Vec3 dir = rng.unit_vector();
        IntegrationOptions opt;
        opt.t_end = orbital_span(apex, M) / 2.0;  // one full radial period
        opt.sample_dt = std::sqrt(8e-7 * apex * apex * apex / M);
        Trajectory traj = run_collect(body, {0.0, dir * R, dir * speed}, opt, kUnit);
        double top = 0.0;
        for (const State& s : traj.samples) top = std::max(top, norm(s.u));
        worst_sim = std::max(worst_sim, std::abs(top - apex) / apex);
    }
    return {worst_sim <= 1e-6 && worst_id <= 1e-12,
            str("20 draws, apex rel err %.2e (simulated), %.2e (identity)", worst_sim, worst_id)};
}

// 6. Exterior fields look like point masses: in closed form for layered
// spheres, against a 10^6-subcell midpoint oracle for a voxel cell.
Outcome check_point_equivalence() {
    RadialProfile prof;
    prof.center = {1, -1, 2};
    prof.shells = {{0.3, 3.0}, {0.7, 1.0}, {1.1, 0.2}};
    MassDistribution layered(prof);
    double GM = total_mass(layered);
    SplitMix64 rng(404);
    double worst_profile = 0.0;
    for (int i = 0; i < 100; ++i) {
        double s = rng.uniform(1.33, 25.0);
        Vec3 u = prof.center + rng.unit_vector() * s;
        double got = potential(layered, u, kUnit);
        worst_profile = std::max(worst_profile, std::abs(got - GM / s) / (GM / s));
    }

    VoxelGrid cell;
    cell.origin = {0, 0, 0};
    cell.cell_size = 1.0;
    cell.shape = {1, 1, 1};
    cell.density = {2.0};
    MassDistribution voxel(cell);
    double worst_voxel = 0.0;
    for (int i = 0; i < 10; ++i) {
        Vec3 u = Vec3{0.5, 0.5, 0.5} + rng.unit_vector() * rng.uniform(6.0, 15.0);
        double got = potential(voxel, u, kUnit);
        double want = oracles::brute_voxel_potential(cell, u, 1.0, 100);
        worst_voxel = std::max(worst_voxel, std::abs(got - want) / want);
    }
    bool ok = worst_profile <= 1e-10 && worst_voxel <= 1e-6;
    return {ok, str("profile rel err %.2e (100 pts), voxel vs 1e6-cell oracle %.2e (10 pts)",
                    worst_profile, worst_voxel)};
}

// 7. The field is the gradient of the potential, by central differences,
// across every body variant.
Outcome check_gradient_consistency() {
    VoxelGrid g;
    g.origin = {0, 0, 0};
    g.cell_size = 1.0;
    g.shape = {2, 2, 2};
    g.density = {1.0, 0.5, 2.0, 1.0, 0.0, 1.5, 1.0, 0.25};
    RadialProfile prof;
    prof.center = {1, -1, 2};
    prof.shells = {{0.3, 3.0}, {0.7, 1.0}, {1.1, 0.2}};
    BallUnion pair;
    pair.balls = {UniformBall{{-1.5, 0, 0}, 1.0, 1.0}, UniformBall{{1.5, 0, 0}, 1.0, 2.0}};
    MassDistribution bodies[] = {
        MassDistribution(PointMass{{0.3, 0.0, -0.2}, 2.0}),
        MassDistribution(UniformBall{{0, 1, 0}, 0.7, 3.0}),
        MassDistribution(prof),
        MassDistribution(pair),
        MassDistribution(g),
    };
    SplitMix64 rng(505);
    double worst = 0.0;
    for (const MassDistribution& body : bodies) {
        Ball bb = bounding_ball(body);
        double scale = bb.radius > 0 ? bb.radius : 1.0;
        for (int i = 0; i < 20; ++i) {
            Vec3 u = bb.center + rng.unit_vector() * rng.uniform(1.5 * scale, 4.0 * scale);
            Vec3 got = field(body, u, kUnit);
            Vec3 fd = oracles::central_gradient(
                [&](const Vec3& x) { return potential(body, x, kUnit); }, u,
                3e-4 * distance(u, bb.center));
            worst = std::max(worst, norm(got - fd) / norm(got));
        }
    }
    return {worst <= 1e-5, str("100 points over 5 variants, worst rel err %.2e", worst)};
}

// 8. Every trajectory the gate integrated conserved energy to 1e-8; a
// deliberately sloppy tolerance fails the same test.
Outcome check_energy_conservation() {
    double worst = 0.0;
    for (double d : g_drifts) worst = std::max(worst, d);

    MassDistribution body(UniformBall{{0, 0, 0}, 0.5, 1.0});
    IntegrationOptions loose;
    loose.rel_tol = 1e-3;
    loose.abs_tol = 1e-6;
    double a = 4.0 / 3.0;
    loose.t_end = 5.0 * 2.0 * std::numbers::pi * std::pow(a, 1.5);
    Trajectory sloppy = integrate(body, {0.0, {2, 0, 0}, {0, 0.5, 0}}, loose, kUnit);
    double control = energy_drift(body, sloppy, kUnit);

    bool ok = worst <= 1e-8 && control > 1e-8;
    return {ok, str("max drift %.2e over %zu trajectories; loose-tolerance control %.2e", worst,
                    g_drifts.size(), control)};
}

// 9. A radial photon launched off a verdict-positive body decelerates from
// the start and never outruns the photon confinement radius.
Outcome check_photon_deceleration() {
    PhysicalConstants gc{1.0, 1.0};
    MassDistribution body(UniformBall{{0, 0, 0}, 1.0, 1.1});
    BlackHoleVerdict v = classify_black_hole(body, {{0, 0, 0}, 1.0}, Criterion::Diameter, gc);
    if (!v.is_black_hole || !v.photon_confinement_radius)
        return {false, "classifier did not flag the body"};

    State s0{0.0, {1.000001, 0, 0}, {gc.c, 0, 0}};
    if (!initial_speed_decreasing(body, s0, gc)) return {false, "launch not decelerating"};
    IntegrationOptions opt;
    opt.t_end = 12.0;
    Trajectory traj = run_collect(body, s0, opt, gc);
    if (traj.samples.size() < 10) return {false, "fewer than 10 samples"};
    for (int i = 1; i < 10; ++i)
        if (!(norm(traj.samples[i].v) < norm(traj.samples[i - 1].v)))
            return {false, str("speed not strictly decreasing at sample %d", i)};
    double reach = 0.0;
    for (const State& s : traj.samples) reach = std::max(reach, dist_to_closure(body, s.u));
    bool ok = reach <= *v.photon_confinement_radius;
    return {ok, str("margin %.2f, max dist %.4f vs photon bound %.4f", v.margin, reach,
                    *v.photon_confinement_radius)};
}

// 10. Verdicts flip exactly across margin = 1 for all five criteria, and the
// asymmetric density threshold is twice the symmetric one.
Outcome check_threshold_strictness() {
    PhysicalConstants gc{1.0, 1.0};
    Ball B{{0, 0, 0}, 1.0};
    auto ball = [](double mass) { return MassDistribution(UniformBall{{0, 0, 0}, 1.0, mass}); };
    struct Case {
        Criterion crit;
        double critical_mass;
    };
    const Case cases[] = {{Criterion::MaxPairDistance, 1.0},
                          {Criterion::Diameter, 1.0},
                          {Criterion::DensityBall, 1.0},
                          {Criterion::DensitySymmetric, 0.5},
                          {Criterion::DensityAsymmetric, 1.0}};
    for (const Case& cs : cases) {
        BlackHoleVerdict above =
            classify_black_hole(ball(cs.critical_mass * (1.0 + 1e-9)), B, cs.crit, gc);
        BlackHoleVerdict below =
            classify_black_hole(ball(cs.critical_mass * (1.0 - 1e-9)), B, cs.crit, gc);
        if (!above.is_black_hole || below.is_black_hole)
            return {false, str("%s did not flip across margin 1", criterion_name(cs.crit))};
        if (above.is_black_hole != (above.margin > 1.0))
            return {false, str("%s verdict disagrees with margin", criterion_name(cs.crit))};
    }
    auto probe = ball(0.7);
    double sym = classify_black_hole(probe, B, Criterion::DensitySymmetric, gc).margin;
    double asym = classify_black_hole(probe, B, Criterion::DensityAsymmetric, gc).margin;
    bool factor_ok = std::abs(sym - 2.0 * asym) <= 1e-12 * sym;
    return {factor_ok, str("all five criteria flip at 1 +- 1e-9; sym/asym margin ratio %.12f",
                           sym / asym)};
}

}  // namespace

int main() {
    struct Check {
        const char* label;
        Outcome (*run)();
    };
    // The energy gate is evaluated last so it sees every trajectory, but it
    // is printed in place.
    const Check checks[] = {
        {"cosmological density threshold", check_cosmology},
        {"radial collapse time", check_collapse_time},
        {"spherical confinement sweep", check_spherical_confinement},
        {"general confinement sweep", check_general_confinement},
        {"radial apex optimality", check_apex_optimality},
        {"point-equivalent exterior fields", check_point_equivalence},
        {"field-gradient consistency", check_gradient_consistency},
        {"energy conservation gate", check_energy_conservation},
        {"photon deceleration and containment", check_photon_deceleration},
        {"criterion threshold strictness", check_threshold_strictness},
    };
    const int order[] = {0, 1, 2, 3, 4, 5, 6, 8, 9, 7};

    Outcome results[10];
    double seconds[10];
    for (int idx : order) {
        auto start = std::chrono::steady_clock::now();
        try {
            results[idx] = checks[idx].run();
        } catch (const std::exception& e) {
            results[idx] = {false, std::string("exception: ") + e.what()};
        }
        seconds[idx] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                           .count();
    }

    int failures = 0;
    for (int i = 0; i < 10; ++i) {
        failures += results[i].ok ? 0 : 1;
        std::printf("[%s] %2d. %s: %s (%.1fs)\n", results[i].ok ? "PASS" : "FAIL", i + 1,
                    checks[i].label, results[i].detail.c_str(), seconds[i]);
    }
    std::printf("%d/10 passed\n", 10 - failures);
    return failures;
}
