#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "constants.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "mass_distribution.hpp"
#include "potential.hpp"
#include "random.hpp"
#include "theorems.hpp"
#include "vec3.hpp"

namespace newton_horizon {

struct LaunchSpec {
    enum class Kind { Velocity, SpeedDirection, PhotonRadial };
    Kind kind = Kind::Velocity;
    Vec3 u0;
    Vec3 velocity;   // Kind::Velocity
    Vec3 direction;  // Kind::SpeedDirection, normalized at parse
    double speed = 0.0;
};

struct OutputSpec {
    std::string csv_path;     // per-launch files get _<index> before the extension
    std::string report_path;  // empty: report returned only
};

struct ScenarioConfig {
    PhysicalConstants constants;
    MassDistribution body;
    std::optional<Ball> ball;  // classify region; defaults to the bounding ball
    std::vector<LaunchSpec> launches;
    IntegrationOptions integration;
    OutputSpec outputs;
};

struct CommandResult {
    int exit_code = 0;
    std::string report;
};

// ---- formatting -------------------------------------------------------------

namespace detail {

inline std::string fmt_g(double v, int precision = 17) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

inline std::string fmt_f(double v, int decimals = 2) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string fmt_vec(const Vec3& v, int precision = 9) {
    return "(" + fmt_g(v.x, precision) + ", " + fmt_g(v.y, precision) + ", " +
           fmt_g(v.z, precision) + ")";
}

inline const char* shape_name(const MassDistribution& d) {
    struct Visitor {
        const char* operator()(const PointMass&) const { return "point_mass"; }
        const char* operator()(const UniformBall&) const { return "uniform_ball"; }
        const char* operator()(const RadialProfile&) const { return "radial_profile"; }
        const char* operator()(const BallUnion&) const { return "ball_union"; }
        const char* operator()(const VoxelGrid&) const { return "voxel_grid"; }
    };
    return std::visit(Visitor{}, d.shape());
}

inline std::string termination_name(const Termination& t) {
    struct Visitor {
        std::string operator()(const ReachedTEnd&) const { return "reached-t-end"; }
        std::string operator()(const CollapsedIntoBody& c) const {
            return "collapsed-into-body at t = " + fmt_g(c.t_hit);
        }
        std::string operator()(const EscapedFarField& e) const {
            return "escaped-far-field at t = " + fmt_g(e.t_exit);
        }
        std::string operator()(const StepLimit&) const { return "step-limit"; }
    };
    return std::visit(Visitor{}, t);
}

inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

inline std::string launch_csv_path(const std::string& base, std::size_t index) {
    namespace fs = std::filesystem;
    fs::path p(base);
    fs::path out = p.parent_path() / (p.stem().string() + "_" + std::to_string(index));
    out += p.extension();
    return out.string();
}

template <class F>
CommandResult guarded(F&& run) {
    try {
        return run();
    } catch (const WrongShape& e) {
        return {4, std::string("error: ") + e.what() + "\n"};
    } catch (const ConfigError& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    } catch (const BadParameters& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    } catch (const Error& e) {
        return {3, std::string("error: ") + e.what() + "\n"};
    } catch (const std::exception& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    }
}

}  // namespace detail

// ---- config parsing ---------------------------------------------------------

namespace detail {

using nlohmann::json;

inline const json& member(const json& j, const char* key, const char* ctx) {
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError(std::string(ctx) + ": missing \"" + key + "\"");
    return *it;
}

inline double num(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
    return j.get<double>();
}

inline double num_field(const json& j, const char* key, const char* ctx) {
    return num(member(j, key, ctx), std::string(ctx) + "." + key);
}

inline Vec3 vec3_field(const json& j, const char* key, const char* ctx) {
    const json& a = member(j, key, ctx);
    std::string where = std::string(ctx) + "." + key;
    if (!a.is_array() || a.size() != 3)
        throw ConfigError(where + ": expected an array of 3 numbers");
    return {num(a[0], where), num(a[1], where), num(a[2], where)};
}

inline MassDistribution parse_body(const json& j) {
    if (!j.is_object()) throw ConfigError("body: expected an object");
    std::string type = member(j, "type", "body").get<std::string>();
    try {
        if (type == "point_mass")
            return MassDistribution(PointMass{vec3_field(j, "position", "body"),
                                              num_field(j, "mass", "body")});
        if (type == "uniform_ball")
            return MassDistribution(UniformBall{vec3_field(j, "center", "body"),
                                                num_field(j, "radius", "body"),
                                                num_field(j, "mass", "body")});
        if (type == "radial_profile") {
            RadialProfile p;
            p.center = vec3_field(j, "center", "body");
            const json& shells = member(j, "shells", "body");
            if (!shells.is_array() || shells.empty())
                throw ConfigError("body.shells: expected a non-empty array");
            for (const auto& s : shells)
                p.shells.push_back({num_field(s, "outer_radius", "body.shells"),
                                    num_field(s, "density", "body.shells")});
            return MassDistribution(std::move(p));
        }
        if (type == "ball_union") {
            BallUnion u;
            const json& balls = member(j, "balls", "body");
            if (!balls.is_array() || balls.empty())
                throw ConfigError("body.balls: expected a non-empty array");
            for (const auto& b : balls)
                u.balls.push_back({vec3_field(b, "center", "body.balls"),
                                   num_field(b, "radius", "body.balls"),
                                   num_field(b, "mass", "body.balls")});
            return MassDistribution(std::move(u));
        }
        if (type == "voxel_grid") {
            VoxelGrid g;
            g.origin = vec3_field(j, "origin", "body");
            g.cell_size = num_field(j, "cell_size", "body");
            const json& shape = member(j, "shape", "body");
            if (!shape.is_array() || shape.size() != 3)
                throw ConfigError("body.shape: expected an array of 3 positive integers");
            for (int a = 0; a < 3; ++a) {
                if (!shape[a].is_number_integer() || shape[a].get<std::int64_t>() < 1)
                    throw ConfigError("body.shape: expected an array of 3 positive integers");
                g.shape[a] = shape[a].get<std::size_t>();
            }
            const json& density = member(j, "density", "body");
            if (!density.is_array())
                throw ConfigError("body.density: expected a flat array, x index fastest");
            for (const auto& v : density) g.density.push_back(num(v, "body.density"));
            return MassDistribution(std::move(g));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("body: ") + e.what());
    }
    throw ConfigError("body.type: unknown type \"" + type +
                      "\" (point_mass, uniform_ball, radial_profile, ball_union, voxel_grid)");
}

inline LaunchSpec parse_launch(const json& j, std::size_t index) {
    std::string ctx = "launches[" + std::to_string(index) + "]";
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
    LaunchSpec l;
    l.u0 = vec3_field(j, "u0", ctx.c_str());
    if (!is_finite(l.u0)) throw ConfigError(ctx + ".u0: must be finite");
    bool has_v0 = j.contains("v0");
    bool has_speed = j.contains("speed") || j.contains("direction");
    bool has_mode = j.contains("mode");
    if (int(has_v0) + int(has_speed) + int(has_mode) != 1)
        throw ConfigError(ctx + ": give exactly one of v0, speed+direction, or mode");
    if (has_v0) {
        l.kind = LaunchSpec::Kind::Velocity;
        l.velocity = vec3_field(j, "v0", ctx.c_str());
        if (!is_finite(l.velocity)) throw ConfigError(ctx + ".v0: must be finite");
    } else if (has_speed) {
        l.kind = LaunchSpec::Kind::SpeedDirection;
        l.speed = num_field(j, "speed", ctx.c_str());
        Vec3 dir = vec3_field(j, "direction", ctx.c_str());
        if (!(l.speed >= 0.0) || !std::isfinite(l.speed))
            throw ConfigError(ctx + ".speed: must be a finite number >= 0");
        if (!is_finite(dir) || !(norm(dir) > 0.0))
            throw ConfigError(ctx + ".direction: must be finite and nonzero");
        l.direction = normalized(dir);
    } else {
        std::string mode = member(j, "mode", ctx.c_str()).get<std::string>();
        if (mode != "photon_radial")
            throw ConfigError(ctx + ".mode: unknown mode \"" + mode + "\"");
        l.kind = LaunchSpec::Kind::PhotonRadial;
    }
    return l;
}

inline IntegrationOptions parse_integration(const json* j) {
    IntegrationOptions opt;
    if (!j) return opt;
    const char* ctx = "integration";
    if (j->contains("rel_tol")) opt.rel_tol = num_field(*j, "rel_tol", ctx);
    if (j->contains("abs_tol")) opt.abs_tol = num_field(*j, "abs_tol", ctx);
    if (j->contains("t_end")) opt.t_end = num_field(*j, "t_end", ctx);
    if (j->contains("escape_radius_factor"))
        opt.escape_radius_factor = num_field(*j, "escape_radius_factor", ctx);
    if (j->contains("max_steps")) {
        double v = num_field(*j, "max_steps", ctx);
        if (!(v >= 1.0)) throw ConfigError("integration.max_steps: must be >= 1");
        opt.max_steps = std::int64_t(v);
    }
    if (j->contains("sample_dt")) opt.sample_dt = num_field(*j, "sample_dt", ctx);
    if (j->contains("quadrature_rel_tol"))
        opt.quadrature.rel_tol = num_field(*j, "quadrature_rel_tol", ctx);
    if (j->contains("quadrature_max_subdivisions")) {
        double v = num_field(*j, "quadrature_max_subdivisions", ctx);
        if (!(v >= 1.0)) throw ConfigError("integration.quadrature_max_subdivisions: must be >= 1");
        opt.quadrature.max_subdivisions = int(v);
    }
    return opt;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& j) {
    using detail::member;
    try {
        if (!j.is_object()) throw ConfigError("config: expected a JSON object");

        PhysicalConstants consts;
        if (j.contains("constants")) {
            const auto& c = j.at("constants");
            if (c.contains("G")) consts.G = detail::num_field(c, "G", "constants");
            if (c.contains("c")) consts.c = detail::num_field(c, "c", "constants");
            if (!consts.valid()) throw ConfigError("constants: G and c must be positive");
        }

        MassDistribution body = detail::parse_body(member(j, "body", "config"));

        std::optional<Ball> ball;
        if (j.contains("ball")) {
            const auto& b = j.at("ball");
            ball = Ball{detail::vec3_field(b, "center", "ball"),
                        detail::num_field(b, "radius", "ball")};
            if (!(ball->radius > 0.0)) throw ConfigError("ball.radius: must be positive");
        }

        std::vector<LaunchSpec> launches;
        if (j.contains("launches")) {
            const auto& ls = j.at("launches");
            if (!ls.is_array()) throw ConfigError("launches: expected an array");
            for (std::size_t i = 0; i < ls.size(); ++i)
                launches.push_back(detail::parse_launch(ls[i], i));
        }

        const nlohmann::json* integration =
            j.contains("integration") ? &j.at("integration") : nullptr;
        IntegrationOptions opts = detail::parse_integration(integration);

        OutputSpec outputs;
        if (j.contains("outputs")) {
            const auto& o = j.at("outputs");
            if (o.contains("csv_path")) outputs.csv_path = o.at("csv_path").get<std::string>();
            if (o.contains("report_path"))
                outputs.report_path = o.at("report_path").get<std::string>();
        }

        return {consts, std::move(body), ball, std::move(launches), opts, outputs};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return parse_scenario(j);
}

// ---- commands ---------------------------------------------------------------

namespace detail {

inline int thread_cap_from_env() {
    const char* s = std::getenv("NEWTON_HORIZON_THREADS");
    if (!s || !*s) return 0;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 1) return 0;  // unusable value: fall back
    return int(std::min(v, 256l));
}

inline State resolve_launch(const ScenarioConfig& cfg, const LaunchSpec& l) {
    switch (l.kind) {
        case LaunchSpec::Kind::Velocity:
            return {0.0, l.u0, l.velocity};
        case LaunchSpec::Kind::SpeedDirection:
            return {0.0, l.u0, l.direction * l.speed};
        case LaunchSpec::Kind::PhotonRadial: {
            Vec3 out = l.u0 - bounding_ball(cfg.body).center;
            if (!(norm(out) > 0.0))
                throw ConfigError("photon_radial launch: u0 coincides with the body center");
            return {0.0, l.u0, normalized(out) * cfg.constants.c};
        }
    }
    throw ConfigError("launch: unknown kind");
}

/// Confinement check of one trajectory against the tightest applicable bound.
struct BoundOutcome {
    bool applicable = false;
    const char* frame = "";
    double eta = 0.0;
    double bound = 0.0;
    double max_attained = 0.0;
    bool held = false;
};

inline BoundOutcome check_confinement(const MassDistribution& body, const Trajectory& traj,
                                      const PhysicalConstants& consts,
                                      const QuadratureOptions& qopt) {
    BoundOutcome out;
    const State& s0 = traj.samples.front();
    auto center = symmetry_center(body);
    bool spherical =
        center && distance(s0.u, *center) > max_dist_over_closure(body, *center);
    try {
        if (spherical) {
            out.frame = "spherical-from-center";
            ConfinementBound cb = confinement_radius_spherical(
                body.total_mass(), distance(s0.u, *center), norm(s0.v), consts);
            out.eta = cb.eta;
            out.bound = cb.radius_bound;
            for (const State& s : traj.samples)
                out.max_attained = std::max(out.max_attained, distance(s.u, *center));
        } else {
            out.frame = "general-from-closure";
            ConfinementBound cb = confinement_distance_general(body, s0.u, s0.v, consts, qopt);
            out.eta = cb.eta;
            out.bound = cb.radius_bound;
            for (const State& s : traj.samples)
                out.max_attained = std::max(out.max_attained, dist_to_closure(body, s.u));
        }
    } catch (const AtOrAboveEscape&) {
        return out;  // not applicable: launch at or above escape
    }
    out.applicable = true;
    out.held = out.max_attained <= out.bound;
    return out;
}

inline std::string csv_for_trajectory(const MassDistribution& body, const Trajectory& traj,
                                      const PhysicalConstants& consts,
                                      const QuadratureOptions& qopt) {
    std::string csv = "t,ux,uy,uz,vx,vy,vz,energy,dist_to_closure\n";
    bool collapsed = std::holds_alternative<CollapsedIntoBody>(traj.termination);
    char line[512];
    double e = 0.0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const State& s = traj.samples[i];
        double dist = dist_to_closure(body, s.u);
        // The boundary-touch sample of a collapsed trajectory keeps the
        // conserved energy of the approach; the potential is not evaluable there.
        if (!(collapsed && i + 1 == traj.samples.size() && i > 0))
            e = energy(body, s, consts, qopt);
        std::snprintf(line, sizeof line,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.u.x,
                      s.u.y, s.u.z, s.v.x, s.v.y, s.v.z, e, dist);
        csv += line;
    }
    return csv;
}

}  // namespace detail

/// Runs every launch in the scenario (concurrently when allowed), writes one
/// CSV per launch plus a report, and summarizes terminations, energy drift,
/// and confinement-bound checks.
inline CommandResult cmd_simulate(const ScenarioConfig& cfg) {
    return detail::guarded([&]() -> CommandResult {
        if (cfg.launches.empty()) throw ConfigError("simulate: config has no launches");
        if (!(cfg.integration.t_end > 0.0))
            throw ConfigError("simulate: integration.t_end must be positive");

        std::vector<State> initial;
        initial.reserve(cfg.launches.size());
        for (const auto& l : cfg.launches) initial.push_back(detail::resolve_launch(cfg, l));

        const std::size_t n = cfg.launches.size();
        std::vector<std::string> fragment(n);
        std::vector<std::exception_ptr> failure(n);

        auto run_one = [&](std::size_t i) {
            try {
                Trajectory traj = integrate(cfg.body, initial[i], cfg.integration, cfg.constants);
                double drift =
                    energy_drift(cfg.body, traj, cfg.constants, cfg.integration.quadrature);
                detail::BoundOutcome bc = detail::check_confinement(
                    cfg.body, traj, cfg.constants, cfg.integration.quadrature);

                std::string r;
                r += "launch: " + std::to_string(i) + "\n";
                r += "u0: " + detail::fmt_vec(initial[i].u) + "\n";
                r += "v0: " + detail::fmt_vec(initial[i].v) + "\n";
                r += "termination: " + detail::termination_name(traj.termination) + "\n";
                r += "samples: " + std::to_string(traj.samples.size()) + "\n";
                r += "t-final: " + detail::fmt_g(traj.samples.back().t) + "\n";
                r += "energy-drift: " + detail::fmt_g(drift, 6) + "\n";
                if (bc.applicable) {
                    r += "bound-frame: " + std::string(bc.frame) + "\n";
                    r += "eta: " + detail::fmt_g(bc.eta) + "\n";
                    r += "bound: " + detail::fmt_g(bc.bound) + "\n";
                    r += "max-attained: " + detail::fmt_g(bc.max_attained) + "\n";
                    r += "bound held: " + std::string(bc.held ? "yes" : "no") +
                         " (max attained / bound = " + detail::fmt_f(bc.max_attained / bc.bound) +
                         ")\n";
                } else {
                    r += "bound held: not applicable (launch at or above escape)\n";
                }
                if (!cfg.outputs.csv_path.empty()) {
                    std::string path = detail::launch_csv_path(cfg.outputs.csv_path, i);
                    detail::write_file_atomic(
                        path, detail::csv_for_trajectory(cfg.body, traj, cfg.constants,
                                                         cfg.integration.quadrature));
                    r += "csv: " + path + "\n";
                }
                fragment[i] = std::move(r);
            } catch (...) {
                failure[i] = std::current_exception();
            }
        };

        int cap = detail::thread_cap_from_env();
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        std::size_t workers = std::min<std::size_t>(n, cap > 0 ? std::size_t(cap) : hw);
        if (workers <= 1) {
            for (std::size_t i = 0; i < n; ++i) run_one(i);
        } else {
            std::atomic<std::size_t> cursor{0};
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (std::size_t i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1))
                        run_one(i);
                });
            for (auto& th : pool) th.join();
        }
        for (std::size_t i = 0; i < n; ++i)
            if (failure[i]) std::rethrow_exception(failure[i]);

        std::string report;
        report += "command: simulate\n";
        report += "body: " + std::string(detail::shape_name(cfg.body)) + "\n";
        report += "mass: " + detail::fmt_g(cfg.body.total_mass()) + "\n";
        report += "G: " + detail::fmt_g(cfg.constants.G) + "\n";
        report += "c: " + detail::fmt_g(cfg.constants.c) + "\n";
        report += "launches: " + std::to_string(n) + "\n";
        for (std::size_t i = 0; i < n; ++i) {
            report += "\n";
            report += fragment[i];
        }
        if (!cfg.outputs.report_path.empty())
            detail::write_file_atomic(cfg.outputs.report_path, report);
        return {0, report};
    });
}

/// Applies one black-hole criterion to the scenario body inside the configured
/// ball (bounding ball when none is given).
inline CommandResult cmd_classify(const ScenarioConfig& cfg, Criterion crit) {
    return detail::guarded([&]() -> CommandResult {
        Ball B = cfg.ball ? *cfg.ball : bounding_ball(cfg.body);
        BlackHoleVerdict v = classify_black_hole(cfg.body, B, crit, cfg.constants);

        std::string report;
        report += "command: classify\n";
        report += "body: " + std::string(detail::shape_name(cfg.body)) + "\n";
        report += "mass: " + detail::fmt_g(cfg.body.total_mass()) + "\n";
        report += "G: " + detail::fmt_g(cfg.constants.G) + "\n";
        report += "c: " + detail::fmt_g(cfg.constants.c) + "\n";
        report += "ball-center: " + detail::fmt_vec(B.center) + "\n";
        report += "ball-radius: " + detail::fmt_g(B.radius) + "\n";
        report += "criterion: " + std::string(criterion_name(crit)) + "\n";
        report += "verdict: " + std::string(v.is_black_hole ? "BLACK HOLE" : "NOT A BLACK HOLE") +
                  " (margin " + detail::fmt_f(v.margin) + ")\n";
        report += "margin: " + detail::fmt_g(v.margin) + "\n";
        if (v.photon_confinement_radius)
            report +=
                "photon-confinement-radius: " + detail::fmt_g(*v.photon_confinement_radius) + "\n";
        if (!cfg.outputs.report_path.empty())
            detail::write_file_atomic(cfg.outputs.report_path, report);
        return {0, report};
    });
}

inline CommandResult cmd_cosmology(double radius, double density,
                                   const PhysicalConstants& consts = {}) {
    return detail::guarded([&]() -> CommandResult {
        CosmologyReport rep = cosmology_report(radius, density, consts);
        std::string report;
        report += "command: cosmology\n";
        report += "G: " + detail::fmt_g(consts.G) + "\n";
        report += "c: " + detail::fmt_g(consts.c) + "\n";
        report += "radius: " + detail::fmt_g(radius) + "\n";
        report += "density: " + detail::fmt_g(density) + "\n";
        report += "K: " + detail::fmt_g(rep.K, 6) + "\n";
        report += "threshold: " + detail::fmt_g(rep.threshold, 6) + "\n";
        report += "ratio: " + detail::fmt_g(rep.ratio, 6) + "\n";
        report += "verdict: " +
                  std::string(rep.verdict ? "BLACK HOLE (density exceeds threshold)"
                                          : "NOT A BLACK HOLE (density below threshold)") +
                  "\n";
        return {0, report};
    });
}

/// Randomized confinement sweeps: N seeded sub-escape launches (plus any
/// launches from the config, which may fall outside the theorem hypothesis and
/// are then flagged, not failed). Exit 0 iff every in-hypothesis trajectory
/// respected its bound. Deterministic for a fixed seed.
inline CommandResult cmd_verify(const ScenarioConfig& cfg, std::int64_t sweeps,
                                std::uint64_t seed) {
    return detail::guarded([&]() -> CommandResult {
        if (sweeps < 1) throw ConfigError("verify: sweeps must be >= 1");
        if (!(cfg.integration.t_end > 0.0))
            throw ConfigError("verify: integration.t_end must be positive");

        std::string report;
        report += "command: verify\n";
        report += "seed: " + std::to_string(seed) + "\n";
        report += "sweeps: " + std::to_string(sweeps) + "\n";
        report += "body: " + std::string(detail::shape_name(cfg.body)) + "\n";
        report += "mass: " + detail::fmt_g(cfg.body.total_mass()) + "\n";
        report += "G: " + detail::fmt_g(cfg.constants.G) + "\n";
        report += "c: " + detail::fmt_g(cfg.constants.c) + "\n";

        // Slack for accumulated rounding in the sample-vs-bound comparison.
        const double slack = 1.0 + 1e-9;
        std::int64_t held = 0, violated = 0, out_of_hypothesis = 0;

        auto run_case = [&](const std::string& label, const State& s0) {
            Trajectory traj = integrate(cfg.body, s0, cfg.integration, cfg.constants);
            detail::BoundOutcome bc = detail::check_confinement(cfg.body, traj, cfg.constants,
                                                                cfg.integration.quadrature);
            std::string line = label + ": u0=" + detail::fmt_vec(s0.u, 9) +
                               " speed=" + detail::fmt_g(norm(s0.v), 9);
            if (!bc.applicable) {
                ++out_of_hypothesis;
                line += " status=out-of-hypothesis (at or above escape)";
            } else {
                bool ok = bc.max_attained <= bc.bound * slack;
                (ok ? held : violated) += 1;
                line += " frame=" + std::string(bc.frame) + " bound=" + detail::fmt_g(bc.bound, 9) +
                        " max-attained=" + detail::fmt_g(bc.max_attained, 9) +
                        " status=" + (ok ? "held" : "VIOLATED");
            }
            report += line + "\n";
        };

        for (std::size_t i = 0; i < cfg.launches.size(); ++i)
            run_case("launch " + std::to_string(i), detail::resolve_launch(cfg, cfg.launches[i]));

        SplitMix64 rng(seed);
        Ball home = bounding_ball(cfg.body);
        double scale = home.radius > 0.0 ? home.radius : 1.0;
        for (std::int64_t i = 0; i < sweeps; ++i) {
            Vec3 u0 = home.center + rng.unit_vector() * (rng.uniform(1.2, 4.0) * scale);
            double esc = std::sqrt(
                2.0 * potential(cfg.body, u0, cfg.constants, cfg.integration.quadrature));
            Vec3 v0 = rng.unit_vector() * (rng.uniform01() * 0.99 * esc);
            run_case("sweep " + std::to_string(i), State{0.0, u0, v0});
        }

        report += "held: " + std::to_string(held) + "\n";
        report += "violated: " + std::to_string(violated) + "\n";
        report += "out-of-hypothesis: " + std::to_string(out_of_hypothesis) + "\n";
        report += "result: " + std::string(violated == 0 ? "all-held" : "VIOLATIONS") + "\n";
        if (!cfg.outputs.report_path.empty())
            detail::write_file_atomic(cfg.outputs.report_path, report);
        return {violated == 0 ? 0 : 1, report};
    });
}

}  // namespace newton_horizon
