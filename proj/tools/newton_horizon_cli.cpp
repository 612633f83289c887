// Command-line front end: simulate / classify / cosmology / verify.
// All substance lives in the headers; this file only maps flags to calls.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <newton_horizon/newton_horizon.hpp>

namespace nh = newton_horizon;

namespace {

int emit(const nh::CommandResult& result) {
    (result.exit_code == 0 || result.exit_code == 1 ? std::cout : std::cerr) << result.report;
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Newtonian dark-body toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string criterion_name = "max-pair-distance";
    std::vector<double> ball_center;
    double ball_radius = 0;
    double radius = 0, density = 0;
    double G_override = 0, c_override = 0;
    std::int64_t sweeps = 16;
    std::uint64_t seed = 1;

    auto* sim = app.add_subcommand("simulate", "Integrate the configured launches");
    sim->add_option("config", config_path, "Scenario JSON file")->required();

    auto* cls = app.add_subcommand("classify", "Apply a black-hole criterion");
    cls->add_option("config", config_path, "Scenario JSON file")->required();
    cls->add_option("--criterion", criterion_name,
                    "max-pair-distance | diameter | density-ball | density-symmetric | "
                    "density-asymmetric");
    cls->add_option("--ball-center", ball_center, "Override ball center (three numbers)")
        ->expected(3);
    cls->add_option("--ball-radius", ball_radius, "Override ball radius");

    auto* cos = app.add_subcommand("cosmology", "Critical-density check for a spherical region");
    cos->add_option("--radius", radius, "Region radius [m]")->required();
    cos->add_option("--density", density, "Mean density [kg/m^3]")->required();
    cos->add_option("--G", G_override, "Gravitational constant override");
    cos->add_option("--c", c_override, "Speed of light override");

    auto* ver = app.add_subcommand("verify", "Randomized confinement sweeps");
    ver->add_option("config", config_path, "Scenario JSON file")->required();
    ver->add_option("--sweeps", sweeps, "Number of random launches");
    ver->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            return emit(nh::cmd_simulate(nh::load_scenario(config_path)));
        }
        if (cls->parsed()) {
            auto crit = nh::criterion_from_name(criterion_name);
            if (!crit) {
                std::cerr << "error: unknown criterion \"" << criterion_name << "\"\n";
                return 2;
            }
            nh::ScenarioConfig cfg = nh::load_scenario(config_path);
            if (!ball_center.empty() || ball_radius > 0.0) {
                if (ball_center.size() != 3 || !(ball_radius > 0.0)) {
                    std::cerr << "error: --ball-center and --ball-radius go together\n";
                    return 2;
                }
                cfg.ball = nh::Ball{{ball_center[0], ball_center[1], ball_center[2]}, ball_radius};
            }
            return emit(nh::cmd_classify(cfg, *crit));
        }
        if (cos->parsed()) {
            nh::PhysicalConstants consts;
            if (G_override > 0.0) consts.G = G_override;
            if (c_override > 0.0) consts.c = c_override;
            return emit(nh::cmd_cosmology(radius, density, consts));
        }
        if (ver->parsed()) {
            return emit(nh::cmd_verify(nh::load_scenario(config_path), sweeps, seed));
        }
    } catch (const nh::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
