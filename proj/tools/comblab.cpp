// Command-line driver for the verification experiments.
//
//   comblab <experiment> [--config file.json] [--out dir] [--seed N] ...
//
// Exit status: 0 if every requested experiment passes, 1 if any fails,
// 2 on configuration or I/O errors.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "comblab/experiments/runners.hpp"

namespace ex = comblab::experiments;

namespace {

struct Overrides {
    std::string config_path;
    ex::ExperimentConfig flags;
};

template <class T>
void add_override(CLI::App& app, const std::string& flag, T& field, const std::string& help)
{
    app.add_option(flag, field, help);
}

ex::ExperimentConfig resolve(const Overrides& ov, const CLI::App& app)
{
    ex::ExperimentConfig cfg;
    if (!ov.config_path.empty()) {
        cfg = ex::load_config(ov.config_path);
    }
    // Command-line values win over the config file.
    auto given = [&](const char* name) { return app.count(name) > 0; };
    const ex::ExperimentConfig& f = ov.flags;
    if (given("--r")) cfg.r = f.r;
    if (given("--seed")) cfg.seed = f.seed;
    if (given("--samples")) cfg.samples = f.samples;
    if (given("--iters")) cfg.iters = f.iters;
    if (given("--abs_tol")) cfg.abs_tol = f.abs_tol;
    if (given("--rel_tol")) cfg.rel_tol = f.rel_tol;
    if (given("--geom_tol")) cfg.geom_tol = f.geom_tol;
    if (given("--match_tol")) cfg.match_tol = f.match_tol;
    if (given("--escape_radius")) cfg.escape_radius = f.escape_radius;
    if (given("--converge_radius")) cfg.converge_radius = f.converge_radius;
    if (given("--separation_constant")) cfg.separation_constant = f.separation_constant;
    if (given("--out")) cfg.out_dir = f.out_dir;
    cfg.validate();
    return cfg;
}

void print_report(const ex::ExperimentReport& rep)
{
    std::cout << (rep.pass ? "PASS " : "FAIL ") << rep.name << " (" << rep.rows_written << " rows)\n";
    for (const auto& [key, value] : rep.metrics) {
        std::cout << "    " << key << " = " << ex::fmt_real(value) << "\n";
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical checks for a homeomorphism whose stable set is a comb plus the x-axis"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides ov;
    app.add_option("--config", ov.config_path, "JSON config with flat keys")->check(CLI::ExistingFile);
    add_override(app, "--out,--out_dir", ov.flags.out_dir, "output directory");
    add_override(app, "--seed", ov.flags.seed, "sampling seed");
    add_override(app, "--r", ov.flags.r, "comb radius in (0, 1/2)");
    add_override(app, "--samples", ov.flags.samples, "sample count");
    add_override(app, "--iters", ov.flags.iters, "orbit length N");
    add_override(app, "--abs_tol", ov.flags.abs_tol, "integrator absolute tolerance");
    add_override(app, "--rel_tol", ov.flags.rel_tol, "integrator relative tolerance");
    add_override(app, "--geom_tol", ov.flags.geom_tol, "membership tolerance");
    add_override(app, "--match_tol", ov.flags.match_tol, "tooth abscissa matching tolerance");
    add_override(app, "--escape_radius", ov.flags.escape_radius, "escape radius R");
    add_override(app, "--converge_radius", ov.flags.converge_radius, "convergence radius");
    add_override(app, "--separation_constant", ov.flags.separation_constant, "separation constant c");

    const std::vector<std::string> names{"verify-stable-set", "check-g", "check-commute", "check-derivative",
                                         "components", "render", "all"};
    for (const auto& name : names) {
        app.add_subcommand(name, name == "all" ? "run every experiment above and write summary.json"
                                               : "run the " + name + " experiment");
    }
    std::vector<double> start{0.0, 0.0, 1.0};
    int steps = 10;
    CLI::App* orbit = app.add_subcommand("orbit", "dump one orbit of f as CSV");
    orbit->add_option("--p", start, "start point x y z")->expected(3);
    orbit->add_option("--n", steps, "number of steps (negative for f^-1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const ex::ExperimentConfig cfg = resolve(ov, app);
        std::vector<ex::ExperimentReport> reports;
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "all") {
            reports = ex::run_all(cfg);
        } else {
            if (cmd == "verify-stable-set") {
                reports.push_back(ex::run_verify_stable_set(cfg));
            } else if (cmd == "check-g") {
                reports.push_back(ex::run_check_g(cfg));
            } else if (cmd == "check-commute") {
                reports.push_back(ex::run_check_commute(cfg));
            } else if (cmd == "check-derivative") {
                reports.push_back(ex::run_check_derivative(cfg));
            } else if (cmd == "components") {
                reports.push_back(ex::run_components(cfg));
            } else if (cmd == "render") {
                reports.push_back(ex::run_render(cfg));
            } else if (cmd == "orbit") {
                reports.push_back(ex::run_orbit(cfg, {start[0], start[1], start[2]}, steps));
            }
            ex::write_summary(cfg.out_dir, reports);
        }
        bool all_pass = true;
        for (const auto& rep : reports) {
            print_report(rep);
            all_pass = all_pass && rep.pass;
        }
        return all_pass ? 0 : 1;
    } catch (const comblab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const comblab::IoFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
