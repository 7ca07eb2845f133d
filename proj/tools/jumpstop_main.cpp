// jumpstop: batch front door for the controller-stopper solver suite.
//
// Subcommands: validate, solve, facelift, oracle, simulate, target, compare.
// Exit codes: 0 success, 1 validation failure, 2 tolerance breach in compare.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "jumpstop/chain_oracle.hpp"
#include "jumpstop/envelopes.hpp"
#include "jumpstop/path_sim.hpp"
#include "jumpstop/pide_solver.hpp"
#include "jumpstop/surface_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace jumpstop;

namespace {

struct GridArgs {
    int nx = 101, ny = 0, nt = 100;
    double xlo = -1, xhi = 1, ylo = -1, yhi = 1;
};

GridArgs parse_grid(const std::string& s) {
    GridArgs g;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--grid", "expected key=value: " + item);
        std::string key = item.substr(0, eq);
        std::string val = item.substr(eq + 1);
        if (key == "nx") g.nx = std::stoi(val);
        else if (key == "ny") g.ny = std::stoi(val);
        else if (key == "nt") g.nt = std::stoi(val);
        else if (key == "xlo") g.xlo = std::stod(val);
        else if (key == "xhi") g.xhi = std::stod(val);
        else if (key == "ylo") g.ylo = std::stod(val);
        else if (key == "yhi") g.yhi = std::stod(val);
        else throw CLI::ValidationError("--grid", "unknown key: " + key);
    }
    return g;
}

SolverGrid make_grid(const ControlledJumpModel& model, const GridArgs& a) {
    SolverGrid g;
    g.dim = model.dimension;
    g.nt = a.nt;
    g.t0 = 0;
    g.horizon = model.horizon;
    g.lo = {a.xlo, a.ylo};
    g.hi = {a.xhi, a.yhi};
    g.nodes = {a.nx, g.dim > 1 ? (a.ny > 0 ? a.ny : a.nx) : 1};
    return g;
}

GameKind parse_kind(const std::string& s) {
    if (s == "zero_sum") return GameKind::ZeroSum;
    if (s == "cooperative") return GameKind::Cooperative;
    throw CLI::ValidationError("--kind", "expected zero_sum|cooperative");
}

Vec parse_point(const std::string& s, int dim) {
    Vec x;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) x.push_back(std::stod(item));
    if (static_cast<int>(x.size()) != dim)
        throw CLI::ValidationError("--x0", "expected " + std::to_string(dim) + " coordinates");
    return x;
}

json config_echo(const std::string& command, const std::string& model_path,
                 const std::string& grid_str, const std::string& kind) {
    json j;
    j["version"] = kVersion;
    j["command"] = command;
    if (!model_path.empty()) j["model"] = model_path;
    if (!grid_str.empty()) j["grid"] = grid_str;
    if (!kind.empty()) j["kind"] = kind;
    return j;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"controller-stopper game solver and verifier suite"};
    app.require_subcommand(1);

    std::string model_path, grid_str = "nx=101,nt=100,xlo=-1,xhi=1";
    std::string kind_str = "zero_sum", out_dir = ".", x0_str = "0";
    uint64_t seed = 1;
    size_t n_paths = 10000;
    double tol = 1e-2, t0 = 0;
    int steps = 100, control_index = 0;
    bool facelift_flag = false;
    std::string file_a, file_b;

    auto add_common = [&](CLI::App* cmd, bool needs_model = true) {
        if (needs_model) cmd->add_option("--model", model_path, "model JSON path")->required();
        cmd->add_option("--grid", grid_str, "nx=..,nt=..,xlo=..,xhi=..[,ny=..,ylo=..,yhi=..]");
        cmd->add_option("--out", out_dir, "output directory");
    };

    auto* c_validate = app.add_subcommand("validate", "check model assumptions");
    c_validate->add_option("--model", model_path)->required();

    auto* c_solve = app.add_subcommand("solve", "finite-difference game solve");
    add_common(c_solve);
    c_solve->add_option("--kind", kind_str, "zero_sum|cooperative");
    c_solve->add_flag("--facelift", facelift_flag, "replace terminal datum by the lifted payoff");

    auto* c_facelift = app.add_subcommand("facelift", "terminal payoff lift profile");
    add_common(c_facelift);

    auto* c_oracle = app.add_subcommand("oracle", "Markov-chain reference solve");
    add_common(c_oracle);
    c_oracle->add_option("--kind", kind_str, "zero_sum|cooperative");

    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo value under the solved policy");
    add_common(c_sim);
    c_sim->add_option("--kind", kind_str, "zero_sum|cooperative");
    c_sim->add_option("--seed", seed, "RNG seed");
    c_sim->add_option("--paths", n_paths, "number of paths");
    c_sim->add_option("--steps", steps, "Euler steps per path");
    c_sim->add_option("--x0", x0_str, "start point, comma separated");
    c_sim->add_option("--t0", t0, "start time");

    auto* c_target = app.add_subcommand("target", "target-problem bound by bisection");
    add_common(c_target);
    c_target->add_option("--kind", kind_str, "zero_sum (unco) | cooperative (co)");
    c_target->add_option("--seed", seed, "RNG seed");
    c_target->add_option("--paths", n_paths, "number of paths");
    c_target->add_option("--steps", steps, "Euler steps per path");
    c_target->add_option("--x0", x0_str, "start point, comma separated");
    c_target->add_option("--t0", t0, "start time");
    c_target->add_option("--control", control_index, "fixed control index for the hedge");

    auto* c_compare = app.add_subcommand("compare", "diff two surface CSV files");
    c_compare->add_option("a", file_a, "first surface CSV")->required();
    c_compare->add_option("b", file_b, "second surface CSV")->required();
    c_compare->add_option("--tol", tol, "sup-norm tolerance (exit 2 if exceeded)");
    c_compare->add_option("--model", model_path, "optional model for envelope-bound report");
    c_compare->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(out_dir);

        if (c_validate->parsed()) {
            auto model = load_model_file(model_path);
            auto report = validate_assumptions(model, default_probes(model));
            std::cout << report.to_string();
            return report.all_passed() ? 0 : 1;
        }

        if (c_solve->parsed()) {
            auto model = load_model_file(model_path);
            auto grid = make_grid(model, parse_grid(grid_str));
            GameKind kind = parse_kind(kind_str);
            SolveOptions opts;
            opts.facelift = facelift_flag;
            ValueSurface surf = solve_game(model, kind, grid, opts);
            write_surface_csv_file((fs::path(out_dir) / "surface.csv").string(), surf);
            json j = config_echo("solve", model_path, grid_str, kind_str);
            j["facelift"] = facelift_flag;
            j["value_at_origin"] = surf.interp(grid.t0, Vec(model.dimension, 0.0));
            CflReport cfl = cfl_certificate(model, grid);
            j["cfl_worst"] = cfl.worst;
            write_json(fs::path(out_dir) / "solve.json", j);
            std::cout << "surface.csv written; value at (t0,0) = "
                      << format_real(j["value_at_origin"].get<double>()) << "\n";
            return 0;
        }

        if (c_facelift->parsed()) {
            auto model = load_model_file(model_path);
            auto grid = make_grid(model, parse_grid(grid_str));
            Vec lifted = facelift_terminal(model, grid, FaceliftOptions{});
            std::ofstream out(fs::path(out_dir) / "facelift.csv", std::ios::binary);
            out << "x1";
            if (grid.dim > 1) out << ",x2";
            out << ",g,lifted\n";
            for (size_t j = 0; j < grid.node_count(); ++j) {
                Vec x = grid.coords(j);
                out << format_real(x[0]);
                if (grid.dim > 1) out << ',' << format_real(x[1]);
                out << ',' << format_real(model.eval_payoff(x)) << ',' << format_real(lifted[j])
                    << "\n";
            }
            std::cout << "facelift.csv written\n";
            return 0;
        }

        if (c_oracle->parsed()) {
            auto model = load_model_file(model_path);
            auto grid = make_grid(model, parse_grid(grid_str));
            ValueSurface surf = oracle_value(model, parse_kind(kind_str), grid);
            write_surface_csv_file((fs::path(out_dir) / "oracle.csv").string(), surf, "oracle");
            std::cout << "oracle.csv written\n";
            return 0;
        }

        if (c_sim->parsed()) {
            auto model = load_model_file(model_path);
            auto grid = make_grid(model, parse_grid(grid_str));
            GameKind kind = parse_kind(kind_str);
            ValueSurface surf = solve_game(model, kind, grid, SolveOptions{});
            PolicyField policy = extract_policy(surf);
            Vec x0 = parse_point(x0_str, model.dimension);
            SimOptions sopts;
            sopts.steps = steps;
            McEstimate est = mc_game_value(model, policy, t0, x0, n_paths, seed, sopts);
            json j = config_echo("simulate", model_path, grid_str, kind_str);
            j["estimate"] = est.estimate;
            j["stderr"] = est.stderr_;
            j["n_paths"] = est.n_paths;
            j["seed"] = est.seed;
            j["steps"] = steps;
            j["x0"] = x0;
            j["t0"] = t0;
            j["solver_value"] = surf.interp(t0, x0);
            write_json(fs::path(out_dir) / "estimate.json", j);
            std::cout << "estimate " << format_real(est.estimate) << " +/- "
                      << format_real(est.stderr_) << "\n";
            return 0;
        }

        if (c_target->parsed()) {
            auto model = load_model_file(model_path);
            auto grid = make_grid(model, parse_grid(grid_str));
            GameKind gk = parse_kind(kind_str);
            TargetKind tk = gk == GameKind::ZeroSum ? TargetKind::Unco : TargetKind::Co;
            ValueSurface surf = solve_game(model, gk, grid, SolveOptions{});
            PolicyField policy = extract_policy(surf);
            MartingaleControl mc = MartingaleControl::from_surface(model, surf, control_index);
            ControlRule rule;
            rule.fixed_control = control_index;
            BisectionConfig cfg;
            cfg.n_paths = n_paths;
            cfg.seed = seed;
            cfg.steps = steps;
            Vec x0 = parse_point(x0_str, model.dimension);
            double est = estimate_target_bound(model, tk, t0, x0, mc, rule, cfg, &policy);
            json j = config_echo("target", model_path, grid_str, kind_str);
            j["estimate"] = est;
            j["n_paths"] = cfg.n_paths;
            j["seed"] = cfg.seed;
            j["steps"] = steps;
            j["x0"] = x0;
            j["t0"] = t0;
            j["admissibility_K"] = mc.admissibility_K;
            j["solver_value"] = surf.interp(t0, x0);
            write_json(fs::path(out_dir) / "target.json", j);
            std::cout << "target bound " << format_real(est) << "\n";
            return 0;
        }

        if (c_compare->parsed()) {
            ValueSurface a = read_surface_csv_file(file_a);
            ValueSurface b = read_surface_csv_file(file_b);
            if (a.grid.node_count() != b.grid.node_count() || a.grid.nt != b.grid.nt)
                throw ParseError("compare: surfaces live on different grids");
            double sup = 0;
            std::ofstream diff(fs::path(out_dir) / "diff.csv", std::ios::binary);
            diff << "t";
            for (int ax = 0; ax < a.grid.dim; ++ax) diff << ",x" << (ax + 1);
            diff << ",a,b,abs_diff\n";
            for (int k = 0; k <= a.grid.nt; ++k)
                for (size_t j = 0; j < a.grid.node_count(); ++j) {
                    double d = std::abs(a.values[k][j] - b.values[k][j]);
                    sup = std::max(sup, d);
                    diff << format_real(a.grid.time_at(k));
                    Vec x = a.grid.coords(j);
                    for (int ax = 0; ax < a.grid.dim; ++ax) diff << ',' << format_real(x[ax]);
                    diff << ',' << format_real(a.values[k][j]) << ','
                         << format_real(b.values[k][j]) << ',' << format_real(d) << "\n";
                }
            json j;
            j["version"] = kVersion;
            j["command"] = "compare";
            j["a"] = file_a;
            j["b"] = file_b;
            j["sup_norm"] = sup;
            j["tol"] = tol;
            if (!model_path.empty()) {
                auto model = load_model_file(model_path);
                EnvelopePair env = build_envelopes(model);
                auto ra = check_envelope_bounds(a, env);
                auto rb = check_envelope_bounds(b, env);
                j["envelope"] = {{"a_ok", ra.ok},
                                 {"b_ok", rb.ok},
                                 {"a_violations", ra.violations},
                                 {"b_violations", rb.violations}};
            }
            write_json(fs::path(out_dir) / "compare.json", j);
            std::cout << "sup-norm " << format_real(sup) << " (tol " << format_real(tol) << ")\n";
            return sup <= tol ? 0 : 2;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
