#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "jumpstop/path_sim.hpp"
#include "jumpstop/pide_solver.hpp"
#include "test_support.hpp"

using namespace jumpstop;

namespace {

SolverGrid grid_1d(int nx, int nt, double lo, double hi) {
    SolverGrid g;
    g.dim = 1;
    g.nt = nt;
    g.horizon = 1.0;
    g.lo = {lo, lo};
    g.hi = {hi, hi};
    g.nodes = {nx, 1};
    return g;
}

}  // namespace

TEST_CASE("paths are reproducible per seed") {
    auto m = load_model_file(model_path("diffusion_drift.json"));
    ControlRule rule;
    rule.fixed_control = 2;
    SimOptions opts;
    opts.steps = 50;
    auto a = simulate_path(m, rule, 0.0, {0.0}, 42, opts);
    auto b = simulate_path(m, rule, 0.0, {0.0}, 42, opts);
    auto c = simulate_path(m, rule, 0.0, {0.0}, 43, opts);
    REQUIRE(a.states.size() == b.states.size());
    bool differs = false;
    for (size_t k = 0; k < a.states.size(); ++k) {
        CHECK(a.states[k][0] == b.states[k][0]);
        if (a.states[k][0] != c.states[k][0]) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("deterministic drift integrates exactly") {
    auto m = load_model_file(model_path("drift_game.json"));  // dX = u dt, no noise
    ControlRule rule;
    rule.fixed_control = 2;  // u = 1
    SimOptions opts;
    opts.steps = 100;
    auto path = simulate_path(m, rule, 0.0, {0.25}, 7, opts);
    CHECK(path.states.back()[0] == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(path.jumps.empty());
    CHECK(path.y.empty());  // no martingale requested
}

TEST_CASE("jump arrivals match the atom intensity") {
    auto m = load_model_file(model_path("poisson_jump.json"));
    ControlRule rule;
    rule.fixed_control = 0;
    SimOptions opts;
    opts.steps = 400;
    size_t total = 0;
    const int n = 4000;
    for (int p = 0; p < n; ++p) total += simulate_path(m, rule, 0.0, {0.0}, 100 + p, opts).jumps.size();
    double mean = static_cast<double>(total) / n;
    // unit intensity over a unit horizon; Bernoulli thinning bias is O(dt)
    CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("simulate_path rejects too-coarse jump steps") {
    auto m = load_model_file(model_path("poisson_jump.json"));
    m.marks.atoms[0][0].weight = 500.0;
    ControlRule rule;
    SimOptions opts;
    opts.steps = 100;  // mass * dt = 5 >= 1
    CHECK_THROWS_AS((void)simulate_path(m, rule, 0.0, {0.0}, 1, opts), InvariantError);
}

TEST_CASE("Monte Carlo value tracks the solver on the jump benchmark") {
    auto m = load_model_file(model_path("poisson_jump.json"));
    auto g = grid_1d(161, 800, -1, 3);
    auto surf = solve_game(m, GameKind::ZeroSum, g);
    auto policy = extract_policy(surf);
    SimOptions opts;
    opts.steps = 400;
    auto est = mc_game_value(m, policy, 0.0, {0.0}, 20000, 11, opts);
    CHECK(est.n_paths == 20000);
    CHECK(est.stderr_ > 0);
    double analytic = 1.0 - std::exp(-1.0);
    CHECK(std::abs(est.estimate - analytic) <= 3 * est.stderr_ + 5e-3);

    auto est2 = mc_game_value(m, policy, 0.0, {0.0}, 20000, 11, opts);
    CHECK(est2.estimate == est.estimate);  // bit-reproducible reduction
}

TEST_CASE("surface-derived martingale control is compensated") {
    auto m = load_model_file(model_path("single_control_diffusion.json"));
    auto g = grid_1d(121, 500, -3, 3);
    auto surf = solve_game(m, GameKind::ZeroSum, g);
    auto mc = MartingaleControl::from_surface(m, surf, 0);
    CHECK(mc.admissibility_K > 2 * m.payoff.sup_bound);
    ControlRule rule;
    SimOptions opts;
    opts.steps = 100;
    const int n = 2000;
    std::vector<double> terminal(n);
    for (int p = 0; p < n; ++p) {
        auto path = simulate_path(m, rule, 0.0, {0.5}, 500 + p, opts, &mc, 0.0);
        REQUIRE(path.y.size() == path.times.size());
        terminal[p] = path.y.back();
    }
    double mean = pairwise_sum(terminal.data(), n) / n;
    double var = 0;
    for (double v : terminal) var += (v - mean) * (v - mean);
    double se = std::sqrt(var / (n - 1.0) / n);
    CHECK(std::abs(mean) <= 4 * se + 1e-3);  // E[Y_T] = y0 = 0 up to discretization
}

TEST_CASE("admissibility report bounds the single-event transfers") {
    auto m = load_model_file(model_path("poisson_jump.json"));
    auto g = grid_1d(161, 800, -1, 3);
    auto surf = solve_game(m, GameKind::ZeroSum, g);
    auto mc = MartingaleControl::from_surface(m, surf, 0);
    std::vector<Vec> probes{{-0.5}, {0.0}, {0.5}, {1.5}};
    auto unco = check_admissibility(m, mc, TargetKind::Unco, probes, {0.0, 0.5, 1.0});
    CHECK(unco.holds);  // value jumps upward across the payoff kink: worst >= 0 > -K
    CHECK(unco.worst >= -unco.bound);
    auto co = check_admissibility(m, mc, TargetKind::Co, probes, {0.0, 0.5, 1.0});
    CHECK(co.holds);  // jumps are capped by the value oscillation, well under K
    CHECK(co.worst <= co.bound);
}

TEST_CASE("target bounds bracket the game value") {
    auto m = load_model_file(model_path("single_control_diffusion.json"));
    auto g = grid_1d(121, 500, -3, 3);
    auto surf = solve_game(m, GameKind::ZeroSum, g);
    auto policy = extract_policy(surf);
    auto mc = MartingaleControl::from_surface(m, surf, 0);
    ControlRule rule;
    BisectionConfig cfg;
    cfg.n_paths = 1000;
    cfg.seed = 9;
    cfg.steps = 100;
    double v = surf.interp(0.0, {0.5});
    double upper = estimate_target_bound(m, TargetKind::Unco, 0.0, {0.5}, mc, rule, cfg, &policy);
    double lower = estimate_target_bound(m, TargetKind::Co, 0.0, {0.5}, mc, rule, cfg, &policy);
    CHECK(lower <= upper + 1e-9);
    CHECK(std::abs(upper - v) <= 0.1);
    CHECK(std::abs(lower - v) <= 0.1);

    // dropping a stopping rule weakens the almost-sure constraint set
    double upper_fewer =
        estimate_target_bound(m, TargetKind::Unco, 0.0, {0.5}, mc, rule, cfg, nullptr);
    CHECK(upper_fewer <= upper + 1e-9);
}
