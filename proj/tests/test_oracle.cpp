#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "jumpstop/chain_oracle.hpp"
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

TEST_CASE("chain rows are probability distributions") {
    auto m = load_model_file(model_path("diffusion_drift.json"));
    auto g = grid_1d(81, 400, -2, 2);
    auto ck = build_chain(m, g);
    for (int u = 0; u < m.controls.size(); ++u)
        for (size_t j = 0; j < g.node_count(); ++j) {
            double total = 0;
            for (const auto& e : ck.transitions[u][j]) {
                CHECK(e.p >= -1e-15);
                total += e.p;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("chain is locally consistent with the diffusion") {
    auto m = load_model_file(model_path("diffusion_drift.json"));
    auto g = grid_1d(81, 400, -2, 2);
    auto ck = build_chain(m, g);
    double dt = g.dt();
    // interior node, control u = 1: mean ~ mu dt, variance ~ sigma^2 dt
    size_t j = 40;
    CHECK(ck.step_mean(2, j, 0) == doctest::Approx(1.0 * dt).epsilon(1e-10));
    double var = ck.step_variance(2, j, 0);
    // trinomial variance carries an O(dx) upwind correction: sigma^2 dt + |mu| dx dt - (mu dt)^2
    double want = 0.16 * dt + 1.0 * g.dx(0) * dt - dt * dt;
    CHECK(var == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("chain construction rejects CFL breaches") {
    auto m = load_model_file(model_path("diffusion_drift.json"));
    auto g = grid_1d(401, 20, -2, 2);
    CHECK_THROWS_AS((void)build_chain(m, g), InvariantError);
}

TEST_CASE("single-control game equals its Snell envelope") {
    auto m = load_model_file(model_path("single_control_diffusion.json"));
    auto g = grid_1d(61, 300, -2, 2);
    auto zs = oracle_value(m, GameKind::ZeroSum, g);
    auto co = oracle_value(m, GameKind::Cooperative, g);
    auto sn = snell_value(m, g, 0);
    for (int k = 0; k <= g.nt; ++k)
        for (size_t j = 0; j < g.node_count(); ++j) {
            CHECK(zs.values[k][j] == co.values[k][j]);
            CHECK(zs.values[k][j] == sn.values[k][j]);
        }
}

TEST_CASE("snell_value rejects out-of-range control indices") {
    auto m = load_model_file(model_path("single_control_diffusion.json"));
    auto g = grid_1d(21, 50, -1, 1);
    CHECK_THROWS_AS((void)snell_value(m, g, 5), InvariantError);
    CHECK_THROWS_AS((void)snell_value(m, g, -1), InvariantError);
}

TEST_CASE("oracle and solver agree on shared grids") {
    for (const char* name : {"diffusion_drift.json", "drift_game.json"}) {
        auto m = load_model_file(model_path(name));
        auto g = grid_1d(81, 400, -2, 2);
        for (GameKind kind : {GameKind::ZeroSum, GameKind::Cooperative}) {
            auto a = solve_game(m, kind, g);
            auto b = oracle_value(m, kind, g);
            double sup = 0;
            for (int k = 0; k <= g.nt; ++k)
                for (size_t j = 0; j < g.node_count(); ++j)
                    sup = std::max(sup, std::abs(a.values[k][j] - b.values[k][j]));
            CHECK(sup <= 5e-2);
        }
    }
}

TEST_CASE("pure-jump chain reproduces the Poisson benchmark") {
    auto m = load_model_file(model_path("poisson_jump.json"));
    auto g = grid_1d(161, 800, -1, 3);
    auto surf = oracle_value(m, GameKind::ZeroSum, g);
    size_t j0 = surf.nearest_node({0.0});
    CHECK(surf.values[0][j0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(2e-2));
}

TEST_CASE("oracle obstacle binding sets the stop flag") {
    auto m = load_model_file(model_path("drift_game.json"));
    auto g = grid_1d(81, 200, -2, 2);
    auto surf = oracle_value(m, GameKind::ZeroSum, g);
    for (int k = 0; k <= g.nt; ++k)
        for (size_t j = 0; j < g.node_count(); ++j) {
            double gj = m.eval_payoff(g.coords(j));
            if (surf.stop[k][j]) CHECK(surf.values[k][j] == gj);
            CHECK(surf.values[k][j] >= gj - 1e-12);
        }
}
