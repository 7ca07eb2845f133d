#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "jumpstop/envelopes.hpp"
#include "test_support.hpp"

using namespace jumpstop;

namespace {

const char* kTargetDoc = R"({
  "dimension": 1, "horizon": 1.0,
  "coefficients": {
    "mu_x": {"family": "constant", "params": {"value": [0.0]}},
    "sigma_x": {"family": "constant", "params": {"value": [1.0]}},
    "beta": {"family": "scaled_mark", "params": {"scale": [[1.0]], "offset": [[0.0]]}},
    "mu_y": {"family": "affine_in_x", "params": {"const": [0.0], "u_coef": [[1.0]]}},
    "sigma_y": {"family": "affine_in_x", "params": {"const": [0.0], "u_coef": [[1.0]]}},
    "b": {"family": "constant", "params": {"value": [0.0]}}
  },
  "marks": [{"atoms": [[0.5, 1.0]]}],
  "controls": {"points": [[-1.0], [0.0], [1.0]]},
  "payoff": {"family": "peak", "params": {"height": 1.0, "center": [0.0]}, "sup_bound": 1.0},
  "growth_L": 2.0
})";

}  // namespace

TEST_CASE("envelope constants follow the minimal-slack recipe") {
    auto m = load_model_file(model_path("diffusion_drift.json"));
    double L = 1.5, C = 2.0;
    auto env = build_envelopes(m, L, C);
    CHECK(env.k_plus == 2 * L);
    CHECK(env.gamma_plus == 1.0 + std::exp(2 * L * m.horizon));
    CHECK(env.k_minus == 2 * C);
    CHECK(env.gamma_minus > 1.0 + std::exp(2 * C * m.horizon));  // strict by one ulp
    CHECK(env.gamma_minus ==
          std::nextafter(1.0 + std::exp(2 * C * m.horizon), std::numeric_limits<double>::max()));
}

TEST_CASE("envelopes bracket the payoff band on the whole horizon") {
    auto m = load_model_file(model_path("drift_game.json"));
    auto env = build_envelopes(m);
    double gs = m.payoff.sup_bound;
    for (int k = 0; k <= 20; ++k) {
        double t = m.horizon * k / 20.0;
        CHECK(env.upper(t) >= gs);
        CHECK(env.lower(t) <= -gs);
        if (k > 0) {
            // strict monotonicity: the bound tightens toward the horizon
            double tp = m.horizon * (k - 1) / 20.0;
            CHECK(env.upper(t) < env.upper(tp));
            CHECK(env.lower(t) > env.lower(tp));
        }
    }
    // minimal slack: at the horizon the upper bound touches the payoff band
    CHECK(env.upper(m.horizon) == doctest::Approx(gs).epsilon(1e-14));
}

TEST_CASE("non-positive growth constants are rejected") {
    auto m = load_model_file(model_path("drift_game.json"));
    CHECK_THROWS_AS((void)build_envelopes(m, 0.0, 1.0), InvariantError);
    CHECK_THROWS_AS((void)build_envelopes(m, 1.0, -2.0), InvariantError);
}

TEST_CASE("neutral control detection") {
    auto m = load_model(kTargetDoc);
    CHECK(verify_neutral_control(m));  // u = 0 zeroes sigma_Y and b

    auto no_zero = load_model(kTargetDoc);
    no_zero.controls.points = {{-1.0}, {1.0}};
    CHECK_FALSE(verify_neutral_control(no_zero));

    auto embedded = load_model(kTargetDoc);
    embedded.game_embedding = true;
    embedded.controls.points = {{-1.0}, {1.0}};
    CHECK(verify_neutral_control(embedded));  // unconstrained controls include zero

    auto game_only = load_model_file(model_path("drift_game.json"));
    CHECK_THROWS_AS((void)verify_neutral_control(game_only), InvariantError);
}

TEST_CASE("target-mode envelopes require a neutral control") {
    auto m = load_model(kTargetDoc);
    CHECK_NOTHROW((void)build_envelopes(m));
    m.controls.points = {{-1.0}, {1.0}};
    CHECK_THROWS_AS((void)build_envelopes(m), InvariantError);
}

TEST_CASE("zero-weight atoms do not block neutrality") {
    auto m = load_model(kTargetDoc);
    // an extra null atom with a transfer that never fires
    m.marks.atoms[0].push_back({3.0, 0.0});
    m.controls.u2 = {{0.0, 5.0}, {0.0, 5.0}, {0.0, 5.0}};  // nonzero only on the null atom
    CHECK(verify_neutral_control(m));
}
