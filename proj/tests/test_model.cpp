#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jumpstop/model.hpp"
#include "test_support.hpp"

using namespace jumpstop;

TEST_CASE("canned models load and validate") {
    for (const char* name : {"drift_game.json", "diffusion_drift.json", "poisson_jump.json",
                             "single_control_diffusion.json"}) {
        auto m = load_model_file(model_path(name));
        CHECK(m.dimension == 1);
        CHECK(m.horizon == 1.0);
        auto rep = validate_assumptions(m, default_probes(m));
        CHECK_MESSAGE(rep.all_passed(), name, ": ", rep.to_string());
    }
}

TEST_CASE("payoff families evaluate as documented") {
    auto m = load_model_file(model_path("drift_game.json"));
    CHECK(m.eval_payoff({0.0}) == 1.0);
    CHECK(m.eval_payoff({0.5}) == 0.5);
    CHECK(m.eval_payoff({2.0}) == 0.0);
    CHECK(m.eval_payoff({-0.25}) == 0.75);

    auto p = load_model_file(model_path("poisson_jump.json"));
    CHECK(p.eval_payoff({-0.5}) == 0.0);
    CHECK(p.eval_payoff({0.25}) == 0.25);
    CHECK(p.eval_payoff({1.5}) == 1.0);
}

TEST_CASE("model emit/load round trip is stable") {
    auto m = load_model_file(model_path("poisson_jump.json"));
    std::string doc1 = emit_model(m);
    auto m2 = load_model(doc1);
    std::string doc2 = emit_model(m2);
    CHECK(doc1 == doc2);
    CHECK(m2.marks.total_mass() == m.marks.total_mass());
    CHECK(m2.beta.s[0][0] == 1.0);
}

TEST_CASE("negative atom weight is rejected") {
    auto m = load_model_file(model_path("poisson_jump.json"));
    m.marks.atoms[0][0].weight = -1.0;
    CHECK_THROWS_AS((void)load_model(emit_model(m)), InvariantError);
}

TEST_CASE("duplicate control points are rejected") {
    auto m = load_model_file(model_path("drift_game.json"));
    m.controls.points.push_back({0.0});
    CHECK_THROWS_AS((void)load_model(emit_model(m)), InvariantError);
}

TEST_CASE("payoff above its declared sup bound is rejected") {
    auto m = load_model_file(model_path("drift_game.json"));
    m.payoff.sup_bound = 0.5;  // peak reaches 1 at the center
    CHECK_THROWS_AS((void)load_model(emit_model(m)), InvariantError);
}

TEST_CASE("eval_coefficients rejects off-grid controls") {
    auto m = load_model_file(model_path("drift_game.json"));
    CHECK_THROWS_WITH_AS((void)eval_coefficients(m, 0.0, {0.0}, {0.5}), "control not in grid",
                         InvariantError);
    auto tr = eval_coefficients(m, 0.0, {0.25}, {1.0});
    CHECK(tr.mu[0] == 1.0);
    CHECK(tr.sigma(0, 0) == 0.0);
    CHECK(tr.beta_per_atom.empty());
}

TEST_CASE("mark measure flat view and mass") {
    MarkMeasure mm;
    mm.atoms = {{{1.0, 0.25}, {2.0, 0.75}}, {{-1.0, 0.5}}};
    CHECK(mm.mark_count() == 2);
    CHECK(mm.total_mass() == doctest::Approx(1.5).epsilon(1e-15));
    auto flat = mm.flat();
    REQUIRE(flat.size() == 3);
    CHECK(flat[0].mark == 0);
    CHECK(flat[2].mark == 1);
    CHECK(flat[2].e == -1.0);
}

TEST_CASE("tabulated coefficient interpolates linearly") {
    CoeffSpec cs;
    cs.family = CoeffFamily::Tabulated;
    cs.out_dim = 1;
    cs.table_x = {0.0, 1.0, 2.0};
    cs.table_v = {{0.0}, {2.0}, {2.0}};
    CHECK(cs.eval(0, {0.5}, {})[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cs.eval(0, {1.0}, {})[0] == 2.0);
    CHECK(cs.eval(0, {-3.0}, {})[0] == 0.0);  // clamped
    CHECK(cs.eval(0, {9.0}, {})[0] == 2.0);
}

TEST_CASE("parse failures raise ParseError") {
    CHECK_THROWS_AS((void)load_model("{not json"), ParseError);
    CHECK_THROWS_AS((void)load_model("{\"dimension\": 1}"), ParseError);
    CHECK_THROWS_AS((void)load_model_file("/nonexistent/model.json"), ParseError);
}
