#include "jumpstop/envelopes.hpp"

#include <cmath>
#include <limits>

namespace jumpstop {

namespace {
constexpr double kMinGrowth = 1e-6;
}

bool verify_neutral_control(const ControlledJumpModel& model) {
    if (model.game_embedding) return true;  // (alpha, gamma) include zero
    if (!model.target_mode()) throw InvariantError("verify_neutral_control: not a target-mode model");
    auto flat = model.marks.flat();
    for (int k = 0; k < model.controls.size(); ++k) {
        const Vec& u = model.controls.points[k];
        // probe a few state points; coefficient families are state-affine so a
        // handful of probes decides exactly for the supported families
        bool ok = true;
        for (double xv : {-2.0, 0.0, 2.0}) {
            Vec x(model.dimension, xv);
            for (double y : {-1.0, 0.0, 1.0}) {
                Vec sy = model.eval_sigma_y(0.0, x, y, u);
                if (norm2(sy) != 0.0) ok = false;
                for (size_t a = 0; a < flat.size() && ok; ++a) {
                    if (flat[a].weight <= 0) continue;  // a.s. convention
                    Vec bv = model.eval_b(0.0, x, y, u, flat[a].e);
                    if (!model.controls.u2.empty()) {
                        double add = model.controls.u2[k][a];
                        for (double& v : bv) v += add;
                    }
                    for (double v : bv)
                        if (v != 0.0) ok = false;
                }
                if (!ok) break;
            }
            if (!ok) break;
        }
        if (ok) return true;
    }
    return false;
}

EnvelopePair build_envelopes(const ControlledJumpModel& model, double L, double C) {
    if (!(L > 0) || !(C > 0)) throw InvariantError("build_envelopes: L and C must be positive");
    if (model.target_mode() && !verify_neutral_control(model))
        throw InvariantError("build_envelopes: no neutral control u0 in the grid");
    EnvelopePair env;
    env.L = std::max(L, kMinGrowth);
    env.C = C;
    env.g_sup = model.payoff.sup_bound;
    double T = model.horizon;
    env.k_plus = 2 * env.L;
    env.gamma_plus = env.g_sup + std::exp(env.k_plus * T);
    env.k_minus = 2 * env.C;
    env.gamma_minus =
        std::nextafter(env.g_sup + std::exp(env.k_minus * T), std::numeric_limits<double>::max());
    return env;
}

EnvelopePair build_envelopes(const ControlledJumpModel& model) {
    double L = std::max(model.declared_growth_L, kMinGrowth);
    return build_envelopes(model, L, L);
}

}  // namespace jumpstop
