#pragma once

#include "jumpstop/model.hpp"

namespace jumpstop {

/// Analytic a-priori bounds: w+(t,x) = gamma_plus - e^{k_plus t} dominates
/// every game value, w-(t,x) = e^{k_minus t} - gamma_minus lies below it.
struct EnvelopePair {
    double k_plus = 0, gamma_plus = 0;
    double k_minus = 0, gamma_minus = 0;
    double L = 0, C = 0, g_sup = 0;

    double upper(double t, const Vec& /*x*/ = {}) const { return gamma_plus - std::exp(k_plus * t); }
    double lower(double t, const Vec& /*x*/ = {}) const { return std::exp(k_minus * t) - gamma_minus; }
};

/// Minimal-slack constants: k+ = 2L, gamma+ = g_sup + e^{2LT};
/// k- = 2C, gamma- = g_sup + e^{2CT} + ulp. L is floored at 1e-6 so the
/// monotonicity of the bounds survives the pure-game degenerate case.
EnvelopePair build_envelopes(const ControlledJumpModel& model, double L, double C);
/// Convenience: L = C = the model's declared growth constant (floored).
EnvelopePair build_envelopes(const ControlledJumpModel& model);

/// True iff some grid control zeroes sigma_Y and every positive-weight atom's b.
bool verify_neutral_control(const ControlledJumpModel& model);

}  // namespace jumpstop
