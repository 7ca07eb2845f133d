#pragma once

#include "jumpstop/envelopes.hpp"
#include "jumpstop/grid.hpp"
#include "jumpstop/hamiltonians.hpp"

namespace jumpstop {

/// Auxiliary boundary operator G for the terminal face-lift problem
/// min{phi - g, G phi} = 0. Constant 1 is the bounded-control default.
struct AuxGSpec {
    enum class Family { Constant, Affine } family = Family::Constant;
    double c = 1.0;          // constant value
    double a = 0, bias = 0;  // affine: G phi = a*phi + bias

    double eval(double phi) const { return family == Family::Constant ? c : a * phi + bias; }
};

struct FaceliftOptions {
    AuxGSpec gspec;
    double damping = 0.5;
    double tol = 1e-12;
    int max_iterations = 10000;
};

/// Solves min{phi - g, G phi} = 0 nodewise by damped fixed-point iteration;
/// returns the lifted terminal profile (>= g). Throws on non-convergence.
Vec facelift_terminal(const ControlledJumpModel& model, const SolverGrid& grid,
                      const FaceliftOptions& opts = {});

struct SolveOptions {
    bool facelift = false;  // cooperative terminal lift (identity under G == 1)
    FaceliftOptions facelift_opts;
};

/// Explicit monotone scheme for the obstacle PIDE
///   min{phi - g, -d_t phi + H phi} = 0   (zero-sum, H = sup_u)
///   min{phi - g, -d_t phi + F phi} = 0   (cooperative, F = inf_u)
/// Backward marching with upwind drift, centered diffusion, exact atomic jump
/// quadrature, obstacle applied after the continuation step. Requires the CFL
/// certificate.
ValueSurface solve_game(const ControlledJumpModel& model, GameKind kind, const SolverGrid& grid,
                        const SolveOptions& opts = {});

struct EnvelopeBoundReport {
    bool ok = true;
    double worst_upper_margin = std::numeric_limits<double>::infinity();  // min of w+ - V
    double worst_lower_margin = std::numeric_limits<double>::infinity();  // min of V - w-
    size_t violations = 0;
};

EnvelopeBoundReport check_envelope_bounds(const ValueSurface& surface, const EnvelopePair& env);

}  // namespace jumpstop
