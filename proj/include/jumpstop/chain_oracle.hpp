#pragma once

#include "jumpstop/grid.hpp"
#include "jumpstop/hamiltonians.hpp"

namespace jumpstop {

/// Locally consistent controlled Markov chain on a SolverGrid: per (node,
/// control) a sparse successor distribution for one time step.
struct ChainKernel {
    SolverGrid grid;
    struct Entry {
        int32_t node;
        double p;
    };
    // transitions[control][node] = successor list (includes the self loop)
    std::vector<std::vector<std::vector<Entry>>> transitions;

    double step_mean(int control, size_t node, int axis) const;
    double step_variance(int control, size_t node, int axis) const;
};

/// Trinomial + jump-branch kernel matching the solver's discretization
/// (upwind drift, centered diffusion, weight*dt jump branches, clamped box).
/// Throws on a CFL breach (negative stay probability).
ChainKernel build_chain(const ControlledJumpModel& model, const SolverGrid& grid);

/// Exhaustive backward induction V_k = max(g, opt_u sum p V_{k+1});
/// opt = min for zero-sum, max for cooperative. Bit-deterministic.
ValueSurface oracle_value(const ControlledJumpModel& model, GameKind kind, const SolverGrid& grid);

/// Discrete Snell envelope under a fixed control: V_k = max(g, sum p V_{k+1}).
ValueSurface snell_value(const ControlledJumpModel& model, const SolverGrid& grid,
                         int control_index);

}  // namespace jumpstop
