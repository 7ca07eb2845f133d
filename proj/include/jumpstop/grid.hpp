#pragma once

#include <array>
#include <cstdint>

#include "jumpstop/model.hpp"

namespace jumpstop {

/// Uniform tensor grid on [t0, horizon] x [lo, hi]^dim, dim in {1, 2}.
/// Spatial boundary rule: constant extrapolation (clamped indices).
struct SolverGrid {
    int dim = 1;
    int nt = 100;  // time steps; slices 0..nt
    double t0 = 0.0;
    double horizon = 1.0;
    std::array<double, 2> lo{-1.0, -1.0};
    std::array<double, 2> hi{1.0, 1.0};
    std::array<int, 2> nodes{101, 1};  // node counts per axis

    double dt() const { return (horizon - t0) / nt; }
    double dx(int axis) const {
        return nodes[axis] > 1 ? (hi[axis] - lo[axis]) / (nodes[axis] - 1) : 1.0;
    }
    size_t node_count() const {
        return static_cast<size_t>(nodes[0]) * (dim > 1 ? nodes[1] : 1);
    }
    double time_at(int k) const { return t0 + k * dt(); }
    double coord(int axis, int i) const { return lo[axis] + i * dx(axis); }
    size_t index(int i0, int i1 = 0) const {
        return dim > 1 ? static_cast<size_t>(i0) * nodes[1] + i1 : static_cast<size_t>(i0);
    }
    Vec coords(size_t idx) const {
        if (dim == 1) return {coord(0, static_cast<int>(idx))};
        int i0 = static_cast<int>(idx) / nodes[1];
        int i1 = static_cast<int>(idx) % nodes[1];
        return {coord(0, i0), coord(1, i1)};
    }
};

struct CflReport {
    bool ok = false;
    double worst = 0;  // max of dt * (sig^2/dx^2 + |mu|/dx + mass); must be <= 1
};

CflReport cfl_certificate(const ControlledJumpModel& model, const SolverGrid& grid);

/// Multilinear interpolation footprint of an off-grid point (clamped to the
/// box, so constant extrapolation outside). Weights are nonnegative and sum
/// to 1, preserving scheme monotonicity.
struct InterpStencil {
    int count = 0;
    int idx[4] = {0, 0, 0, 0};
    double w[4] = {0, 0, 0, 0};
};

InterpStencil interp_stencil(const SolverGrid& grid, const Vec& x);

/// Per-control coefficient tables on the grid, shared by the finite-difference
/// scheme and the chain construction. Coefficient families carry no time
/// dependence, so the tables are built once per solve.
struct ControlTables {
    std::array<Vec, 2> mu;         // [axis][node]
    std::array<Vec, 2> half_sig2;  // [axis][node], 0.5 * sigma_aa^2
    struct JumpColumn {
        double weight;                       // atom weight
        std::vector<InterpStencil> target;   // per node: footprint of x + beta
    };
    std::vector<JumpColumn> jumps;  // over marks.flat()
};

std::vector<ControlTables> build_control_tables(const ControlledJumpModel& model,
                                                const SolverGrid& grid);

/// Value + policy surface on a SolverGrid. Slice nt is the terminal slice.
struct ValueSurface {
    SolverGrid grid;
    std::vector<Vec> values;                   // [slice][node]
    std::vector<std::vector<int32_t>> argopt;  // [slice][node]
    std::vector<std::vector<uint8_t>> stop;    // [slice][node]

    double at(int slice, size_t node) const { return values[slice][node]; }
    /// Nearest-node lookup in time, multilinear in space.
    double interp(double t, const Vec& x) const;
    int nearest_slice(double t) const;
    size_t nearest_node(const Vec& x) const;
};

/// Deterministic feedback map extracted from a surface.
struct PolicyField {
    ValueSurface surface;
    struct Action {
        int control_index;
        bool stop;
    };
    Action at(double t, const Vec& x) const {
        int k = surface.nearest_slice(t);
        size_t j = surface.nearest_node(x);
        return {surface.argopt[k][j], surface.stop[k][j] != 0};
    }
};

PolicyField extract_policy(const ValueSurface& surface);

}  // namespace jumpstop
