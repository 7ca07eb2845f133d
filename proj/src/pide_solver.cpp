#include "jumpstop/pide_solver.hpp"

#include <cmath>
#include <sstream>

#include "jumpstop/kernels.hpp"

namespace jumpstop {

Vec facelift_terminal(const ControlledJumpModel& model, const SolverGrid& grid,
                      const FaceliftOptions& opts) {
    size_t n = grid.node_count();
    Vec g(n);
    for (size_t j = 0; j < n; ++j) g[j] = model.eval_payoff(grid.coords(j));
    Vec phi = g;
    double residual = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        residual = 0;
        for (size_t j = 0; j < n; ++j) {
            double r = std::min(phi[j] - g[j], opts.gspec.eval(phi[j]));
            residual = std::max(residual, std::abs(r));
            phi[j] -= opts.damping * r;
        }
        if (residual <= opts.tol) return phi;
    }
    std::ostringstream os;
    os << "facelift_terminal: no convergence, residual " << residual << " after "
       << opts.max_iterations << " iterations";
    throw InvariantError(os.str());
}

namespace {

// Continuation rate for one control at one node, generic dimension.
double node_rate(const SolverGrid& grid, const ControlTables& tb, const Vec& v, size_t j) {
    double rate = 0;
    std::array<int, 2> ij{static_cast<int>(j), 0};
    if (grid.dim == 2) {
        ij[0] = static_cast<int>(j) / grid.nodes[1];
        ij[1] = static_cast<int>(j) % grid.nodes[1];
    }
    for (int a = 0; a < grid.dim; ++a) {
        size_t stride = (grid.dim == 2 && a == 0) ? static_cast<size_t>(grid.nodes[1]) : 1;
        double vj = v[j];
        double vp = ij[a] + 1 < grid.nodes[a] ? v[j + stride] : vj;  // clamped
        double vm = ij[a] > 0 ? v[j - stride] : vj;
        double m = tb.mu[a][j];
        double mp = m > 0 ? m : 0.0;
        double mm = m < 0 ? -m : 0.0;
        double inv_dx = 1.0 / grid.dx(a);
        double up = vp - vj;
        double dn = vj - vm;
        rate += mp * up * inv_dx - mm * dn * inv_dx +
                tb.half_sig2[a][j] * (up - dn) * inv_dx * inv_dx;
    }
    for (const auto& jc : tb.jumps) {
        const InterpStencil& st = jc.target[j];
        double shifted = 0;
        for (int c = 0; c < st.count; ++c) shifted += st.w[c] * v[st.idx[c]];
        rate += jc.weight * (shifted - v[j]);
    }
    return rate;
}

void add_jumps(const ControlTables& tb, const Vec& v, Vec& rate) {
    size_t n = v.size();
    for (const auto& jc : tb.jumps) {
        for (size_t j = 0; j < n; ++j) {
            const InterpStencil& st = jc.target[j];
            double shifted = 0;
            for (int c = 0; c < st.count; ++c) shifted += st.w[c] * v[st.idx[c]];
            rate[j] += jc.weight * (shifted - v[j]);
        }
    }
}

}  // namespace

ValueSurface solve_game(const ControlledJumpModel& model, GameKind kind, const SolverGrid& grid,
                        const SolveOptions& opts) {
    CflReport cfl = cfl_certificate(model, grid);
    if (!cfl.ok) {
        std::ostringstream os;
        os << "solve_game: CFL certificate violated (worst " << cfl.worst << " > 1)";
        throw InvariantError(os.str());
    }
    size_t n = grid.node_count();
    Vec g(n);
    for (size_t j = 0; j < n; ++j) g[j] = model.eval_payoff(grid.coords(j));

    Vec terminal = g;
    if (opts.facelift && kind == GameKind::Cooperative)
        terminal = facelift_terminal(model, grid, opts.facelift_opts);

    auto tables = build_control_tables(model, grid);
    const auto& ker = kernels::active();
    const int nu = model.controls.size();
    const double dt = grid.dt();

    ValueSurface surf;
    surf.grid = grid;
    surf.values.assign(grid.nt + 1, Vec(n));
    surf.argopt.assign(grid.nt + 1, std::vector<int32_t>(n, 0));
    surf.stop.assign(grid.nt + 1, std::vector<uint8_t>(n, 1));
    surf.values[grid.nt] = terminal;

    Vec rate(n), cand(n), best(n);
    std::vector<int32_t> arg(n);
    for (int k = grid.nt - 1; k >= 0; --k) {
        const Vec& v = surf.values[k + 1];
        for (int u = 0; u < nu; ++u) {
            const ControlTables& tb = tables[u];
            if (grid.dim == 1 && n >= 3) {
                double inv_dx = 1.0 / grid.dx(0);
                ker.drift_diffusion(v.data(), tb.mu[0].data(), tb.half_sig2[0].data(), inv_dx,
                                    inv_dx * inv_dx, rate.data(), n);
                // clamped boundary nodes
                {
                    double m = tb.mu[0][0];
                    double mp = m > 0 ? m : 0.0;
                    double up = v[1] - v[0];
                    rate[0] = mp * up * inv_dx + tb.half_sig2[0][0] * up * inv_dx * inv_dx;
                    m = tb.mu[0][n - 1];
                    double mm = m < 0 ? -m : 0.0;
                    double dn = v[n - 1] - v[n - 2];
                    rate[n - 1] =
                        -mm * dn * inv_dx + tb.half_sig2[0][n - 1] * (-dn) * inv_dx * inv_dx;
                }
                add_jumps(tb, v, rate);
                ker.axpy(v.data(), rate.data(), dt, cand.data(), n);
            } else {
                parallel_for(n, [&](size_t lo, size_t hi) {
                    for (size_t j = lo; j < hi; ++j)
                        cand[j] = v[j] + dt * node_rate(grid, tb, v, j);
                });
            }
            if (u == 0) {
                best = cand;
                std::fill(arg.begin(), arg.end(), 0);
            } else if (kind == GameKind::ZeroSum) {
                ker.select_min(cand.data(), best.data(), arg.data(), u, n);
            } else {
                ker.select_max(cand.data(), best.data(), arg.data(), u, n);
            }
        }
        ker.obstacle(g.data(), best.data(), surf.values[k].data(), surf.stop[k].data(), n);
        surf.argopt[k].assign(arg.begin(), arg.end());
        for (size_t j = 0; j < n; ++j)
            if (!std::isfinite(surf.values[k][j])) {
                std::ostringstream os;
                os << "solve_game: non-finite value at slice " << k << " node " << j;
                throw InvariantError(os.str());
            }
    }
    return surf;
}

EnvelopeBoundReport check_envelope_bounds(const ValueSurface& surface, const EnvelopePair& env) {
    EnvelopeBoundReport rep;
    for (int k = 0; k <= surface.grid.nt; ++k) {
        double t = surface.grid.time_at(k);
        double up = env.upper(t);
        double lo = env.lower(t);
        for (double v : surface.values[k]) {
            rep.worst_upper_margin = std::min(rep.worst_upper_margin, up - v);
            rep.worst_lower_margin = std::min(rep.worst_lower_margin, v - lo);
            if (v > up || v < lo) ++rep.violations;
        }
    }
    rep.ok = rep.violations == 0;
    return rep;
}

}  // namespace jumpstop
