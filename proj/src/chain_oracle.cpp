#include "jumpstop/chain_oracle.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace jumpstop {

ChainKernel build_chain(const ControlledJumpModel& model, const SolverGrid& grid) {
    ChainKernel ck;
    ck.grid = grid;
    size_t n = grid.node_count();
    double dt = grid.dt();
    auto tables = build_control_tables(model, grid);
    ck.transitions.resize(model.controls.size());
    for (int u = 0; u < model.controls.size(); ++u) {
        const ControlTables& tb = tables[u];
        ck.transitions[u].resize(n);
        for (size_t j = 0; j < n; ++j) {
            std::map<int32_t, double> probs;  // ordered: deterministic summation
            double total = 0;
            std::array<int, 2> ij{static_cast<int>(j), 0};
            if (grid.dim == 2) {
                ij[0] = static_cast<int>(j) / grid.nodes[1];
                ij[1] = static_cast<int>(j) % grid.nodes[1];
            }
            for (int a = 0; a < grid.dim; ++a) {
                size_t stride = (grid.dim == 2 && a == 0) ? static_cast<size_t>(grid.nodes[1]) : 1;
                double dx = grid.dx(a);
                double m = tb.mu[a][j];
                double mp = m > 0 ? m : 0.0;
                double mm = m < 0 ? -m : 0.0;
                double p_up = dt * (tb.half_sig2[a][j] / (dx * dx) + mp / dx);
                double p_dn = dt * (tb.half_sig2[a][j] / (dx * dx) + mm / dx);
                int32_t up = ij[a] + 1 < grid.nodes[a] ? static_cast<int32_t>(j + stride)
                                                       : static_cast<int32_t>(j);  // clamped
                int32_t dn = ij[a] > 0 ? static_cast<int32_t>(j - stride) : static_cast<int32_t>(j);
                probs[up] += p_up;
                probs[dn] += p_dn;
                total += p_up + p_dn;
            }
            for (const auto& jc : tb.jumps) {
                double pj = jc.weight * dt;
                const InterpStencil& st = jc.target[j];
                for (int c = 0; c < st.count; ++c) probs[st.idx[c]] += pj * st.w[c];
                total += pj;
            }
            double stay = 1.0 - total;
            if (stay < -1e-12) {
                std::ostringstream os;
                os << "build_chain: negative stay probability " << stay << " at node " << j
                   << " (CFL breach)";
                throw InvariantError(os.str());
            }
            probs[static_cast<int32_t>(j)] += stay;
            auto& list = ck.transitions[u][j];
            for (const auto& [node, p] : probs)
                if (p != 0.0) list.push_back({node, p});
        }
    }
    return ck;
}

double ChainKernel::step_mean(int control, size_t node, int axis) const {
    double x0 = grid.coords(node)[axis];
    double m = 0;
    for (const auto& e : transitions[control][node])
        m += e.p * (grid.coords(static_cast<size_t>(e.node))[axis] - x0);
    return m;
}

double ChainKernel::step_variance(int control, size_t node, int axis) const {
    double x0 = grid.coords(node)[axis];
    double mean = step_mean(control, node, axis);
    double v = 0;
    for (const auto& e : transitions[control][node]) {
        double d = grid.coords(static_cast<size_t>(e.node))[axis] - x0;
        v += e.p * (d - mean) * (d - mean);
    }
    return v;
}

namespace {

ValueSurface backward_induction(const ControlledJumpModel& model, const SolverGrid& grid,
                                const ChainKernel& ck, GameKind kind, int fixed_control) {
    size_t n = grid.node_count();
    Vec g(n);
    for (size_t j = 0; j < n; ++j) g[j] = model.eval_payoff(grid.coords(j));

    ValueSurface surf;
    surf.grid = grid;
    surf.values.assign(grid.nt + 1, Vec(n));
    surf.argopt.assign(grid.nt + 1, std::vector<int32_t>(n, fixed_control >= 0 ? fixed_control : 0));
    surf.stop.assign(grid.nt + 1, std::vector<uint8_t>(n, 1));
    surf.values[grid.nt] = g;

    int nu = model.controls.size();
    for (int k = grid.nt - 1; k >= 0; --k) {
        const Vec& v = surf.values[k + 1];
        parallel_for(n, [&](size_t lo, size_t hi) {
            for (size_t j = lo; j < hi; ++j) {
                double best = 0;
                int32_t arg = 0;
                bool first = true;
                for (int u = 0; u < nu; ++u) {
                    if (fixed_control >= 0 && u != fixed_control) continue;
                    double ev = 0;
                    for (const auto& e : ck.transitions[u][j])
                        ev += e.p * v[static_cast<size_t>(e.node)];
                    bool better =
                        first || (kind == GameKind::ZeroSum ? ev < best : ev > best);
                    if (better) {
                        best = ev;
                        arg = u;
                    }
                    first = false;
                }
                bool binds = g[j] >= best;
                surf.values[k][j] = binds ? g[j] : best;
                surf.stop[k][j] = binds ? 1 : 0;
                surf.argopt[k][j] = arg;
            }
        });
    }
    return surf;
}

}  // namespace

ValueSurface oracle_value(const ControlledJumpModel& model, GameKind kind, const SolverGrid& grid) {
    ChainKernel ck = build_chain(model, grid);
    return backward_induction(model, grid, ck, kind, -1);
}

ValueSurface snell_value(const ControlledJumpModel& model, const SolverGrid& grid,
                         int control_index) {
    if (control_index < 0 || control_index >= model.controls.size())
        throw InvariantError("snell_value: control index out of range");
    ChainKernel ck = build_chain(model, grid);
    // max under a fixed control; the kind flag is irrelevant with one candidate
    return backward_induction(model, grid, ck, GameKind::Cooperative, control_index);
}

}  // namespace jumpstop
