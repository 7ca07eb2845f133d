#include "jumpstop/grid.hpp"

#include <cmath>

namespace jumpstop {

CflReport cfl_certificate(const ControlledJumpModel& model, const SolverGrid& grid) {
    CflReport rep;
    double mass = model.marks.total_mass();
    double worst = 0;
    double dt = grid.dt();
    for (size_t j = 0; j < grid.node_count(); ++j) {
        Vec x = grid.coords(j);
        for (const auto& u : model.controls.points) {
            Vec mu = model.eval_mu_x(0.0, x, u);
            Mat sg = model.eval_sigma_x(0.0, x, u);
            double rate = mass;
            for (int a = 0; a < grid.dim; ++a) {
                double s2 = 0;
                for (int c = 0; c < grid.dim; ++c) s2 += sg(a, c) * sg(a, c);
                rate += s2 / (grid.dx(a) * grid.dx(a)) + std::abs(mu[a]) / grid.dx(a);
            }
            worst = std::max(worst, dt * rate);
        }
    }
    rep.worst = worst;
    rep.ok = worst <= 1.0 + 1e-12;
    return rep;
}

InterpStencil interp_stencil(const SolverGrid& grid, const Vec& x) {
    InterpStencil st;
    std::array<int, 2> base{0, 0};
    std::array<double, 2> frac{0.0, 0.0};
    for (int a = 0; a < grid.dim; ++a) {
        double rel = (x[a] - grid.lo[a]) / grid.dx(a);
        // snap to the node when the query sits on it up to rounding, so that
        // node coordinates reproduce node values exactly
        double snapped = std::round(rel);
        if (std::abs(rel - snapped) < 1e-9 * std::max(1.0, std::abs(rel))) rel = snapped;
        if (rel <= 0) {
            base[a] = 0;
            frac[a] = 0;
        } else if (rel >= grid.nodes[a] - 1) {
            base[a] = grid.nodes[a] - 2 >= 0 ? grid.nodes[a] - 2 : 0;
            frac[a] = grid.nodes[a] > 1 ? 1.0 : 0.0;
        } else {
            base[a] = static_cast<int>(rel);
            frac[a] = rel - base[a];
        }
    }
    if (grid.dim == 1) {
        if (frac[0] == 0.0) {
            st.count = 1;
            st.idx[0] = static_cast<int>(grid.index(base[0]));
            st.w[0] = 1.0;
        } else {
            st.count = 2;
            st.idx[0] = static_cast<int>(grid.index(base[0]));
            st.idx[1] = static_cast<int>(grid.index(base[0] + 1));
            st.w[0] = 1.0 - frac[0];
            st.w[1] = frac[0];
        }
    } else {
        st.count = 4;
        int k = 0;
        for (int d0 = 0; d0 <= 1; ++d0)
            for (int d1 = 0; d1 <= 1; ++d1) {
                int i0 = std::min(base[0] + d0, grid.nodes[0] - 1);
                int i1 = std::min(base[1] + d1, grid.nodes[1] - 1);
                st.idx[k] = static_cast<int>(grid.index(i0, i1));
                st.w[k] = (d0 ? frac[0] : 1 - frac[0]) * (d1 ? frac[1] : 1 - frac[1]);
                ++k;
            }
    }
    return st;
}

std::vector<ControlTables> build_control_tables(const ControlledJumpModel& model,
                                                const SolverGrid& grid) {
    size_t n = grid.node_count();
    auto flat = model.marks.flat();
    std::vector<ControlTables> out(model.controls.size());
    for (int k = 0; k < model.controls.size(); ++k) {
        const Vec& u = model.controls.points[k];
        ControlTables& tb = out[k];
        for (int a = 0; a < grid.dim; ++a) {
            tb.mu[a].resize(n);
            tb.half_sig2[a].resize(n);
        }
        for (const auto& fa : flat) tb.jumps.push_back({fa.weight, std::vector<InterpStencil>(n)});
        for (size_t j = 0; j < n; ++j) {
            Vec x = grid.coords(j);
            Vec mu = model.eval_mu_x(0.0, x, u);
            Mat sg = model.eval_sigma_x(0.0, x, u);
            for (int a = 0; a < grid.dim; ++a) {
                tb.mu[a][j] = mu[a];
                double s2 = 0;
                for (int c = 0; c < grid.dim; ++c) s2 += sg(a, c) * sg(a, c);
                tb.half_sig2[a][j] = 0.5 * s2;
            }
            if (grid.dim == 2 && (sg(0, 1) != 0.0 || sg(1, 0) != 0.0))
                throw InvariantError("2D solves require diagonal sigma_X (no cross-diffusion)");
            for (size_t ai = 0; ai < flat.size(); ++ai) {
                Vec disp = model.eval_beta(flat[ai].mark, 0.0, x, u, flat[ai].e);
                Vec target = x;
                for (int a = 0; a < grid.dim; ++a) target[a] += disp[a];
                tb.jumps[ai].target[j] = interp_stencil(grid, target);
            }
        }
    }
    return out;
}

int ValueSurface::nearest_slice(double t) const {
    double rel = (t - grid.t0) / grid.dt();
    int k = static_cast<int>(std::lround(rel));
    return std::min(std::max(k, 0), grid.nt);
}

size_t ValueSurface::nearest_node(const Vec& x) const {
    std::array<int, 2> i{0, 0};
    for (int a = 0; a < grid.dim; ++a) {
        double rel = (x[a] - grid.lo[a]) / grid.dx(a);
        i[a] = std::min(std::max(static_cast<int>(std::lround(rel)), 0), grid.nodes[a] - 1);
    }
    return grid.index(i[0], i[1]);
}

double ValueSurface::interp(double t, const Vec& x) const {
    int k = nearest_slice(t);
    InterpStencil st = interp_stencil(grid, x);
    double v = 0;
    for (int c = 0; c < st.count; ++c) v += st.w[c] * values[k][st.idx[c]];
    return v;
}

PolicyField extract_policy(const ValueSurface& surface) { return PolicyField{surface}; }

}  // namespace jumpstop
