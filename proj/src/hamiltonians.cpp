#include "jumpstop/hamiltonians.hpp"

#include <cmath>

namespace jumpstop {

namespace {

double half_trace_term(const Mat& sigma, const Mat& A) {
    // 1/2 Tr[sigma sigma^T A]
    int d = sigma.rows;
    double s = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double ssij = 0;
            for (int k = 0; k < d; ++k) ssij += sigma(i, k) * sigma(j, k);
            s += ssij * A(j, i);
        }
    return 0.5 * s;
}

double drift_cost(const ControlledJumpModel& model, double t, const Vec& x, const Vec& u,
                  const Vec& p, const Mat& A, double nonlocal) {
    Vec mu = model.eval_mu_x(t, x, u);
    Mat sigma = model.eval_sigma_x(t, x, u);
    return -nonlocal - dot(mu, p) - half_trace_term(sigma, A);
}

double target_drift(const ControlledJumpModel& model, double t, const Vec& x, double y,
                    const Vec& u, const Vec& p, const Mat& A) {
    Vec mu = model.eval_mu_x(t, x, u);
    Mat sigma = model.eval_sigma_x(t, x, u);
    return model.eval_mu_y(t, x, y, u) - dot(mu, p) - half_trace_term(sigma, A);
}

}  // namespace

double generator_apply(const ControlledJumpModel& model, const TestFunctionView& phi, double t,
                       const Vec& x, const Vec& u) {
    Vec mu = model.eval_mu_x(t, x, u);
    Mat sigma = model.eval_sigma_x(t, x, u);
    double v = phi.time_deriv(t, x) + dot(mu, phi.gradient(t, x)) +
               half_trace_term(sigma, phi.hessian(t, x));
    if (!std::isfinite(v)) throw InvariantError("generator_apply: non-finite derivative estimate");
    return v;
}

double nonlocal_apply(const ControlledJumpModel& model, const TestFunctionView& phi, double t,
                      const Vec& x, const Vec& u) {
    double base = phi(t, x);
    double acc = 0;
    for (const auto& fa : model.marks.flat()) {
        Vec shifted = x;
        Vec disp = model.eval_beta(fa.mark, t, x, u, fa.e);
        for (size_t a = 0; a < shifted.size(); ++a) shifted[a] += disp[a];
        acc += fa.weight * (phi(t, shifted) - base);
    }
    return acc;
}

HamiltonianResult game_hamiltonian(const ControlledJumpModel& model, GameKind kind, double t,
                                   const Vec& x, const Vec& p, const Mat& A,
                                   const TestFunctionView& phi) {
    HamiltonianResult res;
    bool first = true;
    for (int k = 0; k < model.controls.size(); ++k) {
        const Vec& u = model.controls.points[k];
        double nl = nonlocal_apply(model, phi, t, x, u);
        double v = drift_cost(model, t, x, u, p, A, nl);
        bool better = first || (kind == GameKind::ZeroSum ? v > res.value : v < res.value);
        if (better) {
            res.value = v;
            res.argopt = k;
        }
        first = false;
    }
    res.feasible_count = model.controls.size();
    return res;
}

namespace {

// b components at a given atom, including the per-atom u2 transfer when the
// control grid tabulates one.
Vec b_at_atom(const ControlledJumpModel& model, double t, const Vec& x, double y,
              int control_index, int flat_atom, double e) {
    const Vec& u = model.controls.points[control_index];
    Vec bv = model.eval_b(t, x, y, u, e);
    if (!model.controls.u2.empty()) {
        double add = model.controls.u2[control_index][flat_atom];
        for (double& v : bv) v += add;
    }
    return bv;
}

}  // namespace

TargetJumpOps target_jump_operators(const ControlledJumpModel& model, double t, const Vec& x,
                                    double y, int control_index, const TestFunctionView& phi) {
    if (!model.target_mode())
        throw InvariantError("target_jump_operators: model lacks target-mode coefficients");
    const Vec& u = model.controls.points[control_index];
    TargetJumpOps ops;
    double base = phi(t, x);
    auto flat = model.marks.flat();
    int I = model.marks.mark_count();
    for (size_t a = 0; a < flat.size(); ++a) {
        Vec bv = b_at_atom(model, t, x, y, control_index, static_cast<int>(a), flat[a].e);
        Vec J(I);
        for (int i = 0; i < I; ++i) {
            Vec shifted = x;
            Vec disp = model.eval_beta(i, t, x, u, flat[a].e);
            for (size_t c = 0; c < shifted.size(); ++c) shifted[c] += disp[c];
            J[i] = bv[i] - phi(t, shifted) + base;
        }
        double dmin = J[0], dmax = J[0];
        for (int i = 1; i < I; ++i) {
            dmin = std::min(dmin, J[i]);
            dmax = std::max(dmax, J[i]);
        }
        ops.delta.push_back(dmin);
        ops.pi.push_back(dmax);
        ops.j_vectors.push_back(std::move(J));
    }
    return ops;
}

Vec diffusion_mismatch(const ControlledJumpModel& model, double t, const Vec& x, double y,
                       const Vec& u, const Vec& p) {
    Vec sy = model.eval_sigma_y(t, x, y, u);
    Mat sx = model.eval_sigma_x(t, x, u);
    Vec out(model.dimension);
    for (int i = 0; i < model.dimension; ++i) {
        double sp = 0;
        for (int j = 0; j < model.dimension; ++j) sp += sx(j, i) * p[j];
        out[i] = sy[i] - sp;
    }
    return out;
}

HamiltonianResult relaxed_operator(const ControlledJumpModel& model, GameKind kind, double eps,
                                   double eta, double t, const Vec& x, double y, const Vec& p,
                                   const Mat& A, const TestFunctionView& phi) {
    if (!model.target_mode())
        throw InvariantError("relaxed_operator: model lacks target-mode coefficients");
    HamiltonianResult res;
    auto flat = model.marks.flat();
    bool first = true;
    for (int k = 0; k < model.controls.size(); ++k) {
        const Vec& u = model.controls.points[k];
        if (norm2(diffusion_mismatch(model, t, x, y, u, p)) > eps) continue;
        TargetJumpOps ops = target_jump_operators(model, t, x, y, k, phi);
        bool feasible = true;
        for (size_t a = 0; a < flat.size(); ++a) {
            if (flat[a].weight <= 0) continue;  // null atoms exempt
            if (kind == GameKind::ZeroSum ? ops.delta[a] < eta : ops.pi[a] > eta) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        ++res.feasible_count;
        double v = target_drift(model, t, x, y, u, p, A);
        bool better = first || (kind == GameKind::ZeroSum ? v > res.value : v < res.value);
        if (better) {
            res.value = v;
            res.argopt = k;
        }
        first = false;
    }
    if (res.feasible_count == 0) {
        res.value = kind == GameKind::ZeroSum ? -std::numeric_limits<double>::infinity()
                                              : std::numeric_limits<double>::infinity();
        res.argopt.reset();
    }
    return res;
}

double facelift_distance(const ControlledJumpModel& model, double t, const Vec& x, double y,
                         const Vec& p, const TestFunctionView& phi, int probe_directions,
                         double probe_ball) {
    if (model.game_embedding) return std::numeric_limits<double>::infinity();
    if (!model.target_mode())
        throw InvariantError("facelift_distance: model lacks target-mode coefficients");

    // Sampled N: one vertical half-line {(N^u, s): s <= cap_u} per grid control.
    struct HalfLine {
        Vec n;       // R^d anchor
        double cap;  // upper end of the s range
    };
    std::vector<HalfLine> lines;
    auto flat = model.marks.flat();
    for (int k = 0; k < model.controls.size(); ++k) {
        const Vec& u = model.controls.points[k];
        double cap = std::numeric_limits<double>::infinity();
        if (!flat.empty()) {
            TargetJumpOps ops = target_jump_operators(model, t, x, y, k, phi);
            for (size_t a = 0; a < flat.size(); ++a)
                if (flat[a].weight > 0) cap = std::min(cap, ops.delta[a]);
        }
        lines.push_back({diffusion_mismatch(model, t, x, y, u, p), cap});
    }
    if (lines.empty()) return -std::numeric_limits<double>::infinity();

    auto dist_to_line = [](const HalfLine& hl, const Vec& q, double qs) {
        double dn2 = 0;
        for (size_t i = 0; i < hl.n.size(); ++i) dn2 += (q[i] - hl.n[i]) * (q[i] - hl.n[i]);
        double ds = qs > hl.cap ? qs - hl.cap : 0.0;
        return std::sqrt(dn2 + ds * ds);
    };
    Vec origin(model.dimension, 0.0);
    double dist_in = std::numeric_limits<double>::infinity();
    for (const auto& hl : lines) dist_in = std::min(dist_in, dist_to_line(hl, origin, 0.0));

    // dist(0, N^c): grow a ball around the origin and stop at the first radius
    // where some probe direction leaves the tolerance neighborhood of the
    // sampled set. Deterministic low-discrepancy directions on S^d.
    int dd = model.dimension + 1;
    double r_lo = 0, r_hi = 0;
    double step = std::max(probe_ball, 1e-3);
    const double r_cap = 1e6;
    bool covered = true;
    for (double r = step; r <= r_cap && covered; r *= 2) {
        for (int kdir = 0; kdir < probe_directions && covered; ++kdir) {
            // direction from a deterministic angle sweep
            Vec dir(dd);
            double acc = 1.0;
            for (int a = 0; a < dd; ++a) {
                double ang = 2.0 * M_PI * ((kdir + 1.0) * (a + 1.0) * 0.381966011250105);
                dir[a] = std::cos(ang) * acc;
                if (a + 1 < dd) acc *= std::sin(ang);
            }
            double nn = 0;
            for (double v : dir) nn += v * v;
            nn = std::sqrt(nn);
            Vec q(model.dimension);
            for (int a = 0; a < model.dimension; ++a) q[a] = r * dir[a] / nn;
            double qs = r * dir[dd - 1] / nn;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& hl : lines) best = std::min(best, dist_to_line(hl, q, qs));
            if (best > probe_ball) covered = false;
        }
        if (covered) r_lo = r;
        r_hi = r;
    }
    double dist_out = covered ? std::numeric_limits<double>::infinity()
                              : std::max(r_lo, probe_ball);
    (void)r_hi;
    if (std::isinf(dist_out)) return std::numeric_limits<double>::infinity();
    return dist_out - dist_in;
}

}  // namespace jumpstop
