#pragma once

#include <limits>
#include <optional>

#include "jumpstop/model.hpp"
#include "jumpstop/test_function.hpp"

namespace jumpstop {

enum class GameKind { ZeroSum, Cooperative };

struct HamiltonianResult {
    double value = 0;
    std::optional<int> argopt;  // first optimizer in control-grid order
    int feasible_count = 0;
};

/// S^u phi = phi_t + mu_X . Dphi + 1/2 Tr[sigma sigma^T D^2 phi].
double generator_apply(const ControlledJumpModel& model, const TestFunctionView& phi, double t,
                       const Vec& x, const Vec& u);

/// I[phi](t,x,u) = sum_i int_E (phi(t, x + beta_i) - phi(t,x)) m_i(de),
/// an exact finite sum over the atomic mark measure.
double nonlocal_apply(const ControlledJumpModel& model, const TestFunctionView& phi, double t,
                      const Vec& x, const Vec& u);

/// Zero-sum: sup_u { -I[phi] - mu_X.p - 1/2 Tr[sigma sigma^T A] };
/// cooperative: inf_u of the same. Ties go to the lowest grid index.
HamiltonianResult game_hamiltonian(const ControlledJumpModel& model, GameKind kind, double t,
                                   const Vec& x, const Vec& p, const Mat& A,
                                   const TestFunctionView& phi);

struct TargetJumpOps {
    std::vector<double> delta;    // per flat atom: min_i J_i
    std::vector<double> pi;       // per flat atom: max_i J_i
    std::vector<Vec> j_vectors;   // per flat atom: (J_1 .. J_I)
};

/// J^{u,e}_i = b_i - phi(t, x + beta_i) + phi(t,x) evaluated at every atom's
/// mark value; Delta/Pi are the per-atom min/max over the mark index.
TargetJumpOps target_jump_operators(const ControlledJumpModel& model, double t, const Vec& x,
                                    double y, int control_index, const TestFunctionView& phi);

/// H_{eps,eta} (kind ZeroSum) or F_{eps,eta} (kind Cooperative): optimize
/// L^u = mu_Y - mu_X.p - 1/2 Tr[sigma sigma^T A] over the controls with
/// |N^u| <= eps and Delta >= eta (H) resp. Pi <= eta (F) at every
/// positive-weight atom. Empty feasible set gives -inf (H) / +inf (F).
HamiltonianResult relaxed_operator(const ControlledJumpModel& model, GameKind kind, double eps,
                                   double eta, double t, const Vec& x, double y, const Vec& p,
                                   const Mat& A, const TestFunctionView& phi);

/// Signed distance delta = dist(0, N^c) - dist(0, N) for the sampled set
/// N = {(N^u, s) : s <= Delta^{u,e} at every positive-weight atom}, estimated
/// by probing directions on the unit sphere. Game-embedding models return
/// +infinity; an empty sampled N returns -infinity.
double facelift_distance(const ControlledJumpModel& model, double t, const Vec& x, double y,
                         const Vec& p, const TestFunctionView& phi, int probe_directions = 64,
                         double probe_ball = 1e-9);

/// N^u = sigma_Y - sigma_X^T p.
Vec diffusion_mismatch(const ControlledJumpModel& model, double t, const Vec& x, double y,
                       const Vec& u, const Vec& p);

}  // namespace jumpstop
