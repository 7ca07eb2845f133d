#pragma once

#include <cstdint>
#include <optional>

#include "jumpstop/grid.hpp"
#include "jumpstop/hamiltonians.hpp"

namespace jumpstop {

struct JumpRecord {
    double time;
    int mark;
    double e;
};

struct SamplePath {
    std::vector<double> times;
    std::vector<Vec> states;       // X per time
    std::vector<double> y;         // Y per time (embedding mode; empty otherwise)
    std::vector<JumpRecord> jumps;
};

/// Integrands of the martingale Y = y + int alpha.dW + int int gamma.dlambda~.
/// Fields are evaluated at (t, x); constant fields ignore the arguments.
struct MartingaleControl {
    std::function<Vec(double, const Vec&)> alpha;                 // R^d
    std::function<Vec(double, const Vec&)> gamma_per_atom;        // one entry per flat atom
    double admissibility_K = 0;

    static MartingaleControl zero(int dim, int atom_count);
    /// Delta-hedge style integrands derived from a value surface:
    /// alpha = sigma_X^T grad V, gamma_atom = V(t, x + beta) - V(t, x).
    static MartingaleControl from_surface(const ControlledJumpModel& model,
                                          const ValueSurface& surface, int control_index);
};

enum class TargetKind { Unco, Co };

struct SimOptions {
    int steps = 100;  // Euler steps on [t0, T]
};

/// Either a feedback policy or a fixed control index.
struct ControlRule {
    const PolicyField* policy = nullptr;
    int fixed_control = 0;
};

/// Euler-Maruyama with per-atom Bernoulli(weight*dt) jump arrivals and
/// compensated Y increments; bit-reproducible given the seed.
SamplePath simulate_path(const ControlledJumpModel& model, const ControlRule& rule, double t0,
                         const Vec& x0, uint64_t seed, const SimOptions& opts = {},
                         const MartingaleControl* mc = nullptr, double y0 = 0);

struct McEstimate {
    double estimate = 0;
    double stderr_ = 0;
    size_t n_paths = 0;
    uint64_t seed = 0;
};

/// Mean of g(X(rho)) with rho = first stop-region hit (else T) under the
/// policy. Per-path seeds derive from seed ^ path index; pairwise-tree
/// reduction keeps estimates reproducible.
McEstimate mc_game_value(const ControlledJumpModel& model, const PolicyField& policy, double t0,
                         const Vec& x0, size_t n_paths, uint64_t seed,
                         const SimOptions& opts = {});

struct AdmissibilityReport {
    bool holds = true;
    double worst = 0;  // min single-event Y jump (unco) / max (co)
    double bound = 0;
};

/// Single-event Y-jump bound over a probe compact: unco requires >= -K,
/// co requires <= K.
AdmissibilityReport check_admissibility(const ControlledJumpModel& model,
                                        const MartingaleControl& mc, TargetKind kind,
                                        const std::vector<Vec>& probes,
                                        const std::vector<double>& probe_times);

struct BisectionConfig {
    int iterations = 40;
    double bracket_pad = 1.0;  // bracket is +/- (g_sup + pad)
    size_t n_paths = 2000;
    uint64_t seed = 1;
    int steps = 100;
    int level_rules = 8;  // first-hitting rules of {g >= c}
    int time_rules = 4;   // deterministic-time rules
};

/// Monte-Carlo estimate of the target-problem value by bisection on the
/// initial Y level. Unco mode: Y(rho) >= g(X(rho)) must hold on every path
/// for every rule in the stopping battery; co mode: some rule must give
/// Y(rho) <= g(X(rho)) on every path.
double estimate_target_bound(const ControlledJumpModel& model, TargetKind kind, double t0,
                             const Vec& x0, const MartingaleControl& mc, const ControlRule& rule,
                             const BisectionConfig& cfg, const PolicyField* stop_policy = nullptr);

}  // namespace jumpstop
