#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jumpstop/common.hpp"

namespace jumpstop {

/// Finite atomic mark measure: I mark types, each a list of (mark value, weight).
struct MarkMeasure {
    struct Atom {
        double e;
        double weight;
    };
    std::vector<std::vector<Atom>> atoms;  // atoms[i] for mark type i

    int mark_count() const { return static_cast<int>(atoms.size()); }
    double total_mass() const {
        double m = 0;
        for (const auto& mk : atoms)
            for (const auto& a : mk) m += a.weight;
        return m;
    }
    /// Flat view (mark index, atom) over every atom of every mark.
    struct FlatAtom {
        int mark;
        double e;
        double weight;
    };
    std::vector<FlatAtom> flat() const {
        std::vector<FlatAtom> out;
        for (int i = 0; i < mark_count(); ++i)
            for (const auto& a : atoms[i]) out.push_back({i, a.e, a.weight});
        return out;
    }
};

enum class CoeffFamily { Constant, AffineInX, Tabulated };

/// One scalar/vector coefficient: value = c0 + Cx·x + Cu·u, or a 1D table in x.
/// The constant family is the affine family with zero slopes.
struct CoeffSpec {
    CoeffFamily family = CoeffFamily::Constant;
    Vec c0;              // output-dim constants
    Mat x_coef;          // out_dim × d
    Mat u_coef;          // out_dim × q
    Vec table_x;         // tabulated: sorted abscissae (d = 1 only)
    std::vector<Vec> table_v;  // table_v[k] = output vector at table_x[k]
    int out_dim = 0;

    Vec eval(double t, const Vec& x, const Vec& u) const;
};

/// Jump displacement family: beta_i = c + s·e per mark (vectors in R^d).
struct BetaSpec {
    std::vector<Vec> c;  // per mark, dim d
    std::vector<Vec> s;  // per mark, dim d; displacement = c[i] + s[i]*e

    Vec eval(int mark, double t, const Vec& x, const Vec& u, double e) const {
        Vec out = c[mark];
        for (size_t a = 0; a < out.size(); ++a) out[a] += s[mark][a] * e;
        return out;
    }
};

enum class PayoffFamily { Constant, ClampLinear, Peak, MinAbs, Tabulated };

/// Bounded continuous terminal payoff g.
struct PayoffSpec {
    PayoffFamily family = PayoffFamily::Constant;
    // constant: g = p0
    // clamp_linear: g = min(hi, max(lo, p0 + a·x))
    // peak: g = p0 - min(p0, scale*|x - center|)
    // min_abs: g = min(p0, |x|)
    double p0 = 0, lo = 0, hi = 0, scale = 1;
    Vec a;       // clamp_linear slope
    Vec center;  // peak center
    Vec table_x;
    Vec table_g;  // 1D tabulated, linear interp, clamped outside
    double sup_bound = 0;

    double eval(const Vec& x) const;
};

struct ControlGrid {
    std::vector<Vec> points;
    // Optional target-mode per-mark component u2 tabulated on the mark atoms:
    // u2[k][flat_atom] for control point k.
    std::vector<Vec> u2;

    int size() const { return static_cast<int>(points.size()); }
};

/// Full problem instance. Immutable after load; evaluations are pure.
struct ControlledJumpModel {
    int dimension = 1;
    double horizon = 1.0;
    CoeffSpec mu_x;     // out_dim d
    CoeffSpec sigma_x;  // out_dim d*d (row-major)
    BetaSpec beta;
    // Target mode (optional): Y dynamics and jump transfers b (out_dim I).
    std::optional<CoeffSpec> mu_y;     // out_dim 1
    std::optional<CoeffSpec> sigma_y;  // out_dim d
    std::optional<CoeffSpec> b;        // out_dim I
    MarkMeasure marks;
    ControlGrid controls;
    PayoffSpec payoff;
    double declared_growth_L = 1.0;   // Assumption probe constant
    double max_simul_jumps = 1.0;     // metadata only; one atom per mark draw enforced
    bool game_embedding = false;      // controls (alpha,gamma) unconstrained

    bool target_mode() const { return mu_y.has_value(); }

    Vec eval_mu_x(double t, const Vec& x, const Vec& u) const { return mu_x.eval(t, x, u); }
    Mat eval_sigma_x(double t, const Vec& x, const Vec& u) const;
    Vec eval_beta(int mark, double t, const Vec& x, const Vec& u, double e) const {
        return beta.eval(mark, t, x, u, e);
    }
    double eval_mu_y(double t, const Vec& x, double y, const Vec& u) const;
    Vec eval_sigma_y(double t, const Vec& x, double y, const Vec& u) const;
    Vec eval_b(double t, const Vec& x, double y, const Vec& u, double e) const;  // one entry per mark
    double eval_payoff(const Vec& x) const { return payoff.eval(x); }
};

struct CoefficientTriple {
    Vec mu;
    Mat sigma;
    std::vector<Vec> beta_per_atom;  // over marks.flat()
};

/// eq-(2.3)-style coefficient evaluation at a point; throws on out-of-grid u.
CoefficientTriple eval_coefficients(const ControlledJumpModel& model, double t, const Vec& x,
                                    const Vec& u);

struct ValidationReport {
    struct Check {
        std::string name;
        bool passed;
        double measured;  // measured constant / worst ratio
        std::string detail;
    };
    std::vector<Check> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    std::string to_string() const;
};

struct ProbeGrid {
    std::vector<double> times;
    std::vector<Vec> points;
};

ProbeGrid default_probes(const ControlledJumpModel& model, double x_radius = 3.0, int n = 9);

/// Finite-probe checks of the standing assumptions: finite mark mass, linear
/// growth of (mu_X, sigma_X) against the declared L, payoff bound, and measured
/// Lipschitz constants via pairwise differences.
ValidationReport validate_assumptions(const ControlledJumpModel& model, const ProbeGrid& probes);

ControlledJumpModel load_model(const std::string& document);
ControlledJumpModel load_model_file(const std::string& path);
std::string emit_model(const ControlledJumpModel& model);

}  // namespace jumpstop
