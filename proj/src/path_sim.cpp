#include "jumpstop/path_sim.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace jumpstop {

namespace {

uint64_t mix64(uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

MartingaleControl MartingaleControl::zero(int dim, int atom_count) {
    MartingaleControl mc;
    mc.alpha = [dim](double, const Vec&) { return Vec(dim, 0.0); };
    mc.gamma_per_atom = [atom_count](double, const Vec&) { return Vec(atom_count, 0.0); };
    return mc;
}

MartingaleControl MartingaleControl::from_surface(const ControlledJumpModel& model,
                                                  const ValueSurface& surface,
                                                  int control_index) {
    MartingaleControl mc;
    const Vec u = model.controls.points[control_index];
    auto surf = std::make_shared<ValueSurface>(surface);
    auto model_ptr = std::make_shared<ControlledJumpModel>(model);
    int d = model.dimension;
    mc.alpha = [surf, model_ptr, u, d](double t, const Vec& x) {
        // sigma_X^T grad V by central differences on the surface
        Vec grad(d);
        for (int a = 0; a < d; ++a) {
            double h = surf->grid.dx(a);
            Vec xp = x, xm = x;
            xp[a] += h;
            xm[a] -= h;
            grad[a] = (surf->interp(t, xp) - surf->interp(t, xm)) / (2 * h);
        }
        Mat sg = model_ptr->eval_sigma_x(t, x, u);
        Vec out(d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) out[i] += sg(j, i) * grad[j];
        return out;
    };
    auto flat = model.marks.flat();
    mc.gamma_per_atom = [surf, model_ptr, u, flat](double t, const Vec& x) {
        Vec out(flat.size());
        double base = surf->interp(t, x);
        for (size_t a = 0; a < flat.size(); ++a) {
            Vec disp = model_ptr->eval_beta(flat[a].mark, t, x, u, flat[a].e);
            Vec target = x;
            for (size_t c = 0; c < target.size(); ++c) target[c] += disp[c];
            out[a] = surf->interp(t, target) - base;
        }
        return out;
    };
    mc.admissibility_K = 2 * model.payoff.sup_bound + 1;
    return mc;
}

SamplePath simulate_path(const ControlledJumpModel& model, const ControlRule& rule, double t0,
                         const Vec& x0, uint64_t seed, const SimOptions& opts,
                         const MartingaleControl* mc, double y0) {
    double T = model.horizon;
    int steps = opts.steps;
    double dt = (T - t0) / steps;
    double mass = model.marks.total_mass();
    if (mass * dt >= 1.0) {
        std::ostringstream os;
        os << "simulate_path: mark mass * dt = " << mass * dt << " >= 1";
        throw InvariantError(os.str());
    }
    auto flat = model.marks.flat();
    std::mt19937_64 rng(mix64(seed));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    SamplePath path;
    path.times.push_back(t0);
    path.states.push_back(x0);
    if (mc) path.y.push_back(y0);

    Vec x = x0;
    double y = y0;
    double sdt = std::sqrt(dt);
    int d = model.dimension;
    for (int k = 0; k < steps; ++k) {
        double t = t0 + k * dt;
        const Vec& u = rule.policy ? model.controls.points[rule.policy->at(t, x).control_index]
                                   : model.controls.points[rule.fixed_control];
        Vec dw(d);
        for (int a = 0; a < d; ++a) dw[a] = normal(rng) * sdt;
        Vec mu = model.eval_mu_x(t, x, u);
        Mat sg = model.eval_sigma_x(t, x, u);

        Vec gamma;
        if (mc) {
            Vec alpha = mc->alpha(t, x);
            gamma = mc->gamma_per_atom(t, x);
            double dy = dot(alpha, dw);
            for (size_t a = 0; a < flat.size(); ++a) dy -= dt * flat[a].weight * gamma[a];
            y += dy;
        }

        Vec xn = x;
        for (int a = 0; a < d; ++a) {
            xn[a] += mu[a] * dt;
            for (int c = 0; c < d; ++c) xn[a] += sg(a, c) * dw[c];
        }
        for (size_t a = 0; a < flat.size(); ++a) {
            double draw = unif(rng);
            if (draw < flat[a].weight * dt) {
                Vec disp = model.eval_beta(flat[a].mark, t, x, u, flat[a].e);
                for (int c = 0; c < d; ++c) xn[c] += disp[c];
                path.jumps.push_back({t + dt, flat[a].mark, flat[a].e});
                if (mc) y += gamma[a];
            }
        }
        x = xn;
        path.times.push_back(t + dt);
        path.states.push_back(x);
        if (mc) path.y.push_back(y);
    }
    return path;
}

McEstimate mc_game_value(const ControlledJumpModel& model, const PolicyField& policy, double t0,
                         const Vec& x0, size_t n_paths, uint64_t seed, const SimOptions& opts) {
    ControlRule rule;
    rule.policy = &policy;
    std::vector<double> payoffs(n_paths);
    parallel_for(n_paths, [&](size_t lo, size_t hi) {
        for (size_t p = lo; p < hi; ++p) {
            SamplePath path = simulate_path(model, rule, t0, x0, seed ^ p, opts);
            double pay = model.eval_payoff(path.states.back());
            for (size_t k = 0; k < path.times.size(); ++k) {
                if (policy.at(path.times[k], path.states[k]).stop) {
                    pay = model.eval_payoff(path.states[k]);
                    break;
                }
            }
            payoffs[p] = pay;
        }
    });
    McEstimate est;
    est.n_paths = n_paths;
    est.seed = seed;
    est.estimate = pairwise_sum(payoffs.data(), n_paths) / static_cast<double>(n_paths);
    std::vector<double> sq(n_paths);
    for (size_t p = 0; p < n_paths; ++p)
        sq[p] = (payoffs[p] - est.estimate) * (payoffs[p] - est.estimate);
    double var = n_paths > 1 ? pairwise_sum(sq.data(), n_paths) / (n_paths - 1.0) : 0.0;
    est.stderr_ = std::sqrt(var / static_cast<double>(n_paths));
    return est;
}

AdmissibilityReport check_admissibility(const ControlledJumpModel& model,
                                        const MartingaleControl& mc, TargetKind kind,
                                        const std::vector<Vec>& probes,
                                        const std::vector<double>& probe_times) {
    AdmissibilityReport rep;
    rep.bound = mc.admissibility_K;
    auto flat = model.marks.flat();
    bool first = true;
    for (double t : probe_times)
        for (const auto& x : probes) {
            Vec gamma = mc.gamma_per_atom(t, x);
            for (size_t a = 0; a < flat.size(); ++a) {
                if (flat[a].weight <= 0) continue;
                double jump = gamma[a];
                if (first)
                    rep.worst = jump;
                else
                    rep.worst = kind == TargetKind::Unco ? std::min(rep.worst, jump)
                                                         : std::max(rep.worst, jump);
                first = false;
            }
        }
    rep.holds = kind == TargetKind::Unco ? rep.worst >= -rep.bound : rep.worst <= rep.bound;
    return rep;
}

double estimate_target_bound(const ControlledJumpModel& model, TargetKind kind, double t0,
                             const Vec& x0, const MartingaleControl& mc, const ControlRule& rule,
                             const BisectionConfig& cfg, const PolicyField* stop_policy) {
    SimOptions opts;
    opts.steps = cfg.steps;
    // Y is affine in the initial level: simulate the martingale part once.
    struct PathRec {
        std::vector<double> g;  // g(X(t_k))
        std::vector<double> m;  // Y martingale increment from y0 = 0
        std::vector<uint8_t> policy_stop;
    };
    std::vector<PathRec> recs(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](size_t lo, size_t hi) {
        for (size_t p = lo; p < hi; ++p) {
            SamplePath path = simulate_path(model, rule, t0, x0, cfg.seed ^ p, opts, &mc, 0.0);
            PathRec& r = recs[p];
            size_t K = path.times.size();
            r.g.resize(K);
            r.m.resize(K);
            r.policy_stop.assign(K, 0);
            for (size_t k = 0; k < K; ++k) {
                r.g[k] = model.eval_payoff(path.states[k]);
                r.m[k] = path.y[k];
                if (stop_policy)
                    r.policy_stop[k] =
                        stop_policy->at(path.times[k], path.states[k]).stop ? 1 : 0;
            }
        }
    });

    // Stopping-rule battery: index of the stop step per (rule, path).
    size_t K = recs.empty() ? 0 : recs[0].g.size();
    double gs = model.payoff.sup_bound;
    std::vector<std::function<size_t(const PathRec&)>> rules;
    for (int r = 0; r < cfg.level_rules; ++r) {
        double c = -gs + (2.0 * gs) * (r + 1) / (cfg.level_rules + 1);
        rules.push_back([c, K](const PathRec& pr) {
            for (size_t k = 0; k < K; ++k)
                if (pr.g[k] >= c) return k;
            return K - 1;
        });
    }
    for (int r = 0; r < cfg.time_rules; ++r) {
        size_t k_fix = K > 1 ? (K - 1) * (r + 1) / cfg.time_rules : 0;
        rules.push_back([k_fix](const PathRec&) { return k_fix; });
    }
    if (stop_policy)
        rules.push_back([K](const PathRec& pr) {
            for (size_t k = 0; k < K; ++k)
                if (pr.policy_stop[k]) return k;
            return K - 1;
        });

    auto unco_feasible = [&](double y) {
        for (const auto& rl : rules)
            for (const auto& pr : recs) {
                size_t k = rl(pr);
                if (y + pr.m[k] < pr.g[k]) return false;
            }
        return true;
    };
    auto co_feasible = [&](double y) {
        for (const auto& rl : rules) {
            bool all = true;
            for (const auto& pr : recs) {
                size_t k = rl(pr);
                if (y + pr.m[k] > pr.g[k]) {
                    all = false;
                    break;
                }
            }
            if (all) return true;
        }
        return false;
    };

    double lo = -(gs + cfg.bracket_pad), hi = gs + cfg.bracket_pad;
    if (kind == TargetKind::Unco) {
        if (!unco_feasible(hi)) throw InvariantError("estimate_target_bound: bracket not found");
        for (int it = 0; it < cfg.iterations; ++it) {
            double mid = 0.5 * (lo + hi);
            (unco_feasible(mid) ? hi : lo) = mid;
        }
    } else {
        if (!co_feasible(lo)) throw InvariantError("estimate_target_bound: bracket not found");
        for (int it = 0; it < cfg.iterations; ++it) {
            double mid = 0.5 * (lo + hi);
            (co_feasible(mid) ? lo : hi) = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace jumpstop
