#include "jumpstop/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace jumpstop {

using nlohmann::json;

// ---------------------------------------------------------------- CoeffSpec

Vec CoeffSpec::eval(double /*t*/, const Vec& x, const Vec& u) const {
    if (family == CoeffFamily::Tabulated) {
        double xv = x.empty() ? 0.0 : x[0];
        if (table_x.empty()) throw InvariantError("tabulated coefficient without table");
        if (xv <= table_x.front()) return table_v.front();
        if (xv >= table_x.back()) return table_v.back();
        auto it = std::upper_bound(table_x.begin(), table_x.end(), xv);
        size_t k = static_cast<size_t>(it - table_x.begin());
        double w = (xv - table_x[k - 1]) / (table_x[k] - table_x[k - 1]);
        Vec out(out_dim);
        for (int j = 0; j < out_dim; ++j)
            out[j] = (1 - w) * table_v[k - 1][j] + w * table_v[k][j];
        return out;
    }
    Vec out = c0;
    if (family == CoeffFamily::AffineInX) {
        if (x_coef.rows == out_dim)
            for (int r = 0; r < out_dim; ++r)
                for (int c = 0; c < x_coef.cols; ++c) out[r] += x_coef(r, c) * x[c];
        if (u_coef.rows == out_dim)
            for (int r = 0; r < out_dim; ++r)
                for (int c = 0; c < u_coef.cols && c < static_cast<int>(u.size()); ++c)
                    out[r] += u_coef(r, c) * u[c];
    }
    for (double v : out)
        if (!std::isfinite(v)) throw InvariantError("non-finite coefficient value");
    return out;
}

// ---------------------------------------------------------------- PayoffSpec

double PayoffSpec::eval(const Vec& x) const {
    auto nrm = [&] {
        double s = 0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
    };
    switch (family) {
        case PayoffFamily::Constant:
            return p0;
        case PayoffFamily::ClampLinear: {
            double v = p0;
            for (size_t i = 0; i < x.size() && i < a.size(); ++i) v += a[i] * x[i];
            return std::min(hi, std::max(lo, v));
        }
        case PayoffFamily::Peak: {
            double s = 0;
            for (size_t i = 0; i < x.size(); ++i) {
                double c = i < center.size() ? center[i] : 0.0;
                s += (x[i] - c) * (x[i] - c);
            }
            return p0 - std::min(p0, scale * std::sqrt(s));
        }
        case PayoffFamily::MinAbs:
            return std::min(p0, nrm());
        case PayoffFamily::Tabulated: {
            double xv = x.empty() ? 0.0 : x[0];
            if (xv <= table_x.front()) return table_g.front();
            if (xv >= table_x.back()) return table_g.back();
            auto it = std::upper_bound(table_x.begin(), table_x.end(), xv);
            size_t k = static_cast<size_t>(it - table_x.begin());
            double w = (xv - table_x[k - 1]) / (table_x[k] - table_x[k - 1]);
            return (1 - w) * table_g[k - 1] + w * table_g[k];
        }
    }
    return 0;
}

// -------------------------------------------------------- model evaluation

Mat ControlledJumpModel::eval_sigma_x(double t, const Vec& x, const Vec& u) const {
    Vec flat = sigma_x.eval(t, x, u);
    Mat out(dimension, dimension);
    out.data = flat;
    return out;
}

double ControlledJumpModel::eval_mu_y(double t, const Vec& x, double y, const Vec& u) const {
    if (!mu_y) throw InvariantError("model lacks target-mode mu_y");
    Vec xy = x;
    xy.push_back(y);
    return mu_y->eval(t, xy, u)[0];
}

Vec ControlledJumpModel::eval_sigma_y(double t, const Vec& x, double y, const Vec& u) const {
    if (!sigma_y) throw InvariantError("model lacks target-mode sigma_y");
    Vec xy = x;
    xy.push_back(y);
    return sigma_y->eval(t, xy, u);
}

Vec ControlledJumpModel::eval_b(double t, const Vec& x, double y, const Vec& u, double e) const {
    if (!b) throw InvariantError("model lacks target-mode b");
    Vec xy = x;
    xy.push_back(y);
    (void)e;  // families carry no e-dependence for b; u2(e) enters via the control grid
    return b->eval(t, xy, u);
}

CoefficientTriple eval_coefficients(const ControlledJumpModel& model, double t, const Vec& x,
                                    const Vec& u) {
    bool known = false;
    for (const auto& p : model.controls.points)
        if (p == u) known = true;
    if (!known) throw InvariantError("control not in grid");
    CoefficientTriple out;
    out.mu = model.eval_mu_x(t, x, u);
    out.sigma = model.eval_sigma_x(t, x, u);
    for (const auto& fa : model.marks.flat())
        out.beta_per_atom.push_back(model.eval_beta(fa.mark, t, x, u, fa.e));
    return out;
}

// ------------------------------------------------------------- validation

ProbeGrid default_probes(const ControlledJumpModel& model, double x_radius, int n) {
    ProbeGrid pg;
    for (int k = 0; k <= 4; ++k) pg.times.push_back(model.horizon * k / 4.0);
    // axis-aligned probes plus the origin
    pg.points.push_back(Vec(model.dimension, 0.0));
    for (int a = 0; a < model.dimension; ++a) {
        for (int k = 1; k <= n; ++k) {
            double r = x_radius * k / n;
            Vec p(model.dimension, 0.0);
            p[a] = r;
            pg.points.push_back(p);
            p[a] = -r;
            pg.points.push_back(p);
        }
    }
    return pg;
}

ValidationReport validate_assumptions(const ControlledJumpModel& model, const ProbeGrid& probes) {
    if (probes.points.empty() || probes.times.empty())
        throw InvariantError("validate_assumptions: empty probe grid");
    ValidationReport rep;

    double mass = model.marks.total_mass();
    bool mass_ok = std::isfinite(mass) && (model.marks.mark_count() == 0 || mass > 0);
    for (const auto& mk : model.marks.atoms) {
        bool has_pos = false;
        for (const auto& a : mk) {
            if (a.weight < 0) mass_ok = false;
            if (a.weight > 0) has_pos = true;
        }
        if (!has_pos) mass_ok = false;
    }
    rep.checks.push_back({"finite_mark_mass", mass_ok, mass, "total mass of the mark measure"});

    double worst_growth = 0;
    double worst_lip = 0;
    double worst_payoff = 0;
    const double L = model.declared_growth_L;
    for (double t : probes.times) {
        for (const auto& u : model.controls.points) {
            double unorm = norm2(u);
            Vec prev_mu;
            double prev_x = 0;
            bool have_prev = false;
            for (const auto& x : probes.points) {
                Vec mu = model.eval_mu_x(t, x, u);
                Mat sg = model.eval_sigma_x(t, x, u);
                double amp = norm2(mu) + norm2(sg.data);
                double cap = 1.0 + norm2(x) + unorm;
                worst_growth = std::max(worst_growth, amp / cap);
                if (have_prev && x.size() == 1 && std::abs(x[0] - prev_x) > 1e-14) {
                    double diff = 0;
                    for (size_t j = 0; j < mu.size(); ++j) diff += std::abs(mu[j] - prev_mu[j]);
                    worst_lip = std::max(worst_lip, diff / std::abs(x[0] - prev_x));
                }
                prev_mu = mu;
                prev_x = x.empty() ? 0 : x[0];
                have_prev = true;
            }
        }
    }
    for (const auto& x : probes.points)
        worst_payoff = std::max(worst_payoff, std::abs(model.eval_payoff(x)));

    rep.checks.push_back({"linear_growth", worst_growth <= L + 1e-12, worst_growth,
                          "max |mu|+|sigma| over (1+|x|+|u|) vs declared L"});
    rep.checks.push_back({"lipschitz_estimate", true, worst_lip,
                          "measured finite-difference Lipschitz constant of mu_x (informational)"});
    rep.checks.push_back({"payoff_bound", worst_payoff <= model.payoff.sup_bound + 1e-12,
                          worst_payoff, "max |g| on probes vs declared sup bound"});
    return rep;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& c : checks)
        os << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << c.measured << " ("
           << c.detail << ")\n";
    return os.str();
}

// ------------------------------------------------------------- JSON I/O

namespace {

double as_real(const json& j) {
    if (j.is_string()) return std::stod(j.get<std::string>());
    return j.get<double>();
}

Vec as_vec(const json& j) {
    Vec out;
    for (const auto& v : j) out.push_back(as_real(v));
    return out;
}

Mat as_mat(const json& j) {
    Mat m;
    m.rows = static_cast<int>(j.size());
    m.cols = m.rows ? static_cast<int>(j[0].size()) : 0;
    for (const auto& row : j)
        for (const auto& v : row) m.data.push_back(as_real(v));
    return m;
}

json vec_json(const Vec& v) {
    json j = json::array();
    for (double x : v) j.push_back(x);
    return j;
}

json mat_json(const Mat& m) {
    json j = json::array();
    for (int r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
        j.push_back(row);
    }
    return j;
}

CoeffSpec parse_coeff(const json& j, int out_dim) {
    CoeffSpec cs;
    cs.out_dim = out_dim;
    std::string fam = j.at("family").get<std::string>();
    const json& p = j.value("params", json::object());
    if (fam == "constant") {
        cs.family = CoeffFamily::Constant;
        cs.c0 = p.contains("value") ? as_vec(p["value"]) : Vec(out_dim, 0.0);
    } else if (fam == "affine_in_x") {
        cs.family = CoeffFamily::AffineInX;
        cs.c0 = p.contains("const") ? as_vec(p["const"]) : Vec(out_dim, 0.0);
        if (p.contains("x_coef")) cs.x_coef = as_mat(p["x_coef"]);
        if (p.contains("u_coef")) cs.u_coef = as_mat(p["u_coef"]);
    } else if (fam == "tabulated") {
        cs.family = CoeffFamily::Tabulated;
        cs.table_x = as_vec(p.at("x"));
        for (const auto& row : p.at("values")) cs.table_v.push_back(as_vec(row));
    } else {
        throw ParseError("unknown coefficient family: " + fam);
    }
    if (static_cast<int>(cs.c0.size()) != out_dim && cs.family != CoeffFamily::Tabulated)
        cs.c0.resize(out_dim, 0.0);
    return cs;
}

json emit_coeff(const CoeffSpec& cs) {
    json j;
    json p = json::object();
    switch (cs.family) {
        case CoeffFamily::Constant:
            j["family"] = "constant";
            p["value"] = vec_json(cs.c0);
            break;
        case CoeffFamily::AffineInX:
            j["family"] = "affine_in_x";
            p["const"] = vec_json(cs.c0);
            if (cs.x_coef.rows) p["x_coef"] = mat_json(cs.x_coef);
            if (cs.u_coef.rows) p["u_coef"] = mat_json(cs.u_coef);
            break;
        case CoeffFamily::Tabulated: {
            j["family"] = "tabulated";
            p["x"] = vec_json(cs.table_x);
            json rows = json::array();
            for (const auto& r : cs.table_v) rows.push_back(vec_json(r));
            p["values"] = rows;
            break;
        }
    }
    j["params"] = p;
    return j;
}

PayoffSpec parse_payoff(const json& j) {
    PayoffSpec ps;
    std::string fam = j.at("family").get<std::string>();
    const json& p = j.value("params", json::object());
    if (fam == "constant") {
        ps.family = PayoffFamily::Constant;
        ps.p0 = as_real(p.at("value"));
    } else if (fam == "clamp_linear") {
        ps.family = PayoffFamily::ClampLinear;
        ps.p0 = p.contains("const") ? as_real(p["const"]) : 0.0;
        ps.a = p.contains("slope") ? as_vec(p["slope"]) : Vec{1.0};
        ps.lo = as_real(p.at("lo"));
        ps.hi = as_real(p.at("hi"));
    } else if (fam == "peak") {
        ps.family = PayoffFamily::Peak;
        ps.p0 = as_real(p.at("height"));
        ps.scale = p.contains("scale") ? as_real(p["scale"]) : 1.0;
        if (p.contains("center")) ps.center = as_vec(p["center"]);
    } else if (fam == "min_abs") {
        ps.family = PayoffFamily::MinAbs;
        ps.p0 = p.contains("cap") ? as_real(p["cap"]) : 1.0;
    } else if (fam == "tabulated") {
        ps.family = PayoffFamily::Tabulated;
        ps.table_x = as_vec(p.at("x"));
        ps.table_g = as_vec(p.at("g"));
    } else {
        throw ParseError("unknown payoff family: " + fam);
    }
    ps.sup_bound = as_real(j.at("sup_bound"));
    return ps;
}

json emit_payoff(const PayoffSpec& ps) {
    json j;
    json p = json::object();
    switch (ps.family) {
        case PayoffFamily::Constant:
            j["family"] = "constant";
            p["value"] = ps.p0;
            break;
        case PayoffFamily::ClampLinear:
            j["family"] = "clamp_linear";
            p["const"] = ps.p0;
            p["slope"] = vec_json(ps.a);
            p["lo"] = ps.lo;
            p["hi"] = ps.hi;
            break;
        case PayoffFamily::Peak:
            j["family"] = "peak";
            p["height"] = ps.p0;
            p["scale"] = ps.scale;
            p["center"] = vec_json(ps.center);
            break;
        case PayoffFamily::MinAbs:
            j["family"] = "min_abs";
            p["cap"] = ps.p0;
            break;
        case PayoffFamily::Tabulated:
            j["family"] = "tabulated";
            p["x"] = vec_json(ps.table_x);
            p["g"] = vec_json(ps.table_g);
            break;
    }
    j["params"] = p;
    j["sup_bound"] = ps.sup_bound;
    return j;
}

void check_invariants(const ControlledJumpModel& m) {
    if (m.dimension < 1) throw InvariantError("dimension must be >= 1");
    if (!(m.horizon > 0)) throw InvariantError("horizon must be > 0");
    if (m.controls.points.empty()) throw InvariantError("control grid empty");
    for (size_t i = 0; i < m.controls.points.size(); ++i)
        for (size_t j = i + 1; j < m.controls.points.size(); ++j)
            if (m.controls.points[i] == m.controls.points[j])
                throw InvariantError("duplicate control point");
    double mass = m.marks.total_mass();
    if (!std::isfinite(mass)) throw InvariantError("mark measure mass not finite");
    for (const auto& mk : m.marks.atoms) {
        bool has_pos = false;
        for (const auto& a : mk) {
            if (a.weight < 0)
                throw InvariantError("negative atom weight violates finite-intensity assumption");
            if (a.weight > 0) has_pos = true;
        }
        if (!has_pos) throw InvariantError("mark type without positive-weight atom");
    }
    if (m.marks.mark_count() > 0 && !(mass > 0))
        throw InvariantError("mark measure must have positive mass");
    // payoff bound at probes
    ProbeGrid pg = default_probes(m);
    for (const auto& x : pg.points)
        if (std::abs(m.eval_payoff(x)) > m.payoff.sup_bound + 1e-12)
            throw InvariantError("payoff exceeds declared sup bound");
    if (m.target_mode()) {
        // integrability of u2 under a finite atomic measure is automatic once finite
        for (const auto& u2 : m.controls.u2)
            for (double v : u2)
                if (!std::isfinite(v)) throw InvariantError("non-finite u2 component");
    }
}

}  // namespace

ControlledJumpModel load_model(const std::string& document) {
    json j;
    try {
        j = json::parse(document);
    } catch (const std::exception& ex) {
        throw ParseError(std::string("model document parse failure: ") + ex.what());
    }
    ControlledJumpModel m;
    try {
        m.dimension = j.at("dimension").get<int>();
        m.horizon = as_real(j.at("horizon"));
        const json& co = j.at("coefficients");
        m.mu_x = parse_coeff(co.at("mu_x"), m.dimension);
        m.sigma_x = parse_coeff(co.at("sigma_x"), m.dimension * m.dimension);

        if (j.contains("marks"))
            for (const auto& mk : j["marks"]) {
                std::vector<MarkMeasure::Atom> atoms;
                for (const auto& a : mk.at("atoms"))
                    atoms.push_back({as_real(a[0]), as_real(a[1])});
                m.marks.atoms.push_back(atoms);
            }
        int I = m.marks.mark_count();

        if (co.contains("beta")) {
            const json& bj = co["beta"];
            std::string fam = bj.at("family").get<std::string>();
            const json& p = bj.value("params", json::object());
            for (int i = 0; i < I; ++i) {
                Vec c(m.dimension, 0.0), s(m.dimension, 0.0);
                if (fam == "constant") {
                    if (p.contains("value")) c = as_vec(p["value"].at(i));
                } else if (fam == "scaled_mark") {
                    if (p.contains("scale")) s = as_vec(p["scale"].at(i));
                    if (p.contains("offset")) c = as_vec(p["offset"].at(i));
                } else {
                    throw ParseError("unknown beta family: " + fam);
                }
                m.beta.c.push_back(c);
                m.beta.s.push_back(s);
            }
        } else {
            for (int i = 0; i < I; ++i) {
                m.beta.c.push_back(Vec(m.dimension, 0.0));
                m.beta.s.push_back(Vec(m.dimension, 0.0));
            }
        }

        if (co.contains("mu_y")) m.mu_y = parse_coeff(co["mu_y"], 1);
        if (co.contains("sigma_y")) m.sigma_y = parse_coeff(co["sigma_y"], m.dimension);
        if (co.contains("b")) m.b = parse_coeff(co["b"], std::max(I, 1));

        for (const auto& pt : j.at("controls").at("points")) m.controls.points.push_back(as_vec(pt));
        if (j["controls"].contains("u2"))
            for (const auto& row : j["controls"]["u2"]) m.controls.u2.push_back(as_vec(row));

        m.payoff = parse_payoff(j.at("payoff"));
        if (j.contains("growth_L")) m.declared_growth_L = as_real(j["growth_L"]);
        if (j.contains("max_simultaneous_jumps")) m.max_simul_jumps = as_real(j["max_simultaneous_jumps"]);
        if (j.contains("game_embedding")) m.game_embedding = j["game_embedding"].get<bool>();
    } catch (const json::exception& ex) {
        throw ParseError(std::string("model document missing/invalid field: ") + ex.what());
    }
    check_invariants(m);
    return m;
}

ControlledJumpModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_model(ss.str());
}

std::string emit_model(const ControlledJumpModel& m) {
    json j;
    j["dimension"] = m.dimension;
    j["horizon"] = m.horizon;
    json co;
    co["mu_x"] = emit_coeff(m.mu_x);
    co["sigma_x"] = emit_coeff(m.sigma_x);
    if (!m.beta.c.empty()) {
        json p;
        json scale = json::array(), offset = json::array();
        for (size_t i = 0; i < m.beta.c.size(); ++i) {
            scale.push_back(vec_json(m.beta.s[i]));
            offset.push_back(vec_json(m.beta.c[i]));
        }
        p["scale"] = scale;
        p["offset"] = offset;
        co["beta"] = {{"family", "scaled_mark"}, {"params", p}};
    }
    if (m.mu_y) co["mu_y"] = emit_coeff(*m.mu_y);
    if (m.sigma_y) co["sigma_y"] = emit_coeff(*m.sigma_y);
    if (m.b) co["b"] = emit_coeff(*m.b);
    j["coefficients"] = co;
    json marks = json::array();
    for (const auto& mk : m.marks.atoms) {
        json atoms = json::array();
        for (const auto& a : mk) atoms.push_back(json::array({a.e, a.weight}));
        marks.push_back({{"atoms", atoms}});
    }
    j["marks"] = marks;
    json pts = json::array();
    for (const auto& p : m.controls.points) pts.push_back(vec_json(p));
    j["controls"] = {{"points", pts}};
    if (!m.controls.u2.empty()) {
        json u2 = json::array();
        for (const auto& row : m.controls.u2) u2.push_back(vec_json(row));
        j["controls"]["u2"] = u2;
    }
    j["payoff"] = emit_payoff(m.payoff);
    j["growth_L"] = m.declared_growth_L;
    j["max_simultaneous_jumps"] = m.max_simul_jumps;
    j["game_embedding"] = m.game_embedding;
    return j.dump(2);
}

}  // namespace jumpstop
