#pragma once

// Catalog of concrete objectives with closed-form gradients, subdifferential
// distance models, nonsmooth masks, known critical points, and exact proximal
// maps. All catalog objectives are built from scalar pieces of four shapes
// (u^2, |u|, |u|^{3/2}, u) optionally coupled by c (x - y)^2, which keeps
// every prox subproblem a convex scalar problem with a closed form.

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "plk.hpp"
#include "rates.hpp"

namespace altmin {

enum class PieceKind { zero, linear, quad, abs, pow32 };

struct ScalarPiece {
    PieceKind kind = PieceKind::zero;

    double eval(double u) const {
        switch (kind) {
            case PieceKind::zero: return 0.0;
            case PieceKind::linear: return u;
            case PieceKind::quad: return u * u;
            case PieceKind::abs: return std::abs(u);
            case PieceKind::pow32: return std::abs(u) * std::sqrt(std::abs(u));
        }
        return 0.0;
    }

    // Derivative where the piece is smooth; callers must respect kinked_at.
    double deriv(double u) const {
        switch (kind) {
            case PieceKind::zero: return 0.0;
            case PieceKind::linear: return 1.0;
            case PieceKind::quad: return 2.0 * u;
            case PieceKind::abs: return u > 0.0 ? 1.0 : -1.0;
            case PieceKind::pow32: return 1.5 * std::sqrt(std::abs(u)) * (u >= 0.0 ? 1.0 : -1.0);
        }
        return 0.0;
    }

    // Points excluded from the closed-form distance model. |u| has a genuine
    // kink at 0; |u|^{3/2} is C1 there but its curvature blows up, and the
    // catalog masks it the same way so grid checks never sit on the seam.
    bool kinked_at(double u) const {
        return (kind == PieceKind::abs || kind == PieceKind::pow32) && u == 0.0;
    }

    std::optional<double> critical_point() const {
        switch (kind) {
            case PieceKind::zero:
            case PieceKind::quad:
            case PieceKind::abs:
            case PieceKind::pow32: return 0.0;
            case PieceKind::linear: return std::nullopt;
        }
        return std::nullopt;
    }

    const char* name() const {
        switch (kind) {
            case PieceKind::zero: return "zero";
            case PieceKind::linear: return "linear";
            case PieceKind::quad: return "quad";
            case PieceKind::abs: return "abs";
            case PieceKind::pow32: return "pow32";
        }
        return "?";
    }

    // Global minimizer of piece(u) + a u^2 + b u for a > 0. Every case is a
    // convex problem with a closed form; the pow32 root uses the product form
    // of the quadratic formula to avoid cancellation for small b.
    double exact_prox(double a, double b) const {
        switch (kind) {
            case PieceKind::zero: return -b / (2.0 * a);
            case PieceKind::linear: return -(b + 1.0) / (2.0 * a);
            case PieceKind::quad: return -b / (2.0 * (1.0 + a));
            case PieceKind::abs: {
                double m = std::abs(b) - 1.0;
                if (m <= 0.0) return 0.0;
                return (b < 0.0 ? m : -m) / (2.0 * a);
            }
            case PieceKind::pow32: {
                if (b == 0.0) return 0.0;
                double m = std::abs(b);
                double s = 2.0 * m / (1.5 + std::sqrt(2.25 + 8.0 * a * m));
                double u = s * s;
                return b < 0.0 ? u : -u;
            }
        }
        return 0.0;
    }
};

inline ScalarPiece piece(PieceKind k) { return ScalarPiece{k}; }

// ---------------------------------------------------------------------------

struct CatalogEntry {
    std::string name;
    ObjectiveSpec objective;
    std::vector<std::pair<Point, double>> known_critical_points;
    std::vector<PlkCertificate> plk_certificates;
    std::vector<Regime> expected_regimes;  // empty when no prediction is made
    double default_box_radius = 1.0;
    std::function<bool(const Point&)> nonsmooth_mask;
    bool solver_eligible = true;
    bool plk_fails = false;  // the exponent condition provably fails here
    std::optional<double> claimed_exponent;
    Point default_start;
};

namespace detail {

// Entry for L(x, y) = px(x) + py(y) + c (x - y)^2, the shape of every
// two-block catalog problem. c = 0 gives the fully separable ones.
inline CatalogEntry coupled_entry(const std::string& name, ScalarPiece px, ScalarPiece py,
                                  double c) {
    CatalogEntry e;
    e.name = name;
    ObjectiveSpec& o = e.objective;
    o.id = name;
    o.n = 1;
    o.m = 1;
    o.f_eval = [px](const Vec& x) { return ExtReal(px.eval(x[0])); };
    o.g_eval = [py](const Vec& y) { return ExtReal(py.eval(y[0])); };
    o.q_eval = [c](const Vec& x, const Vec& y) {
        double d = x[0] - y[0];
        return c * d * d;
    };
    o.q_grad = [c](const Vec& x, const Vec& y) {
        double d = x[0] - y[0];
        return std::pair<Vec, Vec>{{2.0 * c * d}, {-2.0 * c * d}};
    };
    o.subdiff_dist = [px, py, c](const Point& p) -> std::optional<double> {
        if (px.kinked_at(p.x[0]) || py.kinked_at(p.y[0])) return std::nullopt;
        double d = p.x[0] - p.y[0];
        double gx = px.deriv(p.x[0]) + 2.0 * c * d;
        double gy = py.deriv(p.y[0]) - 2.0 * c * d;
        return std::sqrt(gx * gx + gy * gy);
    };
    o.prox_x_exact = [px, c](const Point& p, double lam) {
        return Vec{px.exact_prox(c + 1.0 / (2.0 * lam), -2.0 * c * p.y[0] - p.x[0] / lam)};
    };
    o.prox_y_exact = [py, c](const Point& p, double mu) {
        return Vec{py.exact_prox(c + 1.0 / (2.0 * mu), -2.0 * c * p.x[0] - p.y[0] / mu)};
    };
    o.scalar_x = {[px, c](double u, const Point& p) {
        double d = u - p.y[0];
        return px.eval(u) + c * d * d;
    }};
    o.scalar_y = {[py, c](double v, const Point& p) {
        double d = p.x[0] - v;
        return py.eval(v) + c * d * d;
    }};
    e.nonsmooth_mask = [px, py](const Point& p) {
        return px.kinked_at(p.x[0]) || py.kinked_at(p.y[0]);
    };
    e.default_start = Point{{1.0}, {1.0}};
    return e;
}

inline Point origin(std::size_t n, std::size_t m) {
    Point p;
    p.x.assign(n, 0.0);
    p.y.assign(m, 0.0);
    return p;
}

}  // namespace detail

// Smallest multiplier making the exponent inequality hold on a coarse scan of
// the box, inflated by 25% so finer grids stay covered.
inline PlkCertificate fit_certificate_constant(const ObjectiveSpec& obj, const Point& ref,
                                               double ref_value, double q, double eta,
                                               double radius) {
    const std::size_t dim = obj.n + obj.m;
    std::size_t per_axis = (dim <= 2) ? 201 : (dim == 3 ? 101 : 31);
    std::size_t total = 1;
    for (std::size_t a = 0; a < dim; ++a) total *= per_axis;

    double m_need = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        Point p;
        p.x.resize(obj.n);
        p.y.resize(obj.m);
        for (std::size_t a = 0; a < dim; ++a) {
            std::size_t i = rest % per_axis;
            rest /= per_axis;
            double base = (a < obj.n) ? ref.x[a] : ref.y[a - obj.n];
            double c = base - radius +
                       (static_cast<double>(i) + 0.5) * 2.0 * radius / static_cast<double>(per_axis);
            if (a < obj.n)
                p.x[a] = c;
            else
                p.y[a - obj.n] = c;
        }
        ExtReal L = evaluate(obj, p);
        if (!L.is_finite()) continue;
        double t = L.value() - ref_value;
        if (!(t > 0.0) || !(t < eta)) continue;
        std::optional<double> d = obj.subdiff_dist(p);
        if (!d || !(*d > 0.0)) continue;
        m_need = std::max(m_need, std::pow(t, q) / ((1.0 - q) * *d));
    }
    if (m_need == 0.0) throw EstimationError("fit_certificate_constant: no usable grid points");

    PlkCertificate cert;
    cert.reference_point = ref;
    cert.reference_value = ref_value;
    cert.q = q;
    cert.M = 1.25 * m_need;
    cert.eta = eta;
    cert.radius = radius;
    return cert;
}

// ---------------------------------------------------------------------------
// The catalog

inline std::vector<CatalogEntry> build_catalog() {
    std::vector<CatalogEntry> cat;

    // L(x) = |x|^{3/2} + x^2, one block. Exponent 1/3 holds globally with
    // multiplier 7.5 (threshold t^{1/3}/5) and sharpens to M = 1.5 close to
    // the critical point at 0.
    {
        CatalogEntry e;
        e.name = "example1";
        ObjectiveSpec& o = e.objective;
        o.id = e.name;
        o.n = 1;
        o.m = 0;
        ScalarPiece p32 = piece(PieceKind::pow32);
        o.f_eval = [p32](const Vec& x) { return ExtReal(p32.eval(x[0]) + x[0] * x[0]); };
        o.g_eval = [](const Vec&) { return ExtReal(0.0); };
        o.q_eval = [](const Vec&, const Vec&) { return 0.0; };
        o.q_grad = [](const Vec&, const Vec&) { return std::pair<Vec, Vec>{{0.0}, {}}; };
        o.subdiff_dist = [p32](const Point& p) -> std::optional<double> {
            if (p32.kinked_at(p.x[0])) return std::nullopt;
            return std::abs(p32.deriv(p.x[0]) + 2.0 * p.x[0]);
        };
        o.critical_value = 0.0;
        o.prox_x_exact = [p32](const Point& p, double lam) {
            return Vec{p32.exact_prox(1.0 + 1.0 / (2.0 * lam), -p.x[0] / lam)};
        };
        o.scalar_x = {[p32](double u, const Point&) { return p32.eval(u) + u * u; }};
        e.known_critical_points = {{detail::origin(1, 0), 0.0}};
        PlkCertificate global;
        global.reference_point = detail::origin(1, 0);
        global.reference_value = 0.0;
        global.q = 1.0 / 3.0;
        global.M = 7.5;
        global.eta = 50.0;
        global.radius = 5.0;
        PlkCertificate local = global;
        local.M = 1.5;
        local.eta = 1.0;
        local.radius = 0.1;
        e.plk_certificates = {global, local};
        e.expected_regimes = {Regime::finite_termination, Regime::superlinear};
        e.default_box_radius = 5.0;
        e.nonsmooth_mask = [p32](const Point& p) { return p32.kinked_at(p.x[0]); };
        e.claimed_exponent = 1.0 / 3.0;
        e.default_start = Point{{1.0}, {}};
        cat.push_back(std::move(e));
    }

    // f(x) = |x|^{3/2}, g(y) = y^2, no coupling. The separable sum takes the
    // larger of the block exponents: max(1/3, 1/2) = 1/2.
    {
        CatalogEntry e = detail::coupled_entry("example2", piece(PieceKind::pow32),
                                               piece(PieceKind::quad), 0.0);
        e.objective.critical_value = 0.0;
        e.known_critical_points = {{detail::origin(1, 1), 0.0}};
        PlkCertificate c;
        c.reference_point = detail::origin(1, 1);
        c.reference_value = 0.0;
        c.q = 0.5;
        c.M = 1.5;
        c.eta = 3.0;
        c.radius = 1.0;
        e.plk_certificates = {c};
        e.expected_regimes = {Regime::linear};
        e.default_box_radius = 1.0;
        e.claimed_exponent = 0.5;
        cat.push_back(std::move(e));
    }

    // f(x) = x^2, g(y) = y: no critical point anywhere (the y slope never
    // vanishes), so the distance stays >= 1 and any exponent works over a
    // bounded box. Estimator demo only; excluded from solver runs.
    {
        CatalogEntry e = detail::coupled_entry("example3", piece(PieceKind::quad),
                                               piece(PieceKind::linear), 0.0);
        e.solver_eligible = false;
        e.default_box_radius = 1.0;
        cat.push_back(std::move(e));
    }

    // L = |x|^{3/2} + |y|^{3/2} + (x - y)^2, the two-block lift of example1.
    // Exponent 1/3 with M = 1.5 on the half-unit box.
    {
        CatalogEntry e = detail::coupled_entry("example4", piece(PieceKind::pow32),
                                               piece(PieceKind::pow32), 1.0);
        e.objective.critical_value = 0.0;
        e.known_critical_points = {{detail::origin(1, 1), 0.0}};
        PlkCertificate c;
        c.reference_point = detail::origin(1, 1);
        c.reference_value = 0.0;
        c.q = 1.0 / 3.0;
        c.M = 1.5;
        c.eta = 2.0;
        c.radius = 0.5;
        e.plk_certificates = {c};
        e.expected_regimes = {Regime::finite_termination, Regime::superlinear};
        e.default_box_radius = 0.5;
        e.claimed_exponent = 1.0 / 3.0;
        cat.push_back(std::move(e));
    }

    // L = |x| + |y| + (x - y)^2. Off the axes the gradient norm never drops
    // below sqrt(2), while values approach 0: no exponent works. The origin
    // is still critical (0 sits in the subdifferential of both kinks).
    {
        CatalogEntry e = detail::coupled_entry("example5", piece(PieceKind::abs),
                                               piece(PieceKind::abs), 1.0);
        e.objective.critical_value = 0.0;
        e.known_critical_points = {{detail::origin(1, 1), 0.0}};
        e.plk_fails = true;
        e.expected_regimes = {Regime::finite_termination};
        e.default_box_radius = 0.1;
        cat.push_back(std::move(e));
    }

    // f = x^2, g = y^2, Q = (x - y)^2: smooth strongly convex baseline with
    // exponent 1/2, so value decay is geometric.
    {
        CatalogEntry e = detail::coupled_entry("baseline_quadratic", piece(PieceKind::quad),
                                               piece(PieceKind::quad), 1.0);
        e.objective.critical_value = 0.0;
        e.known_critical_points = {{detail::origin(1, 1), 0.0}};
        PlkCertificate c;
        c.reference_point = detail::origin(1, 1);
        c.reference_value = 0.0;
        c.q = 0.5;
        c.M = 1.25;
        c.eta = 20.0;
        c.radius = 1.5;
        e.plk_certificates = {c};
        e.expected_regimes = {Regime::linear};
        e.default_box_radius = 1.5;
        e.claimed_exponent = 0.5;
        cat.push_back(std::move(e));
    }

    return cat;
}

inline const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> cat = build_catalog();
    return cat;
}

inline const CatalogEntry& find_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw UsageError("unknown problem: " + name);
}

// ---------------------------------------------------------------------------
// Calculus constructors

// Block-separable sum: f(x) = sum of the first ceil(k/2) pieces, g(y) the
// rest, no coupling. The certificate exponent is the max block exponent; the
// multiplier is fitted on the product box.
inline CatalogEntry make_separable(const std::vector<std::pair<ScalarPiece, double>>& blocks) {
    if (blocks.empty()) throw UsageError("make_separable: no blocks");
    std::vector<double> exps;
    std::string name = "separable(";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (!blocks[i].first.critical_point())
            throw UsageError("make_separable: block without a known critical point");
        exps.push_back(blocks[i].second);
        name += blocks[i].first.name();
        name += (i + 1 < blocks.size()) ? "," : ")";
    }
    double q = separable_sum_exponent(exps);

    const std::size_t k = blocks.size();
    const std::size_t n = (k + 1) / 2;
    const std::size_t m = k - n;  // 0 for a single block

    std::vector<ScalarPiece> px, py;
    for (std::size_t i = 0; i < n; ++i) px.push_back(blocks[i].first);
    for (std::size_t i = n; i < k; ++i) py.push_back(blocks[i].first);

    CatalogEntry e;
    e.name = name;
    ObjectiveSpec& o = e.objective;
    o.id = name;
    o.n = n;
    o.m = m;
    o.f_eval = [px](const Vec& x) {
        double s = 0.0;
        for (std::size_t j = 0; j < px.size(); ++j) s += px[j].eval(x[j]);
        return ExtReal(s);
    };
    o.g_eval = [py](const Vec& y) {
        double s = 0.0;
        for (std::size_t j = 0; j < py.size(); ++j) s += py[j].eval(y[j]);
        return ExtReal(s);
    };
    o.q_eval = [](const Vec&, const Vec&) { return 0.0; };
    o.q_grad = [n, m](const Vec&, const Vec&) {
        return std::pair<Vec, Vec>{Vec(n, 0.0), Vec(m, 0.0)};
    };
    o.subdiff_dist = [px, py](const Point& p) -> std::optional<double> {
        double s = 0.0;
        for (std::size_t j = 0; j < px.size(); ++j) {
            if (px[j].kinked_at(p.x[j])) return std::nullopt;
            double d = px[j].deriv(p.x[j]);
            s += d * d;
        }
        for (std::size_t j = 0; j < py.size(); ++j) {
            if (py[j].kinked_at(p.y[j])) return std::nullopt;
            double d = py[j].deriv(p.y[j]);
            s += d * d;
        }
        return std::sqrt(s);
    };
    o.prox_x_exact = [px](const Point& p, double lam) {
        Vec out(px.size());
        for (std::size_t j = 0; j < px.size(); ++j)
            out[j] = px[j].exact_prox(1.0 / (2.0 * lam), -p.x[j] / lam);
        return out;
    };
    o.prox_y_exact = [py](const Point& p, double mu) {
        Vec out(py.size());
        for (std::size_t j = 0; j < py.size(); ++j)
            out[j] = py[j].exact_prox(1.0 / (2.0 * mu), -p.y[j] / mu);
        return out;
    };
    for (std::size_t j = 0; j < n; ++j) {
        ScalarPiece pc = px[j];
        o.scalar_x.push_back([pc](double u, const Point&) { return pc.eval(u); });
    }
    for (std::size_t j = 0; j < m; ++j) {
        ScalarPiece pc = py[j];
        o.scalar_y.push_back([pc](double u, const Point&) { return pc.eval(u); });
    }

    Point crit = detail::origin(n, m);
    double crit_val = 0.0;
    {
        std::size_t a = 0;
        for (const auto& [pc, ex] : blocks) {
            double cp = *pc.critical_point();
            if (a < n)
                crit.x[a] = cp;
            else
                crit.y[a - n] = cp;
            crit_val += pc.eval(cp);
            ++a;
        }
    }
    o.critical_value = crit_val;
    e.known_critical_points = {{crit, crit_val}};
    e.nonsmooth_mask = [px, py](const Point& p) {
        for (std::size_t j = 0; j < px.size(); ++j)
            if (px[j].kinked_at(p.x[j])) return true;
        for (std::size_t j = 0; j < py.size(); ++j)
            if (py[j].kinked_at(p.y[j])) return true;
        return false;
    };
    e.default_box_radius = 1.0;
    e.claimed_exponent = q;
    e.plk_certificates = {fit_certificate_constant(o, crit, crit_val, q, 10.0, 1.0)};
    e.expected_regimes = theoretical_rate(q).admissible;
    e.default_start = Point{Vec(n, 1.0), Vec(m, 1.0)};
    return e;
}

// Proximal perturbation F(x, y) = f(x) + (beta/2)(x - y)^2 with g = 0. Keeps
// f's exponent alpha at the doubled critical point, for any beta > 0;
// requires alpha >= 1/2.
inline CatalogEntry make_proximally_perturbed(const ScalarPiece& f, double alpha, double beta) {
    double q = proximal_perturbation_exponent(alpha, beta);  // validates alpha, beta
    if (!f.critical_point())
        throw UsageError("make_proximally_perturbed: f needs a known critical point");
    double cp = *f.critical_point();

    CatalogEntry e;
    e.name = std::string("prox_perturbed(") + f.name() + ",beta=" + std::to_string(beta) + ")";
    ObjectiveSpec& o = e.objective;
    o.id = e.name;
    o.n = 1;
    o.m = 1;
    ScalarPiece pf = f;
    o.f_eval = [pf](const Vec& x) { return ExtReal(pf.eval(x[0])); };
    o.g_eval = [](const Vec&) { return ExtReal(0.0); };
    o.q_eval = [beta](const Vec& x, const Vec& y) {
        double d = x[0] - y[0];
        return 0.5 * beta * d * d;
    };
    o.q_grad = [beta](const Vec& x, const Vec& y) {
        double d = x[0] - y[0];
        return std::pair<Vec, Vec>{{beta * d}, {-beta * d}};
    };
    o.subdiff_dist = [pf, beta](const Point& p) -> std::optional<double> {
        if (pf.kinked_at(p.x[0])) return std::nullopt;
        double d = p.x[0] - p.y[0];
        double gx = pf.deriv(p.x[0]) + beta * d;
        double gy = -beta * d;
        return std::sqrt(gx * gx + gy * gy);
    };
    o.prox_x_exact = [pf, beta](const Point& p, double lam) {
        return Vec{pf.exact_prox(0.5 * beta + 1.0 / (2.0 * lam), -beta * p.y[0] - p.x[0] / lam)};
    };
    o.prox_y_exact = [beta](const Point& p, double mu) {
        double a = 0.5 * beta + 1.0 / (2.0 * mu);
        double b = -beta * p.x[0] - p.y[0] / mu;
        return Vec{-b / (2.0 * a)};
    };
    o.scalar_x = {[pf, beta](double u, const Point& p) {
        double d = u - p.y[0];
        return pf.eval(u) + 0.5 * beta * d * d;
    }};
    o.scalar_y = {[beta](double v, const Point& p) {
        double d = p.x[0] - v;
        return 0.5 * beta * d * d;
    }};

    Point crit{{cp}, {cp}};
    double crit_val = pf.eval(cp);
    o.critical_value = crit_val;
    e.known_critical_points = {{crit, crit_val}};
    e.nonsmooth_mask = [pf](const Point& p) { return pf.kinked_at(p.x[0]); };
    e.default_box_radius = 1.0;
    e.claimed_exponent = q;
    e.plk_certificates = {fit_certificate_constant(o, crit, crit_val, q, 10.0, 1.0)};
    e.expected_regimes = theoretical_rate(q).admissible;
    e.default_start = Point{{1.0}, {1.0}};
    return e;
}

}  // namespace altmin
