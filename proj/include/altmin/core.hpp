#pragma once

// Shared domain types: points, extended reals, objective triples, stepsize
// policies and run traces. Everything here is immutable after construction
// and safe to share across threads.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace altmin {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Errors

class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& msg) : std::invalid_argument(msg) {}
};

class InnerSolverError : public std::runtime_error {
public:
    explicit InnerSolverError(const std::string& msg) : std::runtime_error(msg) {}
};

class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& msg, std::size_t line_no)
        : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"),
          line(line_no) {}
    std::size_t line;
};

// ---------------------------------------------------------------------------
// Extended reals
//
// A tagged value instead of IEEE infinity inside arithmetic: +inf + finite is
// well defined and NaN can never appear. Finite payloads are always finite
// doubles.

class ExtReal {
public:
    ExtReal() : v_(0.0), inf_(false) {}
    ExtReal(double v) : v_(v), inf_(false) {
        if (!std::isfinite(v)) throw UsageError("ExtReal: non-finite payload");
    }

    static ExtReal infinity() {
        ExtReal r;
        r.inf_ = true;
        return r;
    }

    bool is_finite() const { return !inf_; }

    double value() const {
        if (inf_) throw UsageError("ExtReal: value() on infinity");
        return v_;
    }

    // Returns the payload, or IEEE +inf for the infinite tag. Handy for
    // comparisons and printing; never fed back into ExtReal arithmetic.
    double as_double() const {
        return inf_ ? std::numeric_limits<double>::infinity() : v_;
    }

    ExtReal operator+(const ExtReal& o) const {
        if (inf_ || o.inf_) return infinity();
        return ExtReal(v_ + o.v_);
    }

    bool operator<(const ExtReal& o) const {
        if (inf_) return false;
        if (o.inf_) return true;
        return v_ < o.v_;
    }
    bool operator==(const ExtReal& o) const {
        return inf_ == o.inf_ && (inf_ || v_ == o.v_);
    }

private:
    double v_;
    bool inf_;
};

// ---------------------------------------------------------------------------
// Points

// A point z = (x, y) with the two blocks kept separate. m = 0 encodes a
// one-block problem: y stays empty everywhere and the y update is a no-op.
struct Point {
    Vec x;
    Vec y;
};

inline double squared_norm(const Vec& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return s;
}

inline double norm(const Vec& v) { return std::sqrt(squared_norm(v)); }

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline double distance(const Point& a, const Point& b) {
    return std::sqrt(squared_norm(sub(a.x, b.x)) + squared_norm(sub(a.y, b.y)));
}

inline double max_norm_distance(const Point& a, const Point& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) m = std::max(m, std::abs(a.x[i] - b.x[i]));
    for (std::size_t i = 0; i < a.y.size(); ++i) m = std::max(m, std::abs(a.y[i] - b.y[i]));
    return m;
}

inline bool all_finite(const Vec& v) {
    for (double c : v)
        if (!std::isfinite(c)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Objective triple L(x, y) = f(x) + Q(x, y) + g(y)

struct ObjectiveSpec {
    std::string id;
    std::size_t n = 1;  // x dimension
    std::size_t m = 0;  // y dimension, 0 = one-block problem

    std::function<ExtReal(const Vec&)> f_eval;
    std::function<ExtReal(const Vec&)> g_eval;  // unused when m == 0
    std::function<double(const Vec&, const Vec&)> q_eval;
    // gradient of Q: (d/dx, d/dy) at (x, y)
    std::function<std::pair<Vec, Vec>(const Vec&, const Vec&)> q_grad;

    // Closed-form distance from 0 to the subdifferential of L. nullopt means
    // the model is unavailable at that point (nonsmooth locus).
    std::function<std::optional<double>(const Point&)> subdiff_dist;

    // Known value of L at a critical point, when the problem has one.
    std::optional<double> critical_value;

    // Optional exact proximal maps for the two block subproblems. When set,
    // the solver uses them instead of the numeric inner solver.
    std::function<Vec(const Point&, double)> prox_x_exact;
    std::function<Vec(const Point&, double)> prox_y_exact;

    // Coordinate-separable scalar restrictions of the block subproblems:
    // scalar_x[j](u, p) = f_j(u) + Q(x with x_j := u, p.y), and mirrored for
    // y. These feed the generic inner solver and the brute-force oracle.
    std::vector<std::function<double(double, const Point&)>> scalar_x;
    std::vector<std::function<double(double, const Point&)>> scalar_y;
};

inline void check_dims(const ObjectiveSpec& obj, const Point& p) {
    if (p.x.size() != obj.n || p.y.size() != obj.m)
        throw UsageError("point dimensions do not match objective (" + obj.id + ")");
    if (!all_finite(p.x) || !all_finite(p.y))
        throw UsageError("non-finite coordinate in point");
}

inline ExtReal evaluate(const ObjectiveSpec& obj, const Point& p) {
    check_dims(obj, p);
    ExtReal fx = obj.f_eval(p.x);
    ExtReal gy = (obj.m == 0) ? ExtReal(0.0) : obj.g_eval(p.y);
    if (!fx.is_finite() || !gy.is_finite()) return ExtReal::infinity();
    return ExtReal(fx.value() + obj.q_eval(p.x, p.y) + gy.value());
}

// Subgradient witness built from two consecutive iterates:
//   x part: grad_x Q(x_k, y_k) - grad_x Q(x_k, y_{k-1}) - (x_k - x_{k-1}) / lambda
//   y part: -(y_k - y_{k-1}) / mu
// The witness lies in the subdifferential of L at the current point, so its
// norm upper-bounds the subdifferential distance there.
inline std::pair<Vec, Vec> residual(const ObjectiveSpec& obj, const Point& prev,
                                    const Point& curr, double lambda, double mu) {
    check_dims(obj, prev);
    check_dims(obj, curr);
    if (lambda <= 0.0 || (obj.m > 0 && mu <= 0.0))
        throw UsageError("residual: stepsizes must be positive");

    auto [gx_curr, gy_unused] = obj.q_grad(curr.x, curr.y);
    auto [gx_prev, gy_unused2] = obj.q_grad(curr.x, prev.y);
    (void)gy_unused;
    (void)gy_unused2;

    Vec rx(obj.n);
    for (std::size_t i = 0; i < obj.n; ++i)
        rx[i] = gx_curr[i] - gx_prev[i] - (curr.x[i] - prev.x[i]) / lambda;

    Vec ry(obj.m);
    for (std::size_t i = 0; i < obj.m; ++i)
        ry[i] = -(curr.y[i] - prev.y[i]) / mu;

    return {std::move(rx), std::move(ry)};
}

inline double residual_norm(const std::pair<Vec, Vec>& r) {
    return std::sqrt(squared_norm(r.first) + squared_norm(r.second));
}

// ---------------------------------------------------------------------------
// Stepsizes

// Sequences lambda_k, mu_k constrained to the open interval (r_minus, r_plus).
// The bounds are enforced on every query so bad schedules fail loudly at the
// iteration that first violates them.
struct StepsizePolicy {
    std::function<double(std::size_t)> lambda_seq;
    std::function<double(std::size_t)> mu_seq;
    double r_minus = 0.1;
    double r_plus = 1.0;

    static StepsizePolicy constant(double lam, double mu, double rm = 0.1, double rp = 1.0) {
        StepsizePolicy p;
        p.lambda_seq = [lam](std::size_t) { return lam; };
        p.mu_seq = [mu](std::size_t) { return mu; };
        p.r_minus = rm;
        p.r_plus = rp;
        if (!(rm < rp)) throw UsageError("stepsize policy: r_minus must be < r_plus");
        return p;
    }

    double lambda(std::size_t k) const { return checked(lambda_seq(k), "lambda", k); }
    double mu(std::size_t k) const { return checked(mu_seq(k), "mu", k); }

private:
    double checked(double v, const char* name, std::size_t k) const {
        if (!(r_minus < v && v < r_plus))
            throw UsageError(std::string("stepsize ") + name + "_" + std::to_string(k) +
                             " = " + std::to_string(v) + " outside (" +
                             std::to_string(r_minus) + ", " + std::to_string(r_plus) + ")");
        return v;
    }
};

// ---------------------------------------------------------------------------
// Traces

struct IterateRecord {
    std::size_t k = 0;
    Point point;
    double value = 0.0;
    double step_norm_x = 0.0;
    double step_norm_y = 0.0;
    std::optional<std::pair<Vec, Vec>> residual;  // absent at k = 0 or when not recorded
    std::optional<double> residual_norm;
};

enum class TerminationReason { max_iter, step_tol, value_tol, finite_termination };

inline std::string to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::max_iter: return "max_iter";
        case TerminationReason::step_tol: return "step_tol";
        case TerminationReason::value_tol: return "value_tol";
        case TerminationReason::finite_termination: return "finite_termination";
    }
    return "unknown";
}

inline TerminationReason termination_from_string(const std::string& s) {
    if (s == "max_iter") return TerminationReason::max_iter;
    if (s == "step_tol") return TerminationReason::step_tol;
    if (s == "value_tol") return TerminationReason::value_tol;
    if (s == "finite_termination") return TerminationReason::finite_termination;
    throw UsageError("unknown termination reason: " + s);
}

// Configuration actually used by a run, kept alongside the records so a trace
// is self-describing.
struct RunConfigSnapshot {
    double r_minus = 0.1;
    double r_plus = 1.0;
    std::size_t max_iter = 0;
    double step_tol = 0.0;
    double value_zero_tol = 0.0;
    bool record_residuals = true;
    Vec lambda_used;  // lambda_used[k] produced records[k + 1]
    Vec mu_used;
};

struct RunTrace {
    std::string objective_id;
    RunConfigSnapshot config;
    std::vector<IterateRecord> records;
    TerminationReason termination_reason = TerminationReason::max_iter;

    Vec values() const {
        Vec v;
        v.reserve(records.size());
        for (const auto& r : records) v.push_back(r.value);
        return v;
    }
};

}  // namespace altmin
