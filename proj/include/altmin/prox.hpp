#pragma once

// Inner solvers for the two proximal subproblems
//   min_u f(u) + Q(u, y) + |u - x|^2 / (2 lambda)
//   min_v g(v) + Q(x, v) + |v - y|^2 / (2 mu)
// plus a brute-force grid oracle used as ground truth in tests. All catalog
// subproblems are coordinate-separable, so the numeric path works one scalar
// coordinate at a time: dense bracketing over a search box, golden-section
// refinement inside each bracket, then a deterministic tie-break.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "core.hpp"

namespace altmin {

struct InnerSolverConfig {
    double tol = 1e-12;              // argument tolerance of the refinement
    std::size_t bracket_cells = 2048;
    double box_factor = 10.0;        // search box = center +- box_factor * (1 + |center|)
    int max_box_doublings = 3;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

using ScalarFn = std::function<double(double)>;

namespace detail {

// Golden-section minimization on [a, b]; assumes a minimizer is bracketed.
inline double golden_section(const ScalarFn& psi, double a, double b, double tol) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = psi(c), fd = psi(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = psi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = psi(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

// Global minimizer of phi(u) + (u - center)^2 / (2 stepsize) over box.
// Candidates: refined minimizer of every interior bracket, plus the center
// itself (so the returned point can never be worse than staying put). Ties
// within an absolute value window are broken toward the candidate closest to
// center, then toward the smaller coordinate.
inline double solve_scalar_prox(const ScalarFn& phi, double center, double stepsize,
                                Interval box, double tol = 1e-12,
                                std::size_t cells = 2048) {
    if (!(stepsize > 0.0)) throw UsageError("solve_scalar_prox: stepsize must be > 0");
    if (!(box.lo < box.hi)) throw UsageError("solve_scalar_prox: empty box");
    if (!(box.lo <= center && center <= box.hi))
        throw UsageError("solve_scalar_prox: box must contain center");
    if (cells < 8) cells = 8;

    auto psi = [&](double u) { return phi(u) + (u - center) * (u - center) / (2.0 * stepsize); };

    const double h = (box.hi - box.lo) / static_cast<double>(cells);
    std::vector<double> val(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) val[i] = psi(box.lo + h * static_cast<double>(i));

    // A boundary sample beating everything interior means the minimizer may
    // lie outside; the caller is expected to enlarge the box.
    std::size_t best_i = 0;
    for (std::size_t i = 1; i <= cells; ++i)
        if (val[i] < val[best_i]) best_i = i;
    if (best_i == 0 || best_i == cells)
        throw InnerSolverError("solve_scalar_prox: box too small (minimum on boundary)");

    struct Candidate {
        double u, psi;
    };
    std::vector<Candidate> cand;
    for (std::size_t i = 1; i < cells; ++i) {
        if (val[i] <= val[i - 1] && val[i] <= val[i + 1]) {
            double a = box.lo + h * static_cast<double>(i - 1);
            double b = box.lo + h * static_cast<double>(i + 1);
            double u = detail::golden_section(psi, a, b, tol);
            cand.push_back({u, psi(u)});
        }
    }
    cand.push_back({center, psi(center)});

    double best = cand[0].psi;
    for (const auto& c : cand) best = std::min(best, c.psi);
    const double tie = 1e-12 * (1.0 + std::abs(best));

    const Candidate* pick = nullptr;
    for (const auto& c : cand) {
        if (c.psi > best + tie) continue;
        if (!pick) {
            pick = &c;
            continue;
        }
        double dc = std::abs(c.u - center), dp = std::abs(pick->u - center);
        if (dc < dp - tol || (std::abs(dc - dp) <= tol && c.u < pick->u)) pick = &c;
    }
    return pick->u;
}

// Same solver with an automatic search box centered on the prox center,
// doubled a few times if the minimum keeps landing on the boundary.
inline double solve_scalar_prox_auto(const ScalarFn& phi, double center, double stepsize,
                                     const InnerSolverConfig& cfg = {}) {
    double half = cfg.box_factor * (1.0 + std::abs(center));
    for (int attempt = 0;; ++attempt) {
        try {
            return solve_scalar_prox(phi, center, stepsize, {center - half, center + half},
                                     cfg.tol, cfg.bracket_cells);
        } catch (const InnerSolverError&) {
            if (attempt >= cfg.max_box_doublings) throw;
            half *= 2.0;
        }
    }
}

// Grid-argmin oracle: evaluates the prox objective at grid_n equally spaced
// points (endpoints included) and returns the best one. Test-only ground
// truth; same tie-break as the real solver.
inline double brute_force_prox(const ScalarFn& phi, double center, double stepsize,
                               Interval box, std::size_t grid_n) {
    if (grid_n < 1000) throw UsageError("brute_force_prox: grid_n must be >= 1000");
    if (!(stepsize > 0.0)) throw UsageError("brute_force_prox: stepsize must be > 0");
    if (!(box.lo < box.hi)) throw UsageError("brute_force_prox: empty box");

    auto psi = [&](double u) { return phi(u) + (u - center) * (u - center) / (2.0 * stepsize); };
    const double h = (box.hi - box.lo) / static_cast<double>(grid_n - 1);

    double best_u = box.lo, best_v = psi(box.lo);
    for (std::size_t i = 1; i < grid_n; ++i) {
        double u = box.lo + h * static_cast<double>(i);
        double v = psi(u);
        if (v < best_v ||
            (v == best_v && (std::abs(u - center) < std::abs(best_u - center) ||
                             (std::abs(u - center) == std::abs(best_u - center) && u < best_u)))) {
            best_u = u;
            best_v = v;
        }
    }
    return best_u;
}

// x-block proximal step. Closed form when the objective provides one,
// otherwise coordinate-wise numeric solving of the scalar restrictions.
inline Vec prox_step_x(const ObjectiveSpec& obj, const Point& p, double lambda,
                       const InnerSolverConfig& cfg = {}) {
    check_dims(obj, p);
    if (!(lambda > 0.0)) throw UsageError("prox_step_x: lambda must be > 0");
    if (obj.prox_x_exact) return obj.prox_x_exact(p, lambda);
    if (obj.scalar_x.size() != obj.n)
        throw UsageError("prox_step_x: objective has no x-subproblem representation");

    Vec out(obj.n);
    for (std::size_t j = 0; j < obj.n; ++j) {
        const auto& sj = obj.scalar_x[j];
        out[j] = solve_scalar_prox_auto([&](double u) { return sj(u, p); }, p.x[j], lambda, cfg);
    }
    return out;
}

// y-block proximal step, with x already advanced inside p_half. m = 0 is a
// no-op returning the empty block.
inline Vec prox_step_y(const ObjectiveSpec& obj, const Point& p_half, double mu,
                       const InnerSolverConfig& cfg = {}) {
    check_dims(obj, p_half);
    if (obj.m == 0) return {};
    if (!(mu > 0.0)) throw UsageError("prox_step_y: mu must be > 0");
    if (obj.prox_y_exact) return obj.prox_y_exact(p_half, mu);
    if (obj.scalar_y.size() != obj.m)
        throw UsageError("prox_step_y: objective has no y-subproblem representation");

    Vec out(obj.m);
    for (std::size_t j = 0; j < obj.m; ++j) {
        const auto& sj = obj.scalar_y[j];
        out[j] = solve_scalar_prox_auto([&](double u) { return sj(u, p_half); }, p_half.y[j], mu, cfg);
    }
    return out;
}

}  // namespace altmin
