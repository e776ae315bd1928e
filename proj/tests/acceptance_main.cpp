// Release gate: ten numbered checks covering the solver invariants, the inner
// prox accuracy, the exponent-inequality verdicts on the catalog problems, the
// partial-sum property, the rate classifier, end-to-end regime matches,
// residual bounds, and the exponent calculus. Prints one PASS/FAIL line per
// check and exits nonzero if any fail. Tolerances are pinned here on purpose;
// loosening them is a behavior change, not a cleanup.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <altmin/plk.hpp>
#include <altmin/problems.hpp>
#include <altmin/prox.hpp>
#include <altmin/rates.hpp>
#include <altmin/solver.hpp>

#include "oracles.hpp"

using namespace altmin;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, format);
    std::vsnprintf(buf, sizeof buf, format, ap);
    va_end(ap);
    return buf;
}

// --------------------------------------------------------------------------
// 1. Sufficient descent from random starts on every solver-eligible problem.

Outcome check_descent_invariant() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::size_t runs = 0, violations = 0;
    for (const auto& e : catalog()) {
        if (!e.solver_eligible) continue;
        Point center = e.known_critical_points.empty()
                           ? e.default_start
                           : e.known_critical_points.front().first;
        double r = e.default_box_radius;
        for (int s = 0; s < 5; ++s) {
            Point start = center;
            std::uniform_real_distribution<double> u(-r, r);
            for (auto& c : start.x) c += u(rng);
            for (auto& c : start.y) c += u(rng);
            SolverConfig cfg;
            RunTrace t = run(e.objective, start, cfg);
            violations += check_descent(t, cfg.policy).size();
            ++runs;
        }
    }
    double secs = seconds_since(t0);
    bool pass = violations == 0 && secs < 10.0;
    return {pass, fmt("%zu violations across %zu runs in %.2f s (budget 10 s)", violations, runs,
                      secs)};
}

// --------------------------------------------------------------------------
// 2. Inner solver vs a 1e6-point brute-force grid on every scalar subproblem.

Outcome check_prox_oracle() {
    struct Task {
        ScalarFn phi;
        double center = 0.0;
        double stepsize = 0.5;
    };
    std::vector<Task> tasks;
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> ucenter(-3.0, 3.0);
    std::uniform_real_distribution<double> ustep(0.12, 0.98);
    std::uniform_real_distribution<double> uother(-2.0, 2.0);

    std::size_t subproblems = 0;
    for (const auto& e : catalog()) {
        const ObjectiveSpec& o = e.objective;
        auto add = [&](const std::function<double(double, const Point&)>& scalar) {
            ++subproblems;
            for (int d = 0; d < 50; ++d) {
                Point other;
                other.x.resize(o.n);
                other.y.resize(o.m);
                for (auto& c : other.x) c = uother(rng);
                for (auto& c : other.y) c = uother(rng);
                Task t;
                t.phi = [scalar, other](double u) { return scalar(u, other); };
                t.center = ucenter(rng);
                t.stepsize = ustep(rng);
                tasks.push_back(std::move(t));
            }
        };
        for (const auto& s : o.scalar_x) add(s);
        for (const auto& s : o.scalar_y) add(s);
    }

    const double half = 5.0;  // box [center - 5, center + 5], width 10
    const double tol = std::max(1e-12, 2.0 * (2.0 * half) / 1e6);

    unsigned nthreads = std::min<unsigned>(thread_budget(), 16);
    std::vector<double> worst(nthreads, 0.0);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < tasks.size(); i += nthreads) {
                const Task& t = tasks[i];
                Interval box{t.center - half, t.center + half};
                double inner = solve_scalar_prox(t.phi, t.center, t.stepsize, box);
                double oracle = brute_force_prox(t.phi, t.center, t.stepsize, box, 1000000);
                worst[w] = std::max(worst[w], std::abs(inner - oracle));
            }
        });
    }
    for (auto& th : pool) th.join();
    double err = *std::max_element(worst.begin(), worst.end());

    bool pass = err <= tol;
    return {pass, fmt("max |inner - oracle| = %.3e over %zu draws (%zu subproblems), tol %.1e",
                      err, tasks.size(), subproblems, tol)};
}

// --------------------------------------------------------------------------
// 3. The global inequality for example1 on 1e5 uniform points of [-5, 5]:
//    distance >= t^{1/3} / 5.

Outcome check_example1_inequality() {
    const auto& e1 = find_entry("example1");
    PlkCertificate cert = e1.plk_certificates.front();
    bool pinned = std::abs(cert.q - 1.0 / 3.0) < 1e-15 &&
                  std::abs(cert.M * (1.0 - cert.q) - 5.0) < 1e-9 && cert.radius == 5.0;
    GridReport rep = verify_on_grid(e1.objective, cert, 100000);
    bool pass = pinned && rep.violations.empty() && rep.points_checked == 100000 &&
                rep.skipped_nonsmooth == 0;
    return {pass, fmt("%zu violations on %zu points (threshold t^(1/3)/5 pinned: %s)",
                      rep.violations.size(), rep.points_checked, pinned ? "yes" : "no")};
}

// --------------------------------------------------------------------------
// 4. Example4: the q = 1/3 inequality with the fitted multiplier from the
//    estimator, on a 1001 x 1001 grid of [-0.5, 0.5]^2 minus the axes.

Outcome check_example4_certificate() {
    const auto& e4 = find_entry("example4");
    Point origin{{0.0}, {0.0}};
    ExponentEstimate est = estimate_exponent(e4.objective, origin, 0.5);
    if (!est.M_hat) return {false, "estimator returned no multiplier"};

    PlkCertificate cert;
    cert.reference_point = origin;
    cert.reference_value = 0.0;
    cert.q = 1.0 / 3.0;
    cert.M = *est.M_hat;
    cert.eta = 2.0;
    cert.radius = 0.5;
    GridReport rep = verify_on_grid(e4.objective, cert, 1001);
    bool pass = rep.violations.empty() &&
                rep.points_checked >= 1001ull * 1001ull - 2ull * 1001ull &&
                rep.points_checked + rep.skipped_nonsmooth == 1001ull * 1001ull;
    return {pass, fmt("%zu violations, %zu checked, %zu on-axis skipped, fitted M = %.4f",
                      rep.violations.size(), rep.points_checked, rep.skipped_nonsmooth, cert.M)};
}

// --------------------------------------------------------------------------
// 5. Example5: gradient norms stay >= sqrt(2) off the axes while values
//    vanish (flat floor), and example2 separates q = 1/3 from q = 1/2.

Outcome check_example5_counterexample() {
    const auto& e5 = find_entry("example5");
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    double min_dist = std::numeric_limits<double>::infinity();
    std::size_t taken = 0;
    while (taken < 1000000) {
        Point p{{u(rng)}, {u(rng)}};
        if (p.x[0] == 0.0 || p.y[0] == 0.0) continue;
        auto d = e5.objective.subdiff_dist(p);
        if (!d) continue;
        min_dist = std::min(min_dist, *d);
        ++taken;
    }
    const double threshold = std::sqrt(2.0) - 1e-6;
    bool floor_ok = min_dist >= threshold;

    ExponentEstimate est = estimate_exponent(e5.objective, Point{{0.0}, {0.0}}, 0.1);
    bool flat = est.flat_floor;

    const auto& e2 = find_entry("example2");
    PlkCertificate at_half = e2.plk_certificates.front();
    PlkCertificate at_third = at_half;
    at_third.q = 1.0 / 3.0;
    GridReport rep_half = verify_on_grid(e2.objective, at_half, 1001);
    GridReport rep_third = verify_on_grid(e2.objective, at_third, 1001);

    bool pass = floor_ok && flat && rep_half.violations.empty() && !rep_third.violations.empty();
    return {pass,
            fmt("min off-axis dist = %.9f (>= %.9f: %s), flat_floor %s, example2 violations "
                "q=1/2: %zu, q=1/3: %zu",
                min_dist, threshold, floor_ok ? "yes" : "no", flat ? "set" : "missing",
                rep_half.violations.size(), rep_third.violations.size())};
}

// --------------------------------------------------------------------------
// 6. Partial-sum inequality on random decreasing positive sequences.

Outcome check_partial_sum_property() {
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<std::size_t> ulen(4, 100);
    std::uniform_real_distribution<double> uq(0.05, 0.95);
    std::size_t bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = ulen(rng);
        double q = uq(rng);
        Vec a = oracles::random_decreasing(rng, n);
        PartialSumCheck chk = partial_sum_bound_check(a, q, 0, n - 2);
        if (!chk.holds) ++bad;
    }
    return {bad == 0, fmt("%zu of 1000 sequences violated the bound (slack 1e-12)", bad)};
}

// --------------------------------------------------------------------------
// 7. Classifier calibration on synthetic profiles, plus scaling invariance.

Outcome check_classifier_calibration() {
    std::string note;
    bool ok = true;
    auto fail = [&](const std::string& what) {
        ok = false;
        if (!note.empty()) note += "; ";
        note += what;
    };

    for (double rho : {0.25, 0.5, 0.9}) {
        RateReport r = classify_value_rate(oracles::geometric_seq(1.0, rho, 40), 0.0);
        if (r.regime != Regime::linear || !r.fitted_ratio ||
            std::abs(*r.fitted_ratio - rho) > 1e-9)
            fail(fmt("geometric rho=%.2f -> %s", rho, to_string(r.regime).c_str()));
    }

    {
        ClassifierConfig short_cfg;
        short_cfg.min_len = 8;
        RateReport r8 =
            classify_value_rate(oracles::doubly_exponential_seq(8), 0.0, short_cfg);
        RateReport r11 = classify_value_rate(oracles::doubly_exponential_seq(11), 0.0);
        if (r8.regime != Regime::superlinear)
            fail(fmt("doubly-exponential(8) -> %s", to_string(r8.regime).c_str()));
        if (r11.regime != Regime::superlinear)
            fail(fmt("doubly-exponential(11) -> %s", to_string(r11.regime).c_str()));
    }

    for (double p : {1.0, 2.0, 4.0}) {
        RateReport r = classify_value_rate(oracles::power_seq(p, 10000), 0.0);
        double want = (1.0 + 1.0 / p) / 2.0;
        if (r.regime != Regime::sublinear || !r.implied_q || std::abs(*r.implied_q - want) > 0.02)
            fail(fmt("power p=%.0f -> %s", p, to_string(r.regime).c_str()));
    }

    for (double alpha : {1e-6, 1.0, 1e6}) {
        Vec g = oracles::geometric_seq(alpha, 0.5, 40);
        RateReport rg = classify_value_rate(g, 0.0);
        if (rg.regime != Regime::linear || std::abs(*rg.fitted_ratio - 0.5) > 1e-9)
            fail(fmt("scaled geometric alpha=%g -> %s", alpha, to_string(rg.regime).c_str()));

        Vec s = oracles::power_seq(2.0, 10000);
        for (auto& v : s) v *= alpha;
        RateReport rs = classify_value_rate(s, 0.0);
        if (rs.regime != Regime::sublinear || std::abs(*rs.implied_q - 0.75) > 0.02)
            fail(fmt("scaled power alpha=%g -> %s", alpha, to_string(rs.regime).c_str()));
    }

    return {ok, ok ? "9 profiles + 6 scaled variants classified correctly" : note};
}

// --------------------------------------------------------------------------
// 8/9. End-to-end runs, their regimes, and their residual bounds.

struct EndToEnd {
    const CatalogEntry* entry = nullptr;
    RunTrace trace;
    RateReport rate;
};

std::vector<EndToEnd> g_runs;

Outcome check_regime_match() {
    auto t0 = std::chrono::steady_clock::now();
    g_runs.clear();
    for (const char* name : {"baseline_quadratic", "example4"}) {
        EndToEnd r;
        r.entry = &find_entry(name);
        SolverConfig cfg;
        r.trace = run(r.entry->objective, r.entry->default_start, cfg);
        r.rate = classify_value_rate(r.trace.values(), 0.0);
        g_runs.push_back(std::move(r));
    }
    double secs = seconds_since(t0);

    const RateReport& rb = g_runs[0].rate;
    const RateReport& r4 = g_runs[1].rate;
    bool baseline_ok = rb.regime == Regime::linear;
    bool ex4_ok =
        r4.regime == Regime::finite_termination || r4.regime == Regime::superlinear;
    bool pass = baseline_ok && ex4_ok && secs < 5.0;
    return {pass, fmt("baseline -> %s, example4 -> %s, %.2f s (budget 5 s)",
                      to_string(rb.regime).c_str(), to_string(r4.regime).c_str(), secs)};
}

// Largest observed slope of the coupling gradient between random point pairs
// in the axis-aligned bounding box of the trace, inflated by 10% per side.
double coupling_gradient_slope(const ObjectiveSpec& obj, const RunTrace& trace) {
    const std::size_t dim = obj.n + obj.m;
    Vec lo(dim, std::numeric_limits<double>::infinity());
    Vec hi(dim, -std::numeric_limits<double>::infinity());
    for (const auto& r : trace.records) {
        for (std::size_t i = 0; i < obj.n; ++i) {
            lo[i] = std::min(lo[i], r.point.x[i]);
            hi[i] = std::max(hi[i], r.point.x[i]);
        }
        for (std::size_t i = 0; i < obj.m; ++i) {
            lo[obj.n + i] = std::min(lo[obj.n + i], r.point.y[i]);
            hi[obj.n + i] = std::max(hi[obj.n + i], r.point.y[i]);
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        double span = hi[i] - lo[i];
        lo[i] -= 0.1 * span + 1e-9;
        hi[i] += 0.1 * span + 1e-9;
    }

    std::mt19937_64 rng(909);
    auto draw = [&] {
        Point p;
        p.x.resize(obj.n);
        p.y.resize(obj.m);
        for (std::size_t i = 0; i < dim; ++i) {
            std::uniform_real_distribution<double> u(lo[i], hi[i]);
            double v = u(rng);
            if (i < obj.n)
                p.x[i] = v;
            else
                p.y[i - obj.n] = v;
        }
        return p;
    };
    double slope = 0.0;
    for (int t = 0; t < 4096; ++t) {
        Point a = draw(), b = draw();
        double dist2 = 0.0;
        for (std::size_t i = 0; i < obj.n; ++i) dist2 += (a.x[i] - b.x[i]) * (a.x[i] - b.x[i]);
        for (std::size_t i = 0; i < obj.m; ++i) dist2 += (a.y[i] - b.y[i]) * (a.y[i] - b.y[i]);
        if (dist2 < 1e-24) continue;
        auto ga = obj.q_grad(a.x, a.y);
        auto gb = obj.q_grad(b.x, b.y);
        double diff2 = 0.0;
        for (std::size_t i = 0; i < obj.n; ++i)
            diff2 += (ga.first[i] - gb.first[i]) * (ga.first[i] - gb.first[i]);
        for (std::size_t i = 0; i < obj.m; ++i)
            diff2 += (ga.second[i] - gb.second[i]) * (ga.second[i] - gb.second[i]);
        slope = std::max(slope, std::sqrt(diff2 / dist2));
    }
    return slope;
}

Outcome check_residual_bounds() {
    if (g_runs.empty()) return {false, "regime check did not run"};
    bool pass = true;
    std::string note;
    for (const auto& r : g_runs) {
        const RunTrace& t = r.trace;
        const std::size_t last = t.records.size() - 1;

        bool dropped = false;
        for (std::size_t k = 1; k < last; ++k) {
            const auto& rec = t.records[k];
            if (rec.residual_norm && *rec.residual_norm < 1e-6) {
                dropped = true;
                break;
            }
        }

        double cgrad = coupling_gradient_slope(r.entry->objective, t);
        double factor = cgrad + 1.0 / t.config.r_minus;
        std::size_t bound_failures = 0;
        for (std::size_t k = 1; k <= last; ++k) {
            const auto& rec = t.records[k];
            if (!rec.residual_norm) continue;
            double step = std::sqrt(rec.step_norm_x * rec.step_norm_x +
                                    rec.step_norm_y * rec.step_norm_y);
            if (*rec.residual_norm > factor * step + 1e-12) ++bound_failures;
        }

        pass = pass && dropped && bound_failures == 0;
        if (!note.empty()) note += "; ";
        note += fmt("%s: drop<1e-6 %s, %zu/%zu bound failures (factor %.2f)",
                    r.entry->name.c_str(), dropped ? "yes" : "no", bound_failures, last, factor);
    }
    return {pass, note};
}

// --------------------------------------------------------------------------
// 10. Exponent calculus: separable max rule and perturbation pass-through.

Outcome check_exponent_calculus() {
    bool sum_ok = separable_sum_exponent({1.0 / 3.0, 0.5}) == 0.5;

    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> ua(0.5, 1.0);
    std::uniform_real_distribution<double> ub(1e-9, 10.0);
    std::size_t kept = 0;
    for (int trial = 0; trial < 20; ++trial) {
        double alpha = ua(rng);
        double beta = ub(rng);
        if (proximal_perturbation_exponent(alpha, beta) == alpha) ++kept;
    }

    std::size_t rejected = 0;
    for (double alpha : {1.0 / 3.0, 0.49, 0.0}) {
        try {
            proximal_perturbation_exponent(alpha, 2.0);
        } catch (const UsageError&) {
            ++rejected;
        }
    }

    bool pass = sum_ok && kept == 20 && rejected == 3;
    return {pass, fmt("max{1/3,1/2}=1/2: %s; %zu/20 alphas returned unchanged; %zu/3 below-half "
                      "rejected",
                      sum_ok ? "yes" : "no", kept, rejected)};
}

}  // namespace

int main() {
    struct Check {
        int idx;
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Check> checks = {
        {1, "descent-invariant", check_descent_invariant},
        {2, "prox-oracle", check_prox_oracle},
        {3, "example1-inequality", check_example1_inequality},
        {4, "example4-fitted-certificate", check_example4_certificate},
        {5, "example5-counterexample", check_example5_counterexample},
        {6, "partial-sum-property", check_partial_sum_property},
        {7, "classifier-calibration", check_classifier_calibration},
        {8, "regime-match", check_regime_match},
        {9, "residual-bounds", check_residual_bounds},
        {10, "exponent-calculus", check_exponent_calculus},
    };

    int failed = 0;
    for (const auto& c : checks) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("C%-2d %-4s %-28s %s (%.2f s)\n", c.idx, o.pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    if (failed > 0) std::printf("%d of 10 checks failed\n", failed);
    return failed == 0 ? 0 : 1;
}
