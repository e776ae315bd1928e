#pragma once

// Convergence-rate tooling: the theoretical regime implied by an exponent q,
// an empirical classifier for value and iterate sequences, the partial-sum
// inequality used by the sublinear analysis, and a descent-gap check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace altmin {

enum class Regime { finite_termination, superlinear, linear, sublinear, inconclusive };

inline std::string to_string(Regime r) {
    switch (r) {
        case Regime::finite_termination: return "finite_termination";
        case Regime::superlinear: return "superlinear";
        case Regime::linear: return "linear";
        case Regime::sublinear: return "sublinear";
        case Regime::inconclusive: return "inconclusive";
    }
    return "unknown";
}

inline Regime regime_from_string(const std::string& s) {
    if (s == "finite_termination") return Regime::finite_termination;
    if (s == "superlinear") return Regime::superlinear;
    if (s == "linear") return Regime::linear;
    if (s == "sublinear") return Regime::sublinear;
    if (s == "inconclusive") return Regime::inconclusive;
    throw UsageError("unknown regime: " + s);
}

// What an exponent certificate predicts:
//   q = 0: finite termination.
//   q in (0, 1/2): finite termination or superlinear decay.
//   q = 1/2: linear decay.
//   q in (1/2, 1): sublinear, values ~ k^{-1/(2q-1)}, iterates ~ k^{-(1-q)/(2q-1)}.
struct TheoreticalRate {
    std::vector<Regime> admissible;
    std::optional<double> value_power;
    std::optional<double> iterate_power;
    std::string label;  // "finite_termination", "finite_or_superlinear", "linear", "sublinear"
};

inline TheoreticalRate theoretical_rate(double q) {
    if (!(q >= 0.0 && q < 1.0)) throw UsageError("theoretical_rate: q must be in [0, 1)");
    TheoreticalRate r;
    if (q == 0.0) {
        r.admissible = {Regime::finite_termination};
        r.label = "finite_termination";
    } else if (q < 0.5) {
        r.admissible = {Regime::finite_termination, Regime::superlinear};
        r.label = "finite_or_superlinear";
    } else if (q == 0.5) {
        r.admissible = {Regime::linear};
        r.label = "linear";
    } else {
        r.admissible = {Regime::sublinear};
        r.value_power = 1.0 / (2.0 * q - 1.0);
        r.iterate_power = (1.0 - q) / (2.0 * q - 1.0);
        r.label = "sublinear";
    }
    return r;
}

struct ClassifierConfig {
    std::size_t min_len = 10;   // minimum input length for any verdict
    double zero_tol = 0.0;      // extra floor below which entries count as zero
    double super_tol = 0.1;     // final ratio must fall below this for superlinear
    double linear_lo = 0.05;    // geometric ratio band
    double linear_hi = 0.95;
    double spread_tol = 0.1;    // max relative spread of trailing ratios for linear
    double r2_min = 0.99;       // log-log fit quality required for sublinear
};

struct RateReport {
    Regime regime = Regime::inconclusive;
    std::optional<double> fitted_ratio;     // present iff regime == linear, in (0, 1)
    std::optional<double> fitted_exponent;  // present iff regime == sublinear, > 0
    std::optional<double> implied_q;
    std::pair<std::size_t, std::size_t> window = {0, 0};  // [lo, hi) indices used
    ClassifierConfig config;
    // Filled by callers who know the certificate exponent.
    std::optional<std::string> theoretical_regime;
    std::optional<bool> match;
};

namespace detail {

enum class SequenceKind { values, iterates };

// Core classifier on the error sequence e_k = entry_k - reference >= 0.
// Order of tests: exact finite termination, then superlinear, then linear,
// then a sublinear power-law fit, else inconclusive.
inline RateReport classify_errors(const Vec& e_in, double floor, SequenceKind kind,
                                  const ClassifierConfig& cfg) {
    RateReport rep;
    rep.config = cfg;
    const std::size_t N = e_in.size();
    if (N < cfg.min_len) return rep;

    Vec e = e_in;
    // Window of entries above the numerical floor. Everything below it is
    // indistinguishable from the limit at double precision.
    std::size_t W = 0;
    while (W < N && e[W] > floor) ++W;
    rep.window = {0, W};

    // Finite termination: a below-floor tail whose trailing entries are
    // bit-identical. A tail that merely dips below the floor while still
    // shrinking is fast convergence, not arrival.
    if (W < N) {
        std::size_t run = 1;
        while (run < N && e[N - 1 - run] == e[N - 1]) ++run;
        if (run >= 2 && e[N - 1] <= floor) {
            rep.regime = Regime::finite_termination;
            rep.window = {0, N};
            return rep;
        }
    }

    if (W < 3) return rep;

    Vec ratio;
    for (std::size_t i = 0; i + 1 < W; ++i) ratio.push_back(e[i + 1] / e[i]);
    const std::size_t nr = ratio.size();

    // Superlinear: final ratio tiny and the trailing ratios either strictly
    // fall or are all already tiny.
    if (nr >= 2 && ratio.back() < cfg.super_tol) {
        std::size_t w = std::min<std::size_t>(5, nr);
        bool decreasing = true, all_small = true;
        for (std::size_t i = nr - w; i < nr; ++i) {
            if (i > nr - w && !(ratio[i] < ratio[i - 1])) decreasing = false;
            if (!(ratio[i] < cfg.super_tol)) all_small = false;
        }
        if (decreasing || all_small) {
            rep.regime = Regime::superlinear;
            return rep;
        }
    }

    // Linear: trailing ratios sit in a narrow band inside (0, 1).
    {
        std::size_t w = std::min<std::size_t>(10, nr);
        double lo = 1e300, hi = -1e300, sum = 0.0;
        bool in_band = true;
        for (std::size_t i = nr - w; i < nr; ++i) {
            double r = ratio[i];
            if (!(r >= cfg.linear_lo && r <= cfg.linear_hi)) in_band = false;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            sum += r;
        }
        double mean = sum / static_cast<double>(w);
        if (in_band && (hi - lo) / mean < cfg.spread_tol) {
            rep.regime = Regime::linear;
            rep.fitted_ratio = mean;
            rep.implied_q = 0.5;
            return rep;
        }
    }

    // Sublinear: least-squares fit of log e against log(k + 1) over the whole
    // window; accepted on a clean negative-slope power law.
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < W; ++i) {
            double x = std::log(static_cast<double>(i + 1));
            double y = std::log(e[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            syy += y * y;
        }
        double n = static_cast<double>(W);
        double den = n * sxx - sx * sx;
        if (den > 0.0) {
            double slope = (n * sxy - sx * sy) / den;
            double varY = n * syy - sy * sy;
            double r2 = (varY > 0.0) ? (n * sxy - sx * sy) * (n * sxy - sx * sy) / (den * varY)
                                     : 0.0;
            if (slope < 0.0 && r2 > cfg.r2_min) {
                double p = -slope;
                rep.regime = Regime::sublinear;
                rep.fitted_exponent = p;
                rep.implied_q = (kind == SequenceKind::values) ? (1.0 + 1.0 / p) / 2.0
                                                               : (1.0 + p) / (1.0 + 2.0 * p);
                return rep;
            }
        }
    }

    return rep;
}

}  // namespace detail

// Classifies the decay of L(z_k) - reference. The floor below which entries
// are treated as zero scales with the reference magnitude.
inline RateReport classify_value_rate(const Vec& values, double reference,
                                      const ClassifierConfig& cfg = {}) {
    const double eps = std::numeric_limits<double>::epsilon();
    double floor = std::max(cfg.zero_tol, 100.0 * eps * (1.0 + std::abs(reference)));
    Vec e;
    e.reserve(values.size());
    for (double v : values) {
        double t = v - reference;
        if (t < -1e-9 * (1.0 + std::abs(reference)))
            throw UsageError("classify_value_rate: value below reference");
        e.push_back(std::max(t, 0.0));
    }
    return detail::classify_errors(e, floor, detail::SequenceKind::values, cfg);
}

// Classifies the decay of |z_k - limit| for a recorded run.
inline RateReport classify_iterate_rate(const RunTrace& trace, const Point& limit,
                                        const ClassifierConfig& cfg = {}) {
    const double eps = std::numeric_limits<double>::epsilon();
    double scale = std::sqrt(squared_norm(limit.x) + squared_norm(limit.y));
    double floor = std::max(cfg.zero_tol, 100.0 * eps * (1.0 + scale));
    Vec d;
    d.reserve(trace.records.size());
    for (const auto& r : trace.records) d.push_back(distance(r.point, limit));
    return detail::classify_errors(d, floor, detail::SequenceKind::iterates, cfg);
}

// ---------------------------------------------------------------------------
// Partial-sum inequality
//
// For positive non-increasing a_k and q in (0, 1),
//   sum_{j=k}^{k+l} (a_j - a_{j+1}) / a_j^q <= (a_k^{1-q} - a_{k+l+1}^{1-q}) / (1 - q).

struct PartialSumCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

inline PartialSumCheck partial_sum_bound_check(const Vec& a, double q, std::size_t k,
                                               std::size_t l) {
    if (!(q > 0.0 && q < 1.0)) throw UsageError("partial_sum_bound_check: q must be in (0, 1)");
    if (a.size() < k + l + 2)
        throw UsageError("partial_sum_bound_check: need at least k + l + 2 entries");
    for (std::size_t j = k; j <= k + l + 1; ++j) {
        if (a[j] == 0.0)
            throw std::domain_error("partial_sum_bound_check: zero entry in summation range");
        if (a[j] < 0.0)
            throw UsageError("partial_sum_bound_check: entries must be positive");
    }
    PartialSumCheck res;
    for (std::size_t j = k; j <= k + l; ++j)
        res.lhs += (a[j] - a[j + 1]) / std::pow(a[j], q);
    res.rhs = (std::pow(a[k], 1.0 - q) - std::pow(a[k + l + 1], 1.0 - q)) / (1.0 - q);
    res.holds = res.lhs <= res.rhs + 1e-12;
    return res;
}

// ---------------------------------------------------------------------------
// Descent-gap check
//
// With gap_k = L(z_k) - reference, verifies gap_{k-1} - gap_k >= c0 * gap_k^{2q}
// along a trace. When c0 is not supplied, the largest constant satisfied by
// the whole trace is computed directly (the min of the per-step quotients).

struct DescentGapReport {
    double c0 = 0.0;
    std::vector<std::size_t> violations;
};

inline DescentGapReport descent_gap_check(const RunTrace& trace, double reference, double q,
                                          std::optional<double> c0 = std::nullopt) {
    if (!(q >= 0.0 && q < 1.0)) throw UsageError("descent_gap_check: q must be in [0, 1)");
    const double eps = std::numeric_limits<double>::epsilon();
    double floor = 100.0 * eps * (1.0 + std::abs(reference));

    DescentGapReport rep;
    std::vector<std::pair<std::size_t, double>> quotients;
    for (std::size_t k = 1; k < trace.records.size(); ++k) {
        double prev = trace.records[k - 1].value - reference;
        double cur = trace.records[k].value - reference;
        if (cur <= floor) break;  // at the limit, the bound is moot
        double quot = (prev - cur) / std::pow(cur, 2.0 * q);
        quotients.push_back({k, quot});
    }
    if (c0) {
        rep.c0 = *c0;
        for (auto [k, quot] : quotients)
            if (quot < *c0 - 1e-12) rep.violations.push_back(k);
    } else {
        rep.c0 = std::numeric_limits<double>::infinity();
        for (auto [k, quot] : quotients) rep.c0 = std::min(rep.c0, quot);
        if (quotients.empty()) rep.c0 = 0.0;
    }
    return rep;
}

}  // namespace altmin
