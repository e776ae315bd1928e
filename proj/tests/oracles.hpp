#pragma once

// Test-side helpers kept independent of library internals: finite-difference
// gradients, synthetic decay sequences, and small random utilities.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <altmin/core.hpp>

namespace oracles {

using altmin::Point;
using altmin::Vec;

// Central finite differences of Q, matching the shape of ObjectiveSpec::q_grad.
inline std::pair<Vec, Vec> central_diff_q(
    const std::function<double(const Vec&, const Vec&)>& q, const Vec& x, const Vec& y,
    double h = 1e-6) {
    Vec gx(x.size()), gy(y.size());
    Vec xa = x, ya = y;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double o = xa[i];
        xa[i] = o + h;
        double up = q(xa, ya);
        xa[i] = o - h;
        double dn = q(xa, ya);
        xa[i] = o;
        gx[i] = (up - dn) / (2.0 * h);
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        double o = ya[i];
        ya[i] = o + h;
        double up = q(xa, ya);
        ya[i] = o - h;
        double dn = q(xa, ya);
        ya[i] = o;
        gy[i] = (up - dn) / (2.0 * h);
    }
    return {gx, gy};
}

// Central finite-difference gradient norm of a full objective at an interior
// smooth point.
inline double fd_grad_norm(const altmin::ObjectiveSpec& obj, const Point& p, double h) {
    double s = 0.0;
    Point q = p;
    for (std::size_t i = 0; i < q.x.size(); ++i) {
        double o = q.x[i];
        q.x[i] = o + h;
        double up = altmin::evaluate(obj, q).value();
        q.x[i] = o - h;
        double dn = altmin::evaluate(obj, q).value();
        q.x[i] = o;
        double g = (up - dn) / (2.0 * h);
        s += g * g;
    }
    for (std::size_t i = 0; i < q.y.size(); ++i) {
        double o = q.y[i];
        q.y[i] = o + h;
        double up = altmin::evaluate(obj, q).value();
        q.y[i] = o - h;
        double dn = altmin::evaluate(obj, q).value();
        q.y[i] = o;
        double g = (up - dn) / (2.0 * h);
        s += g * g;
    }
    return std::sqrt(s);
}

inline Vec geometric_seq(double e0, double rho, std::size_t n) {
    Vec v(n);
    double e = e0;
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = e;
        e *= rho;
    }
    return v;
}

// e_k = 2^(-2^k), the canonical superlinear profile.
inline Vec doubly_exponential_seq(std::size_t n) {
    Vec v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = std::pow(2.0, -std::pow(2.0, static_cast<double>(k)));
    return v;
}

// e_k = (k + 1)^(-p), the canonical sublinear profile.
inline Vec power_seq(double p, std::size_t n) {
    Vec v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = std::pow(static_cast<double>(k + 1), -p);
    return v;
}

// Strictly decreasing positive sequence with random multiplicative steps.
inline Vec random_decreasing(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> head(-2.0, 2.0);
    std::uniform_real_distribution<double> ratio(0.01, 0.999);
    Vec v(n);
    double e = std::exp(head(rng));
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = e;
        e *= ratio(rng);
    }
    return v;
}

// Trace whose iterate distances to `limit` follow d_k (1-D block layout).
inline altmin::RunTrace trace_with_distances(const Vec& d, double limit_x) {
    altmin::RunTrace t;
    for (std::size_t k = 0; k < d.size(); ++k) {
        altmin::IterateRecord r;
        r.k = k;
        r.point = Point{{limit_x + d[k]}, {}};
        r.value = 0.0;
        t.records.push_back(std::move(r));
    }
    return t;
}

}  // namespace oracles
