#pragma once

// JSON views of the report types. Doubles are emitted in shortest
// round-trip form, so parse(print(report)) reproduces every field exactly;
// non-finite margins map to null.

#include <json.hpp>

#include <optional>
#include <string>

#include "core.hpp"
#include "plk.hpp"
#include "problems.hpp"
#include "rates.hpp"

namespace altmin {

using Json = nlohmann::json;

inline Json to_json(const Point& p) { return Json{{"x", p.x}, {"y", p.y}}; }

inline Point point_from_json(const Json& j) {
    Point p;
    p.x = j.at("x").get<Vec>();
    p.y = j.at("y").get<Vec>();
    return p;
}

inline Json finite_or_null(double v) {
    if (std::isfinite(v)) return Json(v);
    return Json(nullptr);
}

inline double finite_or_inf(const Json& j) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    return j.get<double>();
}

template <typename T>
inline Json opt_json(const std::optional<T>& o) {
    if (o) return Json(*o);
    return Json(nullptr);
}

inline Json to_json(const PlkCertificate& c) {
    return Json{{"q", c.q},
                {"M", c.M},
                {"eta", c.eta},
                {"radius", c.radius},
                {"reference_point", to_json(c.reference_point)},
                {"reference_value", c.reference_value}};
}

inline PlkCertificate certificate_from_json(const Json& j) {
    PlkCertificate c;
    c.q = j.at("q").get<double>();
    c.M = j.at("M").get<double>();
    c.eta = j.at("eta").get<double>();
    c.radius = j.at("radius").get<double>();
    c.reference_point = point_from_json(j.at("reference_point"));
    c.reference_value = j.at("reference_value").get<double>();
    return c;
}

// Grid verification report; the estimator fields ride along when an estimate
// was part of the same command, and stay null otherwise.
inline Json to_json(const GridReport& r,
                    const std::optional<ExponentEstimate>& est = std::nullopt) {
    Json viol = Json::array();
    for (const auto& v : r.violations)
        viol.push_back(Json{{"point", to_json(v.point)}, {"lhs", v.lhs}, {"rhs", v.rhs}});
    Json j{{"problem", r.problem},
           {"certificate", to_json(r.certificate)},
           {"points_checked", r.points_checked},
           {"skipped_nonsmooth", r.skipped_nonsmooth},
           {"violations", viol},
           {"worst_margin", finite_or_null(r.worst_margin)},
           {"q_hat", nullptr},
           {"M_hat", nullptr},
           {"flat_floor", nullptr}};
    if (est) {
        j["q_hat"] = opt_json(est->q_hat);
        j["M_hat"] = opt_json(est->M_hat);
        j["flat_floor"] = est->flat_floor;
    }
    return j;
}

inline GridReport grid_report_from_json(const Json& j) {
    GridReport r;
    r.problem = j.at("problem").get<std::string>();
    r.certificate = certificate_from_json(j.at("certificate"));
    r.points_checked = j.at("points_checked").get<std::size_t>();
    r.skipped_nonsmooth = j.at("skipped_nonsmooth").get<std::size_t>();
    for (const auto& v : j.at("violations")) {
        Violation viol;
        viol.point = point_from_json(v.at("point"));
        viol.lhs = v.at("lhs").get<double>();
        viol.rhs = v.at("rhs").get<double>();
        r.violations.push_back(std::move(viol));
    }
    r.worst_margin = finite_or_inf(j.at("worst_margin"));
    return r;
}

inline Json to_json(const ExponentEstimate& e) {
    return Json{{"q_hat", opt_json(e.q_hat)},
                {"M_hat", opt_json(e.M_hat)},
                {"flat_floor", e.flat_floor},
                {"reference_kind", e.reference_kind},
                {"reference_value", e.reference_value},
                {"usable_samples", e.usable_samples},
                {"seed", e.seed},
                {"dist_floor", e.dist_floor},
                {"median_dist", e.median_dist}};
}

inline Json to_json(const RateReport& r) {
    return Json{{"regime", to_string(r.regime)},
                {"fitted_ratio", opt_json(r.fitted_ratio)},
                {"fitted_exponent", opt_json(r.fitted_exponent)},
                {"implied_q", opt_json(r.implied_q)},
                {"theoretical_regime", opt_json(r.theoretical_regime)},
                {"match", opt_json(r.match)},
                {"window", Json::array({r.window.first, r.window.second})},
                {"config",
                 Json{{"min_len", r.config.min_len},
                      {"zero_tol", r.config.zero_tol},
                      {"super_tol", r.config.super_tol},
                      {"linear_lo", r.config.linear_lo},
                      {"linear_hi", r.config.linear_hi},
                      {"spread_tol", r.config.spread_tol},
                      {"r2_min", r.config.r2_min}}}};
}

inline RateReport rate_report_from_json(const Json& j) {
    RateReport r;
    r.regime = regime_from_string(j.at("regime").get<std::string>());
    if (!j.at("fitted_ratio").is_null()) r.fitted_ratio = j.at("fitted_ratio").get<double>();
    if (!j.at("fitted_exponent").is_null())
        r.fitted_exponent = j.at("fitted_exponent").get<double>();
    if (!j.at("implied_q").is_null()) r.implied_q = j.at("implied_q").get<double>();
    if (!j.at("theoretical_regime").is_null())
        r.theoretical_regime = j.at("theoretical_regime").get<std::string>();
    if (!j.at("match").is_null()) r.match = j.at("match").get<bool>();
    r.window = {j.at("window").at(0).get<std::size_t>(), j.at("window").at(1).get<std::size_t>()};
    const Json& c = j.at("config");
    r.config.min_len = c.at("min_len").get<std::size_t>();
    r.config.zero_tol = c.at("zero_tol").get<double>();
    r.config.super_tol = c.at("super_tol").get<double>();
    r.config.linear_lo = c.at("linear_lo").get<double>();
    r.config.linear_hi = c.at("linear_hi").get<double>();
    r.config.spread_tol = c.at("spread_tol").get<double>();
    r.config.r2_min = c.at("r2_min").get<double>();
    return r;
}

inline Json run_summary_json(const std::string& problem, const RunTrace& trace,
                             double final_residual, std::size_t descent_violations) {
    return Json{{"problem", problem},
                {"iterations", trace.records.empty() ? 0 : trace.records.back().k},
                {"final_value", trace.records.back().value},
                {"final_residual", finite_or_null(final_residual)},
                {"termination_reason", to_string(trace.termination_reason)},
                {"descent_violations", descent_violations}};
}

inline Json catalog_entry_json(const CatalogEntry& e) {
    Json certs = Json::array();
    for (const auto& c : e.plk_certificates) certs.push_back(to_json(c));
    Json regimes = Json::array();
    for (const auto& r : e.expected_regimes) regimes.push_back(to_string(r));
    return Json{{"name", e.name},
                {"n", e.objective.n},
                {"m", e.objective.m},
                {"certificates", certs},
                {"expected_regimes", regimes},
                {"solver_eligible", e.solver_eligible},
                {"plk_fails", e.plk_fails},
                {"claimed_exponent", opt_json(e.claimed_exponent)},
                {"default_box_radius", e.default_box_radius}};
}

}  // namespace altmin
