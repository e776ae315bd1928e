#pragma once

// The alternating minimization loop with full trace capture, plus the runtime
// checks that every run is expected to satisfy: per-iteration sufficient
// descent, square-summable steps, and subgradient residual bounds.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "prox.hpp"

namespace altmin {

struct SolverConfig {
    StepsizePolicy policy = StepsizePolicy::constant(0.5, 0.5);
    std::size_t max_iter = 100000;
    double step_tol = 1e-12;
    // Labels a stop as finite termination when the value has reached the known
    // critical value this closely (and the run actually moved first).
    double value_zero_tol = 1e-14;
    // Optional value-based stopping: stop once value - reference <= this.
    // 0 disables it; termination is then step- or budget-driven.
    double value_stop_tol = 0.0;
    InnerSolverConfig inner;
    bool record_residuals = true;
};

// Runs the alternating scheme from start until a stopping rule fires.
// records[0] is the start; records[k] holds z_k, L(z_k), the two block step
// norms and (when enabled) the subgradient residual witness.
inline RunTrace run(const ObjectiveSpec& obj, const Point& start, const SolverConfig& cfg) {
    if (cfg.max_iter < 1) throw UsageError("run: max_iter must be >= 1");
    if (!(cfg.step_tol > 0.0)) throw UsageError("run: step_tol must be > 0");
    check_dims(obj, start);

    ExtReal v0 = evaluate(obj, start);
    if (!v0.is_finite()) throw UsageError("run: L(start) must be finite");

    RunTrace trace;
    trace.objective_id = obj.id;
    trace.config.r_minus = cfg.policy.r_minus;
    trace.config.r_plus = cfg.policy.r_plus;
    trace.config.max_iter = cfg.max_iter;
    trace.config.step_tol = cfg.step_tol;
    trace.config.value_zero_tol = cfg.value_zero_tol;
    trace.config.record_residuals = cfg.record_residuals;

    IterateRecord rec0;
    rec0.k = 0;
    rec0.point = start;
    rec0.value = v0.value();
    trace.records.push_back(rec0);

    Point p = start;
    bool traveled = false;  // saw at least one step >= step_tol
    trace.termination_reason = TerminationReason::max_iter;

    for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
        double lam = cfg.policy.lambda(k - 1);
        double mu = (obj.m > 0) ? cfg.policy.mu(k - 1) : 0.5;

        Point p_new;
        try {
            p_new.x = prox_step_x(obj, p, lam, cfg.inner);
            Point p_half{p_new.x, p.y};
            p_new.y = prox_step_y(obj, p_half, mu, cfg.inner);
        } catch (const InnerSolverError& e) {
            throw InnerSolverError(std::string(e.what()) + " at iteration " + std::to_string(k));
        }

        ExtReal v = evaluate(obj, p_new);
        if (!v.is_finite())
            throw InnerSolverError("run: non-finite objective value at iteration " +
                                   std::to_string(k));

        IterateRecord rec;
        rec.k = k;
        rec.point = p_new;
        rec.value = v.value();
        rec.step_norm_x = norm(sub(p_new.x, p.x));
        rec.step_norm_y = norm(sub(p_new.y, p.y));
        if (cfg.record_residuals) {
            rec.residual = residual(obj, p, p_new, lam, (obj.m > 0) ? mu : 1.0);
            rec.residual_norm = residual_norm(*rec.residual);
        }
        trace.records.push_back(std::move(rec));
        trace.config.lambda_used.push_back(lam);
        trace.config.mu_used.push_back(mu);

        double step = std::sqrt(trace.records.back().step_norm_x * trace.records.back().step_norm_x +
                                trace.records.back().step_norm_y * trace.records.back().step_norm_y);
        double value = trace.records.back().value;

        if (cfg.value_stop_tol > 0.0 && obj.critical_value &&
            value - *obj.critical_value <= cfg.value_stop_tol) {
            trace.termination_reason = TerminationReason::value_tol;
            break;
        }
        if (step < cfg.step_tol) {
            // A run that never moved is just stationary; finite termination is
            // reserved for runs that traveled and then landed exactly on the
            // reference value.
            bool at_reference = obj.critical_value &&
                                value - *obj.critical_value <= cfg.value_zero_tol;
            trace.termination_reason = (at_reference && traveled)
                                           ? TerminationReason::finite_termination
                                           : TerminationReason::step_tol;
            break;
        }
        traveled = true;
        p = std::move(p_new);
    }
    return trace;
}

// Indices k >= 1 violating the sufficient-descent inequality
//   L(z_k) + |dx|^2/(2 lambda_{k-1}) + |dy|^2/(2 mu_{k-1}) <= L(z_{k-1})
// up to slack 1e-10 * (1 + |L(z_{k-1})|).
inline std::vector<std::size_t> check_descent(const RunTrace& trace, const StepsizePolicy& policy) {
    std::vector<std::size_t> bad;
    for (std::size_t k = 1; k < trace.records.size(); ++k) {
        const auto& r = trace.records[k];
        double prev = trace.records[k - 1].value;
        double lhs = r.value + r.step_norm_x * r.step_norm_x / (2.0 * policy.lambda(k - 1));
        if (r.step_norm_y > 0.0)
            lhs += r.step_norm_y * r.step_norm_y / (2.0 * policy.mu(k - 1));
        if (lhs > prev + 1e-10 * (1.0 + std::abs(prev))) bad.push_back(k);
    }
    return bad;
}

struct SquareSummary {
    double partial_sum = 0.0;  // sum over k of |dx_k|^2 + |dy_k|^2
    double tail_step = 0.0;    // final combined step norm
};

inline SquareSummary check_square_summability(const RunTrace& trace) {
    if (trace.records.empty()) throw UsageError("check_square_summability: empty trace");
    SquareSummary s;
    for (std::size_t k = 1; k < trace.records.size(); ++k) {
        const auto& r = trace.records[k];
        s.partial_sum += r.step_norm_x * r.step_norm_x + r.step_norm_y * r.step_norm_y;
    }
    if (trace.records.size() > 1) {
        const auto& last = trace.records.back();
        s.tail_step = std::sqrt(last.step_norm_x * last.step_norm_x +
                                last.step_norm_y * last.step_norm_y);
    }
    return s;
}

inline std::vector<double> residual_norms(const RunTrace& trace) {
    std::vector<double> out;
    for (std::size_t k = 1; k < trace.records.size(); ++k) {
        const auto& r = trace.records[k];
        if (!r.residual_norm)
            throw UsageError("residual_norms: trace has no recorded residuals");
        out.push_back(*r.residual_norm);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV trace format
//
// Header: k,x0,...,y0,...,L,step_norm,residual_norm. Doubles printed with 17
// significant digits so parsing reproduces them bit for bit. residual_norm is
// empty when not recorded.

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline void export_csv(const RunTrace& trace, std::size_t n, std::size_t m, std::ostream& os) {
    os << "k";
    for (std::size_t i = 0; i < n; ++i) os << ",x" << i;
    for (std::size_t i = 0; i < m; ++i) os << ",y" << i;
    os << ",L,step_norm,residual_norm\n";
    for (const auto& r : trace.records) {
        os << r.k;
        for (double c : r.point.x) os << ',' << detail::fmt17(c);
        for (double c : r.point.y) os << ',' << detail::fmt17(c);
        double step = std::sqrt(r.step_norm_x * r.step_norm_x + r.step_norm_y * r.step_norm_y);
        os << ',' << detail::fmt17(r.value) << ',' << detail::fmt17(step) << ',';
        if (r.residual_norm) os << detail::fmt17(*r.residual_norm);
        os << '\n';
    }
}

// Writes via a temp file and renames, so a failed run never leaves a partial
// trace at the destination.
inline void write_csv(const RunTrace& trace, std::size_t n, std::size_t m,
                      const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw UsageError("write_csv: cannot open " + tmp);
        export_csv(trace, n, m, os);
    }
    std::filesystem::rename(tmp, path);
}

// Parsed trace columns as needed by the rate classifier.
struct CsvTrace {
    std::size_t n = 0, m = 0;
    std::vector<IterateRecord> records;
    Vec values() const {
        Vec v;
        v.reserve(records.size());
        for (const auto& r : records) v.push_back(r.value);
        return v;
    }
};

inline CsvTrace import_csv(std::istream& is) {
    CsvTrace out;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(is, line)) throw CsvError("empty trace file", 1);
    ++line_no;
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 4 || header[0] != "k") throw CsvError("bad trace header", line_no);
    std::size_t n = 0, m = 0;
    std::size_t col = 1;
    while (col < header.size() && header[col] == "x" + std::to_string(n)) ++n, ++col;
    while (col < header.size() && header[col] == "y" + std::to_string(m)) ++m, ++col;
    if (col + 3 != header.size() || header[col] != "L" || header[col + 1] != "step_norm" ||
        header[col + 2] != "residual_norm")
        throw CsvError("bad trace header", line_no);
    out.n = n;
    out.m = m;

    auto parse_num = [&](const std::string& cell) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(cell, &pos);
        } catch (const std::exception&) {
            throw CsvError("not a number: '" + cell + "'", line_no);
        }
        if (pos != cell.size()) throw CsvError("not a number: '" + cell + "'", line_no);
        return v;
    };

    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (cells.size() != header.size())
            throw CsvError("expected " + std::to_string(header.size()) + " fields, got " +
                               std::to_string(cells.size()),
                           line_no);

        IterateRecord r;
        r.k = static_cast<std::size_t>(parse_num(cells[0]));
        r.point.x.resize(n);
        r.point.y.resize(m);
        for (std::size_t i = 0; i < n; ++i) r.point.x[i] = parse_num(cells[1 + i]);
        for (std::size_t i = 0; i < m; ++i) r.point.y[i] = parse_num(cells[1 + n + i]);
        r.value = parse_num(cells[1 + n + m]);
        double step = parse_num(cells[2 + n + m]);
        r.step_norm_x = step;  // combined norm; block split is not stored in CSV
        r.step_norm_y = 0.0;
        if (!cells[3 + n + m].empty()) r.residual_norm = parse_num(cells[3 + n + m]);
        out.records.push_back(std::move(r));
    }
    return out;
}

inline CsvTrace read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("read_csv: cannot open " + path);
    return import_csv(is);
}

}  // namespace altmin
