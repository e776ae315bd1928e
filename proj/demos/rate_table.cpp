// Runs every solver-eligible catalog problem from its default start and
// prints one line per problem: iterations, final value, termination reason,
// and the classified value-decay regime next to the certificate prediction.

#include <cstdio>

#include <altmin/altmin.hpp>

int main() {
    using namespace altmin;

    std::printf("%-22s %6s %13s %20s %-14s %s\n", "problem", "iters", "final L",
                "termination", "observed", "claimed q");
    for (const auto& entry : catalog()) {
        if (!entry.solver_eligible) continue;
        SolverConfig cfg;
        RunTrace trace = run(entry.objective, entry.default_start, cfg);

        double ref = entry.objective.critical_value.value_or(trace.records.back().value);
        RateReport rep = classify_value_rate(trace.values(), ref);

        char qbuf[32] = "-";
        if (entry.claimed_exponent) std::snprintf(qbuf, sizeof(qbuf), "%.4f", *entry.claimed_exponent);
        std::printf("%-22s %6zu %13.4e %20s %-14s %s\n", entry.name.c_str(),
                    trace.records.back().k, trace.records.back().value,
                    to_string(trace.termination_reason).c_str(), to_string(rep.regime).c_str(),
                    qbuf);
    }
    return 0;
}
