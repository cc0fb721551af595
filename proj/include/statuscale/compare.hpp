#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "statuscale/errors.hpp"
#include "statuscale/metrics.hpp"
#include "statuscale/simulator.hpp"
#include "statuscale/trace.hpp"

namespace statuscale {

struct BudgetMatch {
    double floor = 0.0;   // min-quota floor that reaches the target budget
    double budget = 0.0;  // budget actually achieved at that floor
    int iterations = 0;
    bool matched = false;  // within tolerance of the target
};

// Raise the controller's min-quota floor until its spend matches the target
// budget. The budget is monotone in the floor, so a bisection between the
// configured floor and the quota cap suffices; controllers already at or
// above the target keep their natural floor.
inline BudgetMatch match_budget(const TimeSeries& trace, SimParams params,
                                double target_budget, double tol = 0.01,
                                int max_iter = 20) {
    if (target_budget <= 0.0) throw ConstraintViolated("target budget must be positive");
    const double dt = trace.interval;
    auto spend = [&](double floor) {
        params.min_quota = floor;
        return budget_of(simulate(trace, params).rows, dt);
    };
    BudgetMatch m;
    m.floor = params.min_quota;
    m.budget = spend(m.floor);
    m.matched = std::abs(m.budget - target_budget) / target_budget <= tol;
    if (m.matched || m.budget > target_budget) return m;
    double lo = m.floor, hi = params.max_quota;
    for (m.iterations = 1; m.iterations <= max_iter; ++m.iterations) {
        m.floor = 0.5 * (lo + hi);
        m.budget = spend(m.floor);
        if (std::abs(m.budget - target_budget) / target_budget <= tol) {
            m.matched = true;
            break;
        }
        (m.budget < target_budget ? lo : hi) = m.floor;
    }
    return m;
}

struct CompareSpec {
    SynthSpec trace;  // seed advances by one per repeat
    std::optional<TimeSeries> fixed_trace;  // file traces: same series every repeat
    std::vector<ControllerKind> kinds;
    SimParams base;  // controller and seed overridden per run
    int repeats = 5;
    bool budget_match = true;
    double omega = 1.0;
};

struct CompareRun {
    ControllerKind kind = ControllerKind::StatuScale;
    int repeat = 0;
    std::uint64_t seed = 0;
    double floor = 0.0;
    double target_budget = 0.0;
    EvaluationReport report;
};

struct CompareSummary {
    ControllerKind kind = ControllerKind::StatuScale;
    ConfidenceInterval avg_rt, p99_rt, slo_200, budget, objective;
};

struct CompareResult {
    std::vector<CompareRun> runs;  // repeat-major, kind order as configured
    std::vector<CompareSummary> summaries;
};

// Every repeat synthesizes its own trace and, when budget matching is on,
// equalizes all controllers to the largest natural spend on that trace
// before reporting.
inline CompareResult run_compare(const CompareSpec& spec) {
    if (spec.kinds.empty()) throw ConstraintViolated("no controllers to compare");
    if (spec.repeats < 1) throw ConstraintViolated("need at least one repeat");
    CompareResult result;
    for (int r = 0; r < spec.repeats; ++r) {
        SynthSpec ts = spec.trace;
        ts.seed = spec.trace.seed + static_cast<std::uint64_t>(r);
        const TimeSeries trace = spec.fixed_trace ? *spec.fixed_trace : synthesize(ts);
        const double dt = trace.interval;

        std::vector<SimParams> params;
        std::vector<double> naturals;
        for (ControllerKind k : spec.kinds) {
            SimParams p = spec.base;
            p.controller = k;
            p.seed = ts.seed;
            params.push_back(p);
            if (spec.budget_match)
                naturals.push_back(budget_of(simulate(trace, p).rows, dt));
        }
        const double target =
            spec.budget_match ? *std::max_element(naturals.begin(), naturals.end()) : 0.0;

        for (std::size_t ki = 0; ki < spec.kinds.size(); ++ki) {
            CompareRun run;
            run.kind = spec.kinds[ki];
            run.repeat = r;
            run.seed = ts.seed;
            SimParams p = params[ki];
            if (spec.budget_match) {
                const BudgetMatch m = match_budget(trace, p, target);
                if (!m.matched)
                    throw ConstraintViolated(
                        std::string("budget equalization did not converge for ") +
                        controller_name(run.kind) + " in repeat " +
                        std::to_string(r) + ": reached " + std::to_string(m.budget) +
                        " of target " + std::to_string(target) + " after " +
                        std::to_string(m.iterations) + " iterations");
                run.floor = m.floor;
                run.target_budget = target;
                p.min_quota = m.floor;
            } else {
                run.floor = p.min_quota;
            }
            run.report = build_report(simulate(trace, p).rows, p.service, dt, spec.omega);
            result.runs.push_back(run);
        }
    }

    for (ControllerKind k : spec.kinds) {
        std::vector<double> rt, p99, slo, budget, objective;
        for (const auto& run : result.runs) {
            if (run.kind != k) continue;
            rt.push_back(run.report.avg_rt);
            p99.push_back(run.report.p99_rt);
            slo.push_back(run.report.slo_violation_200);
            budget.push_back(run.report.budget);
            objective.push_back(run.report.objective);
        }
        CompareSummary s;
        s.kind = k;
        s.avg_rt = mean_ci95(rt);
        s.p99_rt = mean_ci95(p99);
        s.slo_200 = mean_ci95(slo);
        s.budget = mean_ci95(budget);
        s.objective = mean_ci95(objective);
        result.summaries.push_back(s);
    }
    return result;
}

// Repeats in which `kind` has the strictly lowest request-weighted average
// response time among all controllers in the comparison.
inline int strict_wins(const CompareResult& result, ControllerKind kind) {
    int wins = 0;
    int max_repeat = -1;
    for (const auto& run : result.runs) max_repeat = std::max(max_repeat, run.repeat);
    for (int r = 0; r <= max_repeat; ++r) {
        double best = 0.0;
        bool kind_best = false, first = true;
        for (const auto& run : result.runs) {
            if (run.repeat != r) continue;
            if (first || run.report.avg_rt < best) {
                best = run.report.avg_rt;
                kind_best = run.kind == kind;
                first = false;
            } else if (run.report.avg_rt == best) {
                kind_best = false;  // a tie is not a strict win
            }
        }
        if (kind_best) ++wins;
    }
    return wins;
}

}  // namespace statuscale
