// Acceptance gate: one criterion per invocation, selected by argv[1].
// Prints the supporting numbers, then a single "criterion N: PASS|FAIL"
// verdict line; the exit code mirrors the verdict.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "statuscale/statuscale.hpp"

#include "../oracles.hpp"
#include "../property_suites.hpp"

using namespace statuscale;

namespace {

bool g_ok = true;

bool check(bool ok, const std::string& what) {
    std::printf("  [%s] %s\n", ok ? " ok " : "FAIL", what.c_str());
    if (!ok) g_ok = false;
    return ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// The stock burst workload: constant base with three bursts, the middle one
// far past what one node at the quota ceiling can serve.
SynthSpec burst_spec() {
    SynthSpec spec;
    spec.shape = Shape::Constant;
    spec.base = 100.0;
    spec.n = 720;
    spec.interval = 20.0;
    spec.noise_sigma = 3.0;
    spec.seed = 42;
    spec.bursts = {{2400.0, 480.0, 250.0}, {6000.0, 480.0, 500.0}, {9600.0, 320.0, 350.0}};
    return spec;
}

TimeSeries calibration_trace() {
    SynthSpec spec;
    spec.shape = Shape::Constant;
    spec.base = 15.0;
    spec.n = 600;
    spec.interval = 20.0;
    spec.noise_sigma = 1.0;
    spec.seed = 42;
    spec.bursts = {{2400.0, 600.0, 10.0}, {6000.0, 600.0, 12.0}, {9000.0, 400.0, 8.0}};
    return synthesize(spec);
}

double mean_avg_rt(const CompareResult& result, ControllerKind kind) {
    for (const auto& s : result.summaries)
        if (s.kind == kind) return s.avg_rt.mean;
    return 0.0;
}

// 1. Budget-matched comparison: the full method beats every vertical
//    baseline on request-weighted mean response time in at least 4 of 5
//    seeded repeats, inside the runtime budget.
void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    CompareSpec spec;
    spec.trace = burst_spec();
    spec.kinds = {ControllerKind::StatuScale, ControllerKind::PredictorOnly,
                  ControllerKind::PidOnly, ControllerKind::ThresholdOnly};
    spec.repeats = 5;
    spec.budget_match = true;
    const CompareResult result = run_compare(spec);
    const double secs = seconds_since(t0);

    for (int r = 0; r < spec.repeats; ++r) {
        std::string row = "repeat " + std::to_string(r) + ":";
        for (const auto& run : result.runs) {
            if (run.repeat != r) continue;
            char buf[96];
            std::snprintf(buf, sizeof buf, " %s=%.2fms", controller_name(run.kind),
                          run.report.avg_rt);
            row += buf;
        }
        std::printf("  %s\n", row.c_str());
    }

    bool budgets_ok = true;
    for (const auto& run : result.runs) {
        const double rel =
            std::abs(run.report.budget - run.target_budget) / run.target_budget;
        if (rel > 0.01 * (1.0 + 1e-9)) budgets_ok = false;
    }
    check(budgets_ok, "all budgets within 1% of the per-repeat target");

    const int wins = strict_wins(result, ControllerKind::StatuScale);
    check(wins >= 4, "statuscale strictly lowest avg_rt in " + std::to_string(wins) +
                         "/5 repeats (need >= 4)");
    char buf[64];
    std::snprintf(buf, sizeof buf, "runtime %.1fs < 60s", secs);
    check(secs < 60.0, buf);
}

// 2. Ablations at natural budgets: the predictor-only arm is at least 3%
//    slower, the vertical-only arm slower once bursts outgrow one node, and
//    the horizontal-only arm runs at least 10 points less utilized.
void criterion2() {
    CompareSpec spec;
    spec.trace = burst_spec();
    spec.kinds = {ControllerKind::StatuScale, ControllerKind::PredictorOnly,
                  ControllerKind::VerticalOnly};
    spec.repeats = 5;
    spec.budget_match = false;
    const CompareResult result = run_compare(spec);

    const double rt_full = mean_avg_rt(result, ControllerKind::StatuScale);
    const double rt_pred = mean_avg_rt(result, ControllerKind::PredictorOnly);
    const double rt_vert = mean_avg_rt(result, ControllerKind::VerticalOnly);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "predictor_only %.2fms vs statuscale %.2fms (%.1f%% worse, need >= 3%%)",
                  rt_pred, rt_full, 100.0 * (rt_pred / rt_full - 1.0));
    check(rt_pred >= 1.03 * rt_full, buf);

    SimParams base;
    const double peak_demand = base.service.cpu_demand(600.0);
    std::snprintf(buf, sizeof buf,
                  "vertical_only %.2fms > statuscale %.2fms (burst demand %.2f cores "
                  "vs %.2f quota cap)",
                  rt_vert, rt_full, peak_demand, base.max_quota);
    check(rt_vert > rt_full && peak_demand > base.max_quota, buf);

    double u_full = 0.0, u_horiz = 0.0;
    for (int r = 0; r < 5; ++r) {
        SynthSpec ts = burst_spec();
        ts.seed = 42 + static_cast<std::uint64_t>(r);
        const TimeSeries trace = synthesize(ts);
        SimParams p = base;
        p.seed = ts.seed;
        p.controller = ControllerKind::StatuScale;
        const auto full = simulate(trace, p);
        p.controller = ControllerKind::HorizontalOnly;
        const auto horiz = simulate(trace, p);
        double su = 0.0, hu = 0.0;
        for (const auto& row : full.rows) su += row.utilization;
        for (const auto& row : horiz.rows) hu += row.utilization;
        u_full += su / static_cast<double>(full.rows.size());
        u_horiz += hu / static_cast<double>(horiz.rows.size());
    }
    u_full /= 5.0;
    u_horiz /= 5.0;
    std::snprintf(buf, sizeof buf,
                  "horizontal_only mean utilization %.3f vs statuscale %.3f "
                  "(gap %.1fpp, need >= 10pp)",
                  u_horiz, u_full, 100.0 * (u_full - u_horiz));
    check(u_full - u_horiz >= 0.10, buf);
}

// 3. Lambda calibration sweep: rank trends over the grid and an interior
//    F1 maximum.
void criterion3() {
    const CalibrationResult result = calibrate_lambda(calibration_trace(), {});
    char buf[160];
    std::snprintf(buf, sizeof buf, "spearman(lambda, recall) = %+.4f (need >= +0.8)",
                  result.spearman_recall);
    check(result.spearman_recall >= 0.8, buf);
    std::snprintf(buf, sizeof buf, "spearman(lambda, precision) = %+.4f (need <= -0.8)",
                  result.spearman_precision);
    check(result.spearman_precision <= -0.8, buf);
    std::snprintf(buf, sizeof buf, "best lambda %.1f strictly inside (0, 60)",
                  result.best_lambda);
    check(result.best_lambda > 0.0 && result.best_lambda < 60.0, buf);
}

// 4. Control fidelity: PID regulation settles onto the utilization target,
//    and the gain network's analytic gradients match finite differences.
void criterion4() {
    SynthSpec spec;
    spec.shape = Shape::Constant;
    spec.base = 140.0;
    spec.n = 200;
    spec.interval = 20.0;
    spec.noise_sigma = 0.0;
    spec.seed = 42;
    SimParams p;
    p.controller = ControllerKind::PidOnly;
    const auto result = simulate(synthesize(spec), p);
    double worst = 0.0;
    for (std::size_t i = 150; i < result.rows.size(); ++i)
        worst = std::max(worst, std::abs(result.rows[i].utilization - p.target));
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "constant-load utilization within %.2e of target over final 50 "
                  "(need <= 0.01)",
                  worst);
    check(worst <= 0.01, buf);

    double max_rel = 0.0;
    Rng rng(88001);
    for (int cfg = 0; cfg < 20; ++cfg) {
        BpTuner tuner(4000 + static_cast<std::uint64_t>(cfg));
        const double target = rng.uniform(0.5, 0.9);
        const double measured = rng.uniform(0.0, 1.5);
        const double error = measured - target;
        const double integral = rng.uniform(-3.0, 3.0);
        const double derivative = rng.uniform(-1.0, 1.0);
        const auto grads = tuner.gradients(target, measured, error, integral, derivative);
        const double h = 1e-6;
        const auto fd_rel = [&](double& w, double analytic) {
            const double keep = w;
            w = keep + h;
            const double up = tuner.loss(target, measured, error, integral, derivative);
            w = keep - h;
            const double dn = tuner.loss(target, measured, error, integral, derivative);
            w = keep;
            const double fd = (up - dn) / (2.0 * h);
            return std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-8});
        };
        for (std::size_t i = 0; i < BpTuner::kIn; ++i)
            for (std::size_t j = 0; j < BpTuner::kHidden; ++j)
                max_rel = std::max(max_rel, fd_rel(tuner.w1(i, j), grads.w1[i][j]));
        for (std::size_t j = 0; j < BpTuner::kHidden; ++j)
            for (std::size_t k = 0; k < BpTuner::kOut; ++k)
                max_rel = std::max(max_rel, fd_rel(tuner.w2(j, k), grads.w2[j][k]));
    }
    std::snprintf(buf, sizeof buf,
                  "max gradient error vs central differences %.2e over 20 configs "
                  "(need < 1e-4)",
                  max_rel);
    check(max_rel < 1e-4, buf);
}

// 5. Closed-form spot values, all to 1e-9.
void criterion5() {
    const auto near = [](double got, double want) {
        return std::abs(got - want) <= 1e-9;
    };
    check(near(load_score(1.0, 0.8, 2.0), std::pow(2.0, 0.2) - 1.0),
          "load score at full utilization is 2^0.2 - 1");
    check(replica_step(5, 0.1) == 1 && replica_step(30, 0.1) == 3 &&
              replica_step(1000, 0.1) == 100,
          "replica steps for 5, 30 and 1000 replicas");

    const DecaySchedule sched{3.0, 2.0, 0.5};
    check(near(sched.after_up(0.0), 3.0) && near(sched.after_down(0.0), 3.0),
          "decay schedules start at the pre-action quota");
    check(near(sched.after_up(1.0), 3.0 * std::pow(2.0, -0.5)),
          "one step after scale-up the quota is V * 2^-0.5");
    check(near(sched.after_up(60.0), 1.5) && near(sched.after_down(60.0), 6.0),
          "long-run limits are V/k and V*k");

    check(near(slo_violation_rate({100.0, 300.0}, {1.0, 3.0}, 1.0, 200.0), 0.75),
          "request-weighted SLO violation hand case");
    check(near(under_provisioning_accuracy({{2.0, 1.0}, {1.0, 1.0}, 1.0, 5.0}), 0.1),
          "under-provisioning accuracy hand case");
    check(near(objective_score({1.0, 2.0, 100.0, 1}, 1.0), 102.0),
          "objective hand case");

    const Line ramp = fit_line({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    const Line tent = fit_line({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
    check(near(ramp.slope, 1.0) && near(ramp.intercept, 0.0) && near(ramp.at(5.0), 5.0),
          "line fit and evaluation on a ramp");
    check(near(tent.slope, 0.0) && near(tent.intercept, 1.0 / 3.0),
          "line fit on a tent window");
    const TrendChannel ch{{2.0, 2.0}, 1.0, false};
    check(near(ch.resistance(1.0), 5.0) && near(ch.support(1.0), 3.0),
          "resistance and support evaluation");
}

// 6. DTW against exhaustive path enumeration, plus affine invariance of the
//    correlation factor.
void criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(66001);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> x, y;
        const int m = rng.uniform_int(1, 6), n = rng.uniform_int(1, 6);
        for (int i = 0; i < m; ++i) x.push_back(rng.uniform(-5.0, 5.0));
        for (int j = 0; j < n; ++j) y.push_back(rng.uniform(-5.0, 5.0));
        worst = std::max(worst, std::abs(dtw_distance(x, y) - oracles::dtw_brute(x, y)));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "max |dtw - brute force| = %.2e over 500 pairs (need <= 1e-9)", worst);
    check(worst <= 1e-9, buf);

    int perfect = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.uniform_int(5, 40);
        const double a = rng.uniform(0.1, 5.0), b = rng.uniform(-5.0, 5.0);
        std::vector<double> demand, supply;
        for (int i = 0; i < n; ++i) {
            const double d = rng.uniform(0.5, 10.0);
            demand.push_back(d);
            supply.push_back(a * d + b);
        }
        if (correlation_factor(demand, supply).perfect) ++perfect;
    }
    std::snprintf(buf, sizeof buf,
                  "%d/100 positive-affine supplies report a perfect factor", perfect);
    check(perfect == 100, buf);

    const double secs = seconds_since(t0);
    std::snprintf(buf, sizeof buf, "runtime %.1fs < 10s", secs);
    check(secs < 10.0, buf);
}

// 7. Least-squares fits against an independent centered-covariance oracle,
//    and first-order stationarity of the residuals.
void criterion7() {
    Rng rng(77001);
    double worst_rel = 0.0, worst_grad = 0.0;
    for (int w = 0; w < 100; ++w) {
        const int n = rng.uniform_int(2, 30);
        std::vector<double> ts, ys;
        double t = rng.uniform(0.0, 50.0);
        for (int i = 0; i < n; ++i) {
            ts.push_back(t);
            t += rng.uniform(0.1, 10.0);
            ys.push_back(rng.uniform(-50.0, 50.0));
        }
        const Line l = fit_line(ts, ys);
        const auto o = oracles::fit_line_centered(ts, ys);
        worst_rel = std::max(worst_rel,
                             std::abs(l.slope - o.slope) / std::max(1.0, std::abs(o.slope)));
        worst_rel = std::max(worst_rel, std::abs(l.intercept - o.intercept) /
                                            std::max(1.0, std::abs(o.intercept)));

        double mt = 0.0;
        for (double v : ts) mt += v;
        mt /= static_cast<double>(n);
        double sr = 0.0, src = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = ys[i] - l.at(ts[i]);
            sr += r;
            src += r * (ts[i] - mt);
        }
        const double g1 = -2.0 * sr / static_cast<double>(n);
        const double g2 = -2.0 * src / static_cast<double>(n);
        worst_grad = std::max(worst_grad, std::sqrt(g1 * g1 + g2 * g2));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "max relative error vs oracle %.2e over 100 windows (need <= 1e-6)",
                  worst_rel);
    check(worst_rel <= 1e-6, buf);
    std::snprintf(buf, sizeof buf, "max residual-gradient norm %.2e (need < 1e-9)",
                  worst_grad);
    check(worst_grad < 1e-9, buf);
}

// 8. Randomized invariant suites, 1000 generated cases each.
void criterion8() {
    struct Suite {
        const char* name;
        props::Outcome out;
    };
    const Suite suites[] = {
        {"cooldown exclusion", props::cooldown_exclusion(8101, 1000)},
        {"replica bounds", props::replica_bounds(8102, 1000)},
        {"quota bounds", props::quota_bounds(8103, 1000)},
        {"score shape", props::score_shape(8104, 1000)},
        {"accuracy identities", props::accuracy_identities(8105, 1000)},
        {"channel lambda monotonicity", props::detector_monotonicity(8106, 1000)},
    };
    for (const auto& s : suites) {
        std::string what = std::string(s.name) + ": " + std::to_string(s.out.failures) +
                           " violations in " + std::to_string(s.out.cases) + " cases";
        if (!s.out.note.empty()) what += " (first: " + s.out.note + ")";
        check(s.out.failures == 0 && s.out.cases >= 1000, what);
    }
}

// 9. Determinism: the same configuration and seed reproduce the run CSVs
//    and the report JSON byte for byte.
void criterion9() {
    const SynthSpec spec = burst_spec();
    SimParams p;
    p.controller = ControllerKind::StatuScale;

    const TimeSeries t1 = synthesize(spec);
    const TimeSeries t2 = synthesize(spec);
    check(to_csv(t1) == to_csv(t2), "synthesized traces are byte-identical");

    const RunResult r1 = simulate(t1, p);
    const RunResult r2 = simulate(t2, p);
    check(run_records_csv(r1.rows) == run_records_csv(r2.rows),
          "run record CSVs are byte-identical");
    check(action_log_csv(r1.actions) == action_log_csv(r2.actions),
          "action log CSVs are byte-identical");
    const auto j1 = build_report(r1.rows, p.service, t1.interval, 1.0).to_json().dump(2);
    const auto j2 = build_report(r2.rows, p.service, t2.interval, 1.0).to_json().dump(2);
    check(j1 == j2, "evaluation report JSON is byte-identical");

    p.controller = ControllerKind::PidOnly;
    check(run_records_csv(simulate(t1, p).rows) == run_records_csv(simulate(t2, p).rows),
          "pid_only rerun is byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <criterion 1..9>\n", argv[0]);
        return 2;
    }
    const int n = std::atoi(argv[1]);
    switch (n) {
        case 1: criterion1(); break;
        case 2: criterion2(); break;
        case 3: criterion3(); break;
        case 4: criterion4(); break;
        case 5: criterion5(); break;
        case 6: criterion6(); break;
        case 7: criterion7(); break;
        case 8: criterion8(); break;
        case 9: criterion9(); break;
        default:
            std::fprintf(stderr, "usage: %s <criterion 1..9>\n", argv[0]);
            return 2;
    }
    std::printf("criterion %d: %s\n", n, g_ok ? "PASS" : "FAIL");
    return g_ok ? 0 : 1;
}
