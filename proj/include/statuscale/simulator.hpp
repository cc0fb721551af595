#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "statuscale/detector.hpp"
#include "statuscale/errors.hpp"
#include "statuscale/horizontal.hpp"
#include "statuscale/metrics.hpp"
#include "statuscale/pid.hpp"
#include "statuscale/plant.hpp"
#include "statuscale/predictor.hpp"
#include "statuscale/trace.hpp"

namespace statuscale {

// statuscale is the full method; the others drop one leg or pin the
// vertical branch for ablations. horizontal_only has no vertical
// controller at all, predictor_only treats every interval as Stable,
// pid_only as Unstable, threshold_only replaces both with a band rule.
enum class ControllerKind {
    StatuScale,
    PredictorOnly,
    PidOnly,
    ThresholdOnly,
    VerticalOnly,
    HorizontalOnly,
};

inline const char* controller_name(ControllerKind k) {
    switch (k) {
        case ControllerKind::StatuScale: return "statuscale";
        case ControllerKind::PredictorOnly: return "predictor_only";
        case ControllerKind::PidOnly: return "pid_only";
        case ControllerKind::ThresholdOnly: return "threshold_only";
        case ControllerKind::VerticalOnly: return "vertical_only";
        case ControllerKind::HorizontalOnly: return "horizontal_only";
    }
    throw ConstraintViolated("unknown controller kind");
}

inline ControllerKind controller_from_name(const std::string& name) {
    for (ControllerKind k :
         {ControllerKind::StatuScale, ControllerKind::PredictorOnly,
          ControllerKind::PidOnly, ControllerKind::ThresholdOnly,
          ControllerKind::VerticalOnly, ControllerKind::HorizontalOnly})
        if (name == controller_name(k)) return k;
    throw ConfigError("unknown controller: " + name);
}

struct SimParams {
    ControllerKind controller = ControllerKind::StatuScale;
    std::string service_name = "service";
    double target = 0.8;
    double min_quota = 0.1;
    double max_quota = 4.0;
    int initial_replicas = 1;
    double initial_quota = 1.0;
    double lambda = 30.0;
    int segment_len = 5;
    HorizontalParams horizontal;
    double decay_k = 2.0;
    double decay_beta = 0.5;
    int predictor_window = 8;
    int cold_intervals = 20;     // threshold rule until enough history exists
    int retrain_every = 50;
    double threshold_band = 0.05;
    double threshold_step = 0.1;  // relative quota step, floored at 0.1 cores
    PredictorParams predictor;
    PidParams pid;
    ServiceModel service;
    std::uint64_t seed = 42;  // gain-network initialization
    bool debug_controllers = false;
};

struct RunRecord {
    double time = 0.0;
    double load = 0.0;
    double supply = 0.0;  // replicas * quota, cores
    double utilization = 0.0;
    int replicas = 1;
    double quota = 0.0;
    double response_time = 0.0;
    std::string status;  // cold | threshold | stable | unstable | decay | hold
    std::string action;  // empty | up | down
};

struct ActionRow {
    double time = 0.0;
    std::string microservice;
    std::string action;
    int replicas_before = 0;
    int replicas_after = 0;
    double score = 0.0;       // S_t at the action
    double window_sum = 0.0;  // S_T at the action
};

struct RunResult {
    std::vector<RunRecord> rows;
    std::vector<ActionRow> actions;
    nlohmann::ordered_json debug = nlohmann::ordered_json::array();
};

// One microservice against the analytic plant. Quota changes land on the
// next interval, replica changes one interval later (the provisioning
// delay). The status detector observes every interval, even while the
// cooling-off period routes the quota through the decay schedule.
inline RunResult simulate(const TimeSeries& trace, const SimParams& p) {
    if (trace.values.empty()) throw EmptyTrace{};
    const std::size_t n = trace.values.size();
    const ControllerKind kind = p.controller;
    const bool has_h = kind == ControllerKind::StatuScale ||
                       kind == ControllerKind::HorizontalOnly;
    const bool has_v = kind != ControllerKind::HorizontalOnly;
    const bool uses_detector = kind == ControllerKind::StatuScale ||
                               kind == ControllerKind::VerticalOnly;
    const bool uses_predictor = uses_detector || kind == ControllerKind::PredictorOnly;
    const bool uses_pid = uses_detector || kind == ControllerKind::PidOnly;

    const std::size_t w = static_cast<std::size_t>(p.predictor_window);

    int replicas = p.initial_replicas;
    double quota = p.initial_quota;
    double next_quota = quota;
    std::optional<int> pend_replicas;
    std::size_t pend_at = 0;

    Detector det(p.lambda, static_cast<std::size_t>(p.segment_len));
    HorizontalScaler scaler(p.horizontal);
    APidController pid(BpTuner(p.seed), p.pid);
    GradientBoostedPredictor model(p.predictor);
    bool model_fitted = false;

    std::optional<std::size_t> decay_start;
    double decay_V = 0.0;
    int decay_dir = 0;

    RunResult result;
    result.rows.reserve(n);

    const auto threshold_rule = [&](double u) {
        const double step = std::max(p.threshold_step * quota, 0.1);
        if (u > p.target + p.threshold_band) return quota + step;
        if (u < p.target - p.threshold_band) return quota - step;
        return quota;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const double tnow = trace.times[i];
        const double L = trace.values[i];
        if (pend_replicas && i >= pend_at) {
            replicas = *pend_replicas;
            pend_replicas.reset();
        }
        quota = next_quota;
        const double u = p.service.utilization(L, replicas, quota);
        const double rt = p.service.response_time(u);

        std::string action;
        if (has_h) {
            const ScaleDecision d = scaler.decide(tnow, u, replicas);
            if (d.action != ScaleAction::Hold) {
                pend_replicas = d.target_replicas;
                pend_at = i + 2;
                decay_start = i;
                decay_V = quota;
                decay_dir = d.action == ScaleAction::Up ? +1 : -1;
                action = d.action == ScaleAction::Up ? "up" : "down";
                result.actions.push_back({tnow, p.service_name, action, replicas,
                                          d.target_replicas, d.score, d.window_sum});
            }
        }
        const bool in_cool = has_h && scaler.in_cooldown(tnow);

        LoadStatus live = LoadStatus::Stable;
        if (uses_detector) live = det.observe(tnow, L);

        std::string status;
        if (has_v && !in_cool) {
            decay_start.reset();
            double nq = quota;
            if (i < static_cast<std::size_t>(p.cold_intervals)) {
                pid.reset();
                status = "cold";
                nq = threshold_rule(u);
            } else if (kind == ControllerKind::ThresholdOnly) {
                pid.reset();
                status = "threshold";
                nq = threshold_rule(u);
            } else {
                const LoadStatus st = uses_detector ? live
                                      : kind == ControllerKind::PredictorOnly
                                          ? LoadStatus::Stable
                                          : LoadStatus::Unstable;
                if (st == LoadStatus::Stable) {
                    pid.reset();
                    status = "stable";
                    if (model_fitted) {
                        std::vector<double> feat(
                            trace.values.begin() + static_cast<long>(i + 1 - w),
                            trace.values.begin() + static_cast<long>(i + 1));
                        const double pred = std::max(model.predict(feat), 0.0);
                        // Sizing below the load in hand would starve the
                        // service on a stale forecast, so the demand floors it.
                        nq = p.service.quota_for(std::max(pred, L), replicas, p.target);
                    }
                } else {
                    status = "unstable";
                    nq = quota + pid.step(u);
                    if (p.debug_controllers) {
                        nlohmann::ordered_json d;
                        d["time"] = tnow;
                        d["kp"] = pid.last_gains().kp;
                        d["ki"] = pid.last_gains().ki;
                        d["kd"] = pid.last_gains().kd;
                        d["integral"] = pid.integral();
                        if (const BpTuner* tun = pid.tuner()) {
                            d["w1"] = tun->weights1();
                            d["w2"] = tun->weights2();
                        }
                        result.debug.push_back(std::move(d));
                    }
                }
            }
            next_quota = std::clamp(nq, p.min_quota, p.max_quota);
        } else if (decay_start) {
            pid.reset();
            status = "decay";
            const double tt = static_cast<double>(i - *decay_start);
            const DecaySchedule sched{decay_V, p.decay_k, p.decay_beta};
            double nq = decay_dir > 0 ? sched.after_up(tt) : sched.after_down(tt);
            if (has_v) {
                // The schedule alone can starve a still-loaded service during
                // the cooling-off period; it acts as an envelope over the
                // demand-sized quota instead.
                const int rep_next = pend_replicas ? *pend_replicas : replicas;
                const double demand_q = p.service.quota_for(L, rep_next, p.target);
                nq = decay_dir > 0 ? std::max(nq, demand_q) : demand_q;
            }
            next_quota = std::clamp(nq, p.min_quota, p.max_quota);
        } else {
            status = "hold";
        }

        if (uses_predictor && i >= static_cast<std::size_t>(p.cold_intervals) &&
            (i - static_cast<std::size_t>(p.cold_intervals)) %
                    static_cast<std::size_t>(p.retrain_every) ==
                0 &&
            i > w + 10) {
            std::vector<std::vector<double>> X;
            std::vector<double> y;
            X.reserve(i - w);
            y.reserve(i - w);
            for (std::size_t j = 0; j + w < i; ++j) {
                X.emplace_back(trace.values.begin() + static_cast<long>(j),
                               trace.values.begin() + static_cast<long>(j + w));
                y.push_back(trace.values[j + w]);
            }
            model = GradientBoostedPredictor(p.predictor);
            model.fit(X, y);
            model_fitted = true;
        }

        result.rows.push_back({tnow, L, static_cast<double>(replicas) * quota, u,
                               replicas, quota, rt, status, action});
    }
    return result;
}

inline double budget_of(const std::vector<RunRecord>& rows, double dt) {
    double b = 0.0;
    for (const auto& r : rows) b += r.supply * dt;
    return b;
}

inline std::string run_records_csv(const std::vector<RunRecord>& rows) {
    std::string out =
        "time,load,supply,utilization,replicas,quota,response_time,status,action\n";
    for (const auto& r : rows) {
        out += detail::fmt_g17(r.time) + ',' + detail::fmt_g17(r.load) + ',' +
               detail::fmt_g17(r.supply) + ',' + detail::fmt_g17(r.utilization) + ',' +
               std::to_string(r.replicas) + ',' + detail::fmt_g17(r.quota) + ',' +
               detail::fmt_g17(r.response_time) + ',' + r.status + ',' + r.action + '\n';
    }
    return out;
}

inline std::string action_log_csv(const std::vector<ActionRow>& actions) {
    std::string out = "time,microservice,action,replicas_before,replicas_after,S_t,S_T\n";
    for (const auto& a : actions) {
        out += detail::fmt_g17(a.time) + ',' + a.microservice + ',' + a.action + ',' +
               std::to_string(a.replicas_before) + ',' +
               std::to_string(a.replicas_after) + ',' + detail::fmt_g17(a.score) + ',' +
               detail::fmt_g17(a.window_sum) + '\n';
    }
    return out;
}

struct EvaluationReport {
    double avg_rt = 0.0;
    double p99_rt = 0.0;
    double max_rt = 0.0;
    double slo_violation_200 = 0.0;
    double slo_violation_250 = 0.0;
    double a_U = 0.0;
    double a_O = 0.0;
    double correlation_factor = 0.0;
    double objective = 0.0;
    double budget = 0.0;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["avg_rt"] = avg_rt;
        j["p99_rt"] = p99_rt;
        j["max_rt"] = max_rt;
        j["slo_violation_200"] = slo_violation_200;
        j["slo_violation_250"] = slo_violation_250;
        j["a_U"] = a_U;
        j["a_O"] = a_O;
        j["correlation_factor"] = correlation_factor;
        j["objective"] = objective;
        j["budget"] = budget;
        return j;
    }
};

// Collapse one run into the report. Averages and violation rates are
// request-weighted; the provisioning accuracies normalize by the run's
// mean supply.
inline EvaluationReport build_report(const std::vector<RunRecord>& rows,
                                     const ServiceModel& service, double dt,
                                     double omega) {
    if (rows.empty()) throw InsufficientData("empty run");
    std::vector<double> loads, rts, supply, demand, weights;
    double replica_sum = 0.0, quota_sum = 0.0;
    for (const auto& r : rows) {
        loads.push_back(r.load);
        rts.push_back(r.response_time);
        supply.push_back(r.supply);
        demand.push_back(service.cpu_demand(r.load));
        weights.push_back(r.load * dt);
        replica_sum += static_cast<double>(r.replicas);
        quota_sum += r.quota;
    }
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);

    EvaluationReport rep;
    double acc = 0.0;
    for (std::size_t i = 0; i < rts.size(); ++i) acc += rts[i] * weights[i];
    rep.avg_rt = wsum > 0.0 ? acc / wsum : mean_of(rts);
    rep.p99_rt = weighted_percentile(rts, weights, 0.99);
    rep.max_rt = *std::max_element(rts.begin(), rts.end());
    rep.slo_violation_200 = slo_violation_rate(rts, loads, dt, 200.0);
    rep.slo_violation_250 = slo_violation_rate(rts, loads, dt, 250.0);

    SeriesPair pair{demand, supply, dt, mean_of(supply)};
    rep.a_U = under_provisioning_accuracy(pair);
    rep.a_O = over_provisioning_accuracy(pair);
    rep.correlation_factor = statuscale::correlation_factor(demand, supply).value;

    ObjectiveInputs obj;
    obj.avg_pods = replica_sum / static_cast<double>(rows.size());
    obj.avg_quota = quota_sum / static_cast<double>(rows.size());
    obj.avg_rt = rep.avg_rt;
    obj.microservices = 1;
    rep.objective = objective_score(obj, omega);
    rep.budget = budget_of(rows, dt);
    return rep;
}

}  // namespace statuscale
