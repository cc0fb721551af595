#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>

#include "statuscale/errors.hpp"

namespace statuscale {

// Exponential deviation score for one interval. Zero exactly at the target,
// antisymmetric around it, monotone in utilization, bounded by K^(1-tar)-1
// above and 1-K^tar below.
inline double load_score(double u, double target, double K) {
    if (u >= target) return std::pow(K, u - target) - 1.0;
    return 1.0 - std::pow(K, target - u);
}

// Replica step for one action: a fixed fraction of the current count,
// never less than one.
inline int replica_step(int replicas, double delta) {
    return std::max(static_cast<int>(std::ceil(delta * replicas)), 1);
}

enum class ScaleAction { Hold, Up, Down };

struct HorizontalParams {
    double K = 2.0;
    double target = 0.8;
    std::size_t window = 6;    // intervals summed into S_T
    double upper_total = 0.3;  // S_T above this scales up
    double lower_total = -1.2;
    double upper_single = 0.12;  // single-interval score above this scales up
    double lower_single = -0.6;
    double delta = 0.1;       // replica step fraction
    double cooloff = 300.0;   // seconds between actions
    int min_replicas = 1;
    int max_replicas = 20;
};

struct ScaleDecision {
    ScaleAction action = ScaleAction::Hold;
    int target_replicas = 0;
    double score = 0.0;
    double window_sum = 0.0;
    bool in_cooldown = false;
};

// Score-window horizontal scaler. Every observation feeds the window, also
// during the cooling-off period; the cooldown only vetoes actions. An
// action arms the cooldown and reports the new replica target, bounds
// clamped; a trigger that cannot change the count (already at a bound) is
// a hold and does not arm anything.
class HorizontalScaler {
public:
    explicit HorizontalScaler(HorizontalParams params = {}) : params_(params) {
        if (params_.min_replicas < 1 || params_.max_replicas < params_.min_replicas)
            throw ConstraintViolated("replica bounds must satisfy 1 <= min <= max");
        if (params_.window == 0)
            throw ConstraintViolated("score window must be positive");
    }

    ScaleDecision decide(double now, double utilization, int replicas) {
        ScaleDecision d;
        d.score = load_score(utilization, params_.target, params_.K);
        scores_.push_back(d.score);
        while (scores_.size() > params_.window) scores_.pop_front();
        for (double s : scores_) d.window_sum += s;
        d.target_replicas = replicas;
        d.in_cooldown = in_cooldown(now);
        if (d.in_cooldown) return d;

        ScaleAction want = ScaleAction::Hold;
        if (d.window_sum > params_.upper_total || d.score > params_.upper_single)
            want = ScaleAction::Up;
        else if (d.window_sum < params_.lower_total || d.score < params_.lower_single)
            want = ScaleAction::Down;
        if (want == ScaleAction::Hold) return d;

        const int step = replica_step(replicas, params_.delta);
        const int next =
            want == ScaleAction::Up
                ? std::min(replicas + step, params_.max_replicas)
                : std::max(replicas - step, params_.min_replicas);
        if (next == replicas) return d;

        d.action = want;
        d.target_replicas = next;
        last_action_ = now;
        return d;
    }

    bool in_cooldown(double now) const {
        return last_action_ && (now - *last_action_) < params_.cooloff;
    }

    const HorizontalParams& params() const { return params_; }

private:
    HorizontalParams params_;
    std::deque<double> scores_;
    std::optional<double> last_action_;
};

// Post-action quota schedule, evaluated in whole control intervals since
// the action. After a scale-up the per-replica quota eases from V toward
// V/k; after a scale-down it rises from V toward V*k to cover the removed
// replicas.
struct DecaySchedule {
    double V = 1.0;
    double k = 2.0;
    double beta = 0.5;

    double after_up(double t) const { return V * std::pow(k, std::pow(beta, t) - 1.0); }
    double after_down(double t) const { return V * std::pow(k, 1.0 - std::pow(beta, t)); }
};

}  // namespace statuscale
