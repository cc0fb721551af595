#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "statuscale/errors.hpp"

namespace statuscale {

inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) throw InsufficientData("mean of empty series");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Population standard deviation.
inline double stddev_of(const std::vector<double>& xs) {
    const double mu = mean_of(xs);
    double var = 0.0;
    for (double x : xs) var += (x - mu) * (x - mu);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

// Request-weighted SLO violation rate: every interval carries load*dt
// requests, and an interval violates when its response time exceeds the
// objective.
inline double slo_violation_rate(const std::vector<double>& response_times,
                                 const std::vector<double>& loads, double dt,
                                 double slo_ms) {
    if (response_times.size() != loads.size()) throw SeriesLengthMismatch{};
    if (response_times.empty()) throw InsufficientData("empty run");
    if (slo_ms <= 0.0) throw ConstraintViolated("slo must be positive");
    double total = 0.0, violating = 0.0;
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const double w = loads[i] * dt;
        total += w;
        if (response_times[i] > slo_ms) violating += w;
    }
    return total == 0.0 ? 0.0 : violating / total;
}

// Demand/supply pair for the provisioning accuracies. `total_resources` is
// the normalizer R (cores); the report builder uses the run's mean supply.
struct SeriesPair {
    std::vector<double> demand;
    std::vector<double> supply;
    double dt = 20.0;
    double total_resources = 1.0;
};

inline double under_provisioning_accuracy(const SeriesPair& p) {
    if (p.demand.size() != p.supply.size()) throw SeriesLengthMismatch{};
    if (p.demand.empty()) throw InsufficientData("empty series pair");
    if (p.total_resources <= 0.0) throw ConstraintViolated("R must be positive");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.demand.size(); ++i)
        acc += std::max(p.demand[i] - p.supply[i], 0.0) * p.dt;
    return acc / (static_cast<double>(p.demand.size()) * p.total_resources);
}

inline double over_provisioning_accuracy(const SeriesPair& p) {
    SeriesPair sw{p.supply, p.demand, p.dt, p.total_resources};
    return under_provisioning_accuracy(sw);
}

// Rescale x to the reference's population mean and spread.
inline std::vector<double> normalize_to(const std::vector<double>& x,
                                        const std::vector<double>& reference) {
    if (x.empty() || reference.empty()) throw InsufficientData("normalize of empty series");
    const double mx = mean_of(x), sx = stddev_of(x);
    const double my = mean_of(reference), sy = stddev_of(reference);
    if (sx == 0.0) throw ConstantSeries{};
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mx) * (sy / sx) + my;
    return out;
}

// Classic accumulated-cost dynamic time warping with |x_i - y_j| point
// costs. D[0][0] = 0, first row and column +inf, answer in the far corner.
inline double dtw_distance(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) throw InsufficientData("dtw of empty sequence");
    const std::size_t m = x.size(), n = y.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(n + 1, inf), cur(n + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        cur[0] = inf;
        for (std::size_t j = 1; j <= n; ++j) {
            const double cost = std::abs(x[i - 1] - y[j - 1]);
            cur[j] = cost + std::min({prev[j - 1], prev[j], cur[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

inline constexpr double kDtwEps = 1e-9;

struct CorrelationFactor {
    double value = 0.0;
    bool perfect = false;  // DTW distance at or below the division guard
};

// Supply is first normalized onto the demand series (mean-shift only when
// the supply is constant), then CF = max(m, n) / max(DTW, eps). Positive
// affine supply transforms normalize away entirely, land under eps, and
// report as perfect.
inline CorrelationFactor correlation_factor(const std::vector<double>& demand,
                                            const std::vector<double>& supply) {
    std::vector<double> adjusted;
    try {
        adjusted = normalize_to(supply, demand);
    } catch (const ConstantSeries&) {
        adjusted = supply;
        const double shift = mean_of(demand) - mean_of(supply);
        for (double& v : adjusted) v += shift;
    }
    const double d = dtw_distance(demand, adjusted);
    CorrelationFactor cf;
    cf.perfect = d <= kDtwEps;
    cf.value = static_cast<double>(std::max(demand.size(), supply.size())) /
               std::max(d, kDtwEps);
    return cf;
}

// Resource-and-latency objective on run averages. For a single microservice
// this is avg_pods * avg_quota_per_pod + omega * avg_rt.
struct ObjectiveInputs {
    double avg_pods = 1.0;       // sum of per-microservice average pod counts
    double avg_quota = 1.0;      // average per-pod quota, cores
    double avg_rt = 0.0;         // average response time, ms
    int microservices = 1;
};

inline double objective_score(const ObjectiveInputs& in, double omega) {
    if (in.microservices < 1 || in.avg_pods < static_cast<double>(in.microservices))
        throw ConstraintViolated("need pods >= microservices >= 1");
    const double am = static_cast<double>(in.microservices);
    return (in.avg_pods / am) * in.avg_quota + omega * (in.avg_rt / am);
}

// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw SeriesLengthMismatch{};
    if (xs.size() < 2) throw InsufficientData("spearman needs at least two points");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < idx.size()) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(xs), ry = ranks(ys);
    const double mx = mean_of(rx), my = mean_of(ry);
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0) return 0.0;
    return num / std::sqrt(dx * dy);
}

// Request-weighted percentile over per-interval response times.
inline double weighted_percentile(const std::vector<double>& values,
                                  const std::vector<double>& weights, double q) {
    if (values.size() != weights.size()) throw SeriesLengthMismatch{};
    if (values.empty()) throw InsufficientData("percentile of empty series");
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    double total = 0.0;
    for (double w : weights) total += w;
    double acc = 0.0;
    for (auto i : idx) {
        acc += weights[i];
        if (acc >= q * total) return values[i];
    }
    return values[idx.back()];
}

// Two-sided 95% Student-t quantiles; beyond the table the normal limit.
inline double t_quantile_95(std::size_t df) {
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                   2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                   2.131,  2.120, 2.110, 2.101, 2.093, 2.086, 2.080,
                                   2.074,  2.069, 2.064, 2.060, 2.056, 2.052, 2.048,
                                   2.045,  2.042};
    if (df == 0) throw ConstraintViolated("t quantile needs df >= 1");
    if (df <= 30) return table[df - 1];
    return 1.960;
}

struct ConfidenceInterval {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// 95% t-interval over independent repeats. A single repeat degenerates to
// a zero-width interval.
inline ConfidenceInterval mean_ci95(const std::vector<double>& xs) {
    ConfidenceInterval ci;
    ci.mean = mean_of(xs);
    if (xs.size() < 2) {
        ci.lo = ci.hi = ci.mean;
        return ci;
    }
    double var = 0.0;
    for (double x : xs) var += (x - ci.mean) * (x - ci.mean);
    var /= static_cast<double>(xs.size() - 1);
    const double se = std::sqrt(var / static_cast<double>(xs.size()));
    const double t = t_quantile_95(xs.size() - 1);
    ci.lo = ci.mean - t * se;
    ci.hi = ci.mean + t * se;
    return ci;
}

}  // namespace statuscale
