#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "statuscale/errors.hpp"

namespace statuscale {

// Piecewise-linear map from per-core request rate to CPU utilization.
// Beyond the last knot the final segment's slope extrapolates, and the
// forward direction clamps to [0, 1]. Knots must be strictly increasing
// in both coordinates so the inverse is well defined.
class ProfileCurve {
public:
    ProfileCurve() : ProfileCurve({{0.0, 0.0}, {100.0, 0.8}}) {}

    explicit ProfileCurve(std::vector<std::pair<double, double>> knots)
        : knots_(std::move(knots)) {
        if (knots_.size() < 2)
            throw ConstraintViolated("profile curve needs at least two knots");
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (knots_[i].first <= knots_[i - 1].first ||
                knots_[i].second <= knots_[i - 1].second)
                throw ConstraintViolated("profile curve knots must be strictly increasing");
        }
    }

    // rate (requests/s per core) -> utilization in [0, 1].
    double value(double rate) const {
        return std::clamp(raw(rate), 0.0, 1.0);
    }

    // utilization -> rate, extrapolating past the last knot.
    double inverse(double u) const {
        const auto& ks = knots_;
        std::size_t i = 1;
        while (i + 1 < ks.size() && u > ks[i].second) ++i;
        const double x0 = ks[i - 1].first, y0 = ks[i - 1].second;
        const double x1 = ks[i].first, y1 = ks[i].second;
        return x0 + (u - y0) * (x1 - x0) / (y1 - y0);
    }

private:
    double raw(double rate) const {
        const auto& ks = knots_;
        std::size_t i = 1;
        while (i + 1 < ks.size() && rate > ks[i].first) ++i;
        const double x0 = ks[i - 1].first, y0 = ks[i - 1].second;
        const double x1 = ks[i].first, y1 = ks[i].second;
        return y0 + (rate - x0) * (y1 - y0) / (x1 - x0);
    }

    std::vector<std::pair<double, double>> knots_;
};

// Closed-form service behavior for the simulator: utilization from the
// profile curve and an M/M/1-style response-time blowup near saturation.
struct ServiceModel {
    ProfileCurve curve;
    double rt_base_ms = 30.0;
    double rt_cap_ms = 500.0;

    double utilization(double load, int replicas, double quota) const {
        if (replicas < 1 || quota <= 0.0)
            throw ConstraintViolated("utilization needs replicas >= 1 and quota > 0");
        return curve.value(load / static_cast<double>(replicas) / quota);
    }

    double response_time(double u) const {
        const double eff = std::min(u, 0.99);
        return std::min(rt_base_ms / (1.0 - eff), rt_cap_ms);
    }

    // Cores needed to serve `load` at full utilization.
    double cpu_demand(double load) const {
        return load / curve.inverse(1.0);
    }

    // Cores per replica that put `load` at `target` utilization.
    double quota_for(double load, int replicas, double target) const {
        return load / static_cast<double>(replicas) / curve.inverse(target);
    }
};

}  // namespace statuscale
