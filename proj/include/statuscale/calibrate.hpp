#pragma once

#include <cstddef>
#include <vector>

#include "statuscale/detector.hpp"
#include "statuscale/errors.hpp"
#include "statuscale/metrics.hpp"
#include "statuscale/predictor.hpp"
#include "statuscale/trace.hpp"

namespace statuscale {

struct CalibrationParams {
    std::vector<double> lambda_grid = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55};
    double tolerance = 0.05;  // underestimate margin for the reference labels
    int window = 8;
    int retrain = 50;
    int min_train = 10;
    int segment_len = 5;
    PredictorParams predictor;
};

struct LambdaScore {
    double lambda = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long tp = 0, fp = 0, fn = 0, tn = 0;
};

struct CalibrationResult {
    std::vector<LambdaScore> scores;       // one row per grid value, ascending
    double best_lambda = 0.0;              // F-max, ties broken toward smaller lambda
    double spearman_precision = 0.0;       // rank trend of precision over the grid
    double spearman_recall = 0.0;
    std::size_t labeled = 0;               // intervals with a reference label
    std::size_t positives = 0;             // of those, how many are underestimates
};

namespace detail {

// Walk-forward reference labels: retrain the predictor every `retrain`
// intervals on all one-step windows seen so far, then flag interval i
// when the forecast undershoots the actual load by more than `tolerance`.
// Intervals before the first retrain stay unlabeled (-1).
inline std::vector<int> underestimate_labels(const std::vector<double>& load,
                                             const CalibrationParams& p) {
    const std::size_t n = load.size();
    const std::size_t w = static_cast<std::size_t>(p.window);
    if (n <= w + static_cast<std::size_t>(p.min_train))
        throw InsufficientData("trace too short to label");
    std::vector<int> labels(n, -1);
    GradientBoostedPredictor model(p.predictor);
    bool fitted = false;
    std::vector<double> feat(w);
    for (std::size_t i = w; i < n; ++i) {
        if ((i - w) % static_cast<std::size_t>(p.retrain) == 0 &&
            i >= w + static_cast<std::size_t>(p.min_train)) {
            std::vector<std::vector<double>> X;
            std::vector<double> y;
            X.reserve(i - w);
            y.reserve(i - w);
            for (std::size_t j = 0; j + w < i; ++j) {
                X.emplace_back(load.begin() + static_cast<long>(j),
                               load.begin() + static_cast<long>(j + w));
                y.push_back(load[j + w]);
            }
            model = GradientBoostedPredictor(p.predictor);
            model.fit(X, y);
            fitted = true;
        }
        if (!fitted) continue;
        std::copy(load.begin() + static_cast<long>(i - w),
                  load.begin() + static_cast<long>(i), feat.begin());
        const double pred = model.predict(feat);
        labels[i] = pred < load[i] * (1.0 - p.tolerance) ? 1 : 0;
    }
    return labels;
}

}  // namespace detail

// Sweep the lambda grid against predictor-underestimate labels and keep the
// F1-best value. Labels are computed once; every grid value replays the same
// trace through a fresh detector.
inline CalibrationResult calibrate_lambda(const TimeSeries& trace,
                                          const CalibrationParams& p) {
    if (p.lambda_grid.empty()) throw ConstraintViolated("empty lambda grid");
    if (trace.values.empty()) throw EmptyTrace{};
    const auto labels = detail::underestimate_labels(trace.values, p);

    CalibrationResult result;
    for (int l : labels) {
        if (l >= 0) ++result.labeled;
        if (l == 1) ++result.positives;
    }

    for (double lambda : p.lambda_grid) {
        Detector det(lambda, p.segment_len);
        LambdaScore s;
        s.lambda = lambda;
        for (std::size_t i = 0; i < trace.values.size(); ++i) {
            const LoadStatus st = det.observe(trace.times[i], trace.values[i]);
            if (labels[i] < 0) continue;
            const bool under = labels[i] == 1;
            const bool flagged = st == LoadStatus::Unstable;
            if (under && flagged) ++s.tp;
            else if (!under && flagged) ++s.fp;
            else if (under && !flagged) ++s.fn;
            else ++s.tn;
        }
        s.precision = s.tp + s.fp > 0 ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp) : 0.0;
        s.recall = s.tp + s.fn > 0 ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn) : 0.0;
        s.f1 = s.precision + s.recall > 0.0
                   ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                   : 0.0;
        result.scores.push_back(s);
    }

    result.best_lambda = result.scores.front().lambda;
    double best_f = result.scores.front().f1;
    for (const auto& s : result.scores) {
        if (s.f1 > best_f) {
            best_f = s.f1;
            result.best_lambda = s.lambda;
        }
    }

    if (result.scores.size() >= 2) {
        std::vector<double> grid, ps, rs;
        for (const auto& s : result.scores) {
            grid.push_back(s.lambda);
            ps.push_back(s.precision);
            rs.push_back(s.recall);
        }
        result.spearman_precision = spearman(grid, ps);
        result.spearman_recall = spearman(grid, rs);
    }
    return result;
}

}  // namespace statuscale
