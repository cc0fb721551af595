#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "statuscale/errors.hpp"

namespace statuscale {

enum class LoadStatus { Stable, Unstable };

struct Line {
    double slope = 0.0;
    double intercept = 0.0;

    double at(double t) const { return slope * t + intercept; }
};

// Ordinary least squares through the normal equations. The closed form is
// exact for the tiny windows used here; the denominator vanishes only when
// every timestamp coincides.
inline Line fit_line(const std::vector<double>& ts, const std::vector<double>& ys) {
    if (ts.size() != ys.size()) throw SeriesLengthMismatch{};
    if (ts.size() < 2) throw InsufficientData("line fit needs at least two points");
    const double n = static_cast<double>(ts.size());
    double st = 0.0, stt = 0.0, sy = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        stt += ts[i] * ts[i];
        sy += ys[i];
        sty += ts[i] * ys[i];
    }
    const double det = n * stt - st * st;
    if (det == 0.0) throw DegenerateAbscissa{};
    return {(n * sty - st * sy) / det, (stt * sy - st * sty) / det};
}

// Population coefficient of variation.
inline double coefficient_of_variation(const std::vector<double>& ys) {
    if (ys.empty()) throw InsufficientData("cv of empty window");
    double mean = 0.0;
    for (double y : ys) mean += y;
    mean /= static_cast<double>(ys.size());
    if (mean == 0.0) throw ZeroMeanWindow{};
    double var = 0.0;
    for (double y : ys) var += (y - mean) * (y - mean);
    var /= static_cast<double>(ys.size());
    return std::sqrt(var) / mean;
}

// Resistance/support channel around a fitted trendline. A point breaches
// only strictly outside the band. A channel fitted on a zero-mean window
// has no usable margin (c_v undefined) and is degenerate: everything
// breaches it, which keeps the conservative bias toward Unstable.
struct TrendChannel {
    Line center;
    double margin = 0.0;  // lambda * c_v of the fitted window
    bool degenerate = false;

    double resistance(double t) const { return center.at(t) + margin; }
    double support(double t) const { return center.at(t) - margin; }
    bool breached_by(double t, double y) const {
        if (degenerate) return true;
        return y > resistance(t) || y < support(t);
    }
};

// Segment-based load-status detector. Samples accrue into fixed-length
// segments; a breach marks the breaching segment and its successor Unstable
// and re-bases the fit window on the breaching segment, while consecutive
// stable segments merge into a growing window that the channel is refitted
// over. observe() additionally gives a per-sample live status so callers can
// react mid-segment.
class Detector {
public:
    explicit Detector(double lambda, std::size_t segment_len = 5)
        : lambda_(lambda), seg_len_(segment_len) {
        if (segment_len < 2)
            throw ConstraintViolated("segment length must be at least 2");
    }

    LoadStatus observe(double t, double y) {
        LoadStatus live = LoadStatus::Stable;
        if (hold_) {
            live = LoadStatus::Unstable;
        } else if (channel_) {
            // A breach taints the rest of the accruing segment, matching the
            // whole-segment label it will receive at the boundary.
            if (channel_->breached_by(t, y)) seg_breached_ = true;
            if (seg_breached_) live = LoadStatus::Unstable;
        }
        buf_t_.push_back(t);
        buf_y_.push_back(y);
        if (buf_t_.size() == seg_len_) {
            if (!channel_)
                initialize(buf_t_, buf_y_);
            else
                classify_segment(buf_t_, buf_y_);
            buf_t_.clear();
            buf_y_.clear();
            seg_breached_ = false;
        }
        return live;
    }

    // Fit the initial window; until this has happened classify_segment
    // refuses to label anything.
    void initialize(const std::vector<double>& ts, const std::vector<double>& ys) {
        if (ts.size() != ys.size()) throw SeriesLengthMismatch{};
        if (ts.size() != seg_len_)
            throw InsufficientData("segment must have exactly the configured length");
        rebase(ts, ys);
    }

    // Label one whole segment and update detector state.
    LoadStatus classify_segment(const std::vector<double>& ts,
                                const std::vector<double>& ys) {
        if (ts.size() != ys.size()) throw SeriesLengthMismatch{};
        if (ts.size() != seg_len_)
            throw InsufficientData("segment must have exactly the configured length");
        if (!channel_) throw DetectorColdStart{};
        if (hold_) {
            hold_ = false;
            rebase(ts, ys);
            return LoadStatus::Unstable;
        }
        bool breach = false;
        for (std::size_t i = 0; i < ts.size() && !breach; ++i)
            breach = channel_->breached_by(ts[i], ys[i]);
        if (breach) {
            hold_ = true;
            rebase(ts, ys);
            return LoadStatus::Unstable;
        }
        win_t_.insert(win_t_.end(), ts.begin(), ts.end());
        win_y_.insert(win_y_.end(), ys.begin(), ys.end());
        refit();
        return LoadStatus::Stable;
    }

    const std::optional<TrendChannel>& channel() const { return channel_; }
    std::size_t window_size() const { return win_t_.size(); }
    std::size_t segment_length() const { return seg_len_; }
    double lambda() const { return lambda_; }
    bool holding() const { return hold_; }

private:
    void rebase(const std::vector<double>& ts, const std::vector<double>& ys) {
        win_t_ = ts;
        win_y_ = ys;
        refit();
    }

    void refit() {
        TrendChannel ch;
        ch.center = fit_line(win_t_, win_y_);
        double mean = 0.0;
        for (double y : win_y_) mean += y;
        mean /= static_cast<double>(win_y_.size());
        if (mean == 0.0) {
            ch.degenerate = true;
        } else {
            ch.margin = lambda_ * coefficient_of_variation(win_y_);
        }
        channel_ = ch;
    }

    double lambda_;
    std::size_t seg_len_;
    std::vector<double> win_t_, win_y_;   // merged stable window
    std::vector<double> buf_t_, buf_y_;   // accruing segment
    std::optional<TrendChannel> channel_;
    bool hold_ = false;          // breach seen: next segment is Unstable unconditionally
    bool seg_breached_ = false;  // live flag for the accruing segment
};

}  // namespace statuscale
