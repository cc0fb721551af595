#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "statuscale/errors.hpp"
#include "statuscale/random.hpp"

namespace statuscale {

struct Gains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
};

// 4-5-3 backprop network that maps (target, measured, error, bias) to PID
// gains: tanh hidden layer, sigmoid outputs scaled into kp in [0,2] and
// ki, kd in [0,0.5]. It trains online against a surrogate-plant loss
//   L(W) = 1/2 (e - g*u(W))^2,  u = kp*e + ki*I + kd*de,
// where g approximates the plant's response to a quota delta. The loss is
// analytic in the weights, so the gradients below are finite-difference
// checkable.
class BpTuner {
public:
    static constexpr std::size_t kIn = 4;
    static constexpr std::size_t kHidden = 5;
    static constexpr std::size_t kOut = 3;

    explicit BpTuner(std::uint64_t seed, double learning_rate = 0.05,
                     double plant_gain = 0.5)
        : lr_(learning_rate), g_(plant_gain) {
        Rng rng(seed);
        for (auto& row : w1_)
            for (auto& w : row) w = rng.uniform(-0.5, 0.5);
        for (auto& row : w2_)
            for (auto& w : row) w = rng.uniform(-0.5, 0.5);
    }

    Gains gains(double target, double measured, double error) const {
        Forward f = forward(target, measured, error);
        return f.gains;
    }

    double loss(double target, double measured, double error, double integral,
                double derivative) const {
        Forward f = forward(target, measured, error);
        const double u = f.gains.kp * error + f.gains.ki * integral +
                         f.gains.kd * derivative;
        const double r = error - g_ * u;
        return 0.5 * r * r;
    }

    struct WeightGrads {
        std::array<std::array<double, kHidden>, kIn> w1{};
        std::array<std::array<double, kOut>, kHidden> w2{};
    };

    WeightGrads gradients(double target, double measured, double error,
                          double integral, double derivative) const {
        Forward f = forward(target, measured, error);
        const double u = f.gains.kp * error + f.gains.ki * integral +
                         f.gains.kd * derivative;
        const double dL_du = -g_ * (error - g_ * u);
        // d u / d gain_k, then through the output scaling and sigmoid.
        const std::array<double, kOut> du_dgain = {error, integral, derivative};
        const std::array<double, kOut> scale = {2.0, 0.5, 0.5};
        std::array<double, kOut> dz2{};
        for (std::size_t k = 0; k < kOut; ++k) {
            const double sig = f.out[k];
            dz2[k] = dL_du * du_dgain[k] * scale[k] * sig * (1.0 - sig);
        }
        WeightGrads gr;
        for (std::size_t j = 0; j < kHidden; ++j)
            for (std::size_t k = 0; k < kOut; ++k) gr.w2[j][k] = dz2[k] * f.hidden[j];
        for (std::size_t j = 0; j < kHidden; ++j) {
            double dh = 0.0;
            for (std::size_t k = 0; k < kOut; ++k) dh += dz2[k] * w2_[j][k];
            const double dz1 = dh * (1.0 - f.hidden[j] * f.hidden[j]);
            for (std::size_t i = 0; i < kIn; ++i) gr.w1[i][j] = dz1 * f.x[i];
        }
        return gr;
    }

    void update(double target, double measured, double error, double integral,
                double derivative) {
        const WeightGrads gr = gradients(target, measured, error, integral, derivative);
        for (std::size_t i = 0; i < kIn; ++i)
            for (std::size_t j = 0; j < kHidden; ++j) w1_[i][j] -= lr_ * gr.w1[i][j];
        for (std::size_t j = 0; j < kHidden; ++j)
            for (std::size_t k = 0; k < kOut; ++k) w2_[j][k] -= lr_ * gr.w2[j][k];
    }

    // Mutable weight access for finite-difference checks.
    double& w1(std::size_t i, std::size_t j) { return w1_[i][j]; }
    double& w2(std::size_t j, std::size_t k) { return w2_[j][k]; }
    const std::array<std::array<double, kHidden>, kIn>& weights1() const { return w1_; }
    const std::array<std::array<double, kOut>, kHidden>& weights2() const { return w2_; }
    double plant_gain() const { return g_; }
    double learning_rate() const { return lr_; }

private:
    struct Forward {
        std::array<double, kIn> x{};
        std::array<double, kHidden> hidden{};
        std::array<double, kOut> out{};
        Gains gains;
    };

    Forward forward(double target, double measured, double error) const {
        Forward f;
        f.x = {target, measured, error, 1.0};
        for (std::size_t j = 0; j < kHidden; ++j) {
            double z = 0.0;
            for (std::size_t i = 0; i < kIn; ++i) z += w1_[i][j] * f.x[i];
            f.hidden[j] = std::tanh(z);
        }
        for (std::size_t k = 0; k < kOut; ++k) {
            double z = 0.0;
            for (std::size_t j = 0; j < kHidden; ++j) z += w2_[j][k] * f.hidden[j];
            f.out[k] = 1.0 / (1.0 + std::exp(-z));
        }
        f.gains = {2.0 * f.out[0], 0.5 * f.out[1], 0.5 * f.out[2]};
        return f;
    }

    double lr_;
    double g_;
    std::array<std::array<double, kHidden>, kIn> w1_{};
    std::array<std::array<double, kOut>, kHidden> w2_{};
};

struct PidParams {
    double target = 0.8;
    double dt = 1.0;              // control interval in controller time units
    double integral_clamp = 5.0;  // |I| bound
    double separation = 0.3;      // integral active only while |e| <= this
};

// Incremental PID on the utilization error; the output is a quota delta in
// cores. Gains are either fixed or supplied (and retrained) by a BpTuner
// each step. The integral accrues before the output is formed. reset()
// starts a fresh episode: the first step after it sees a zero derivative
// and an integral rebuilt from scratch, which keeps windup from one episode
// out of the next.
class APidController {
public:
    APidController(Gains fixed, PidParams params = {})
        : params_(params), fixed_(fixed) {}

    APidController(BpTuner tuner, PidParams params = {})
        : params_(params), tuner_(std::move(tuner)) {}

    double step(double measured) {
        if (!std::isfinite(measured)) throw MeasurementInvalid{};
        const double e = measured - params_.target;
        if (!primed_) {
            integral_ = 0.0;
            prev_e_ = e;
            primed_ = true;
        }
        if (std::abs(e) <= params_.separation) {
            integral_ = std::clamp(integral_ + e * params_.dt, -params_.integral_clamp,
                                   params_.integral_clamp);
        } else {
            integral_ = 0.0;
        }
        const double de = (e - prev_e_) / params_.dt;
        const Gains g = tuner_ ? tuner_->gains(params_.target, measured, e) : fixed_;
        const double out = g.kp * e + g.ki * integral_ + g.kd * de;
        if (tuner_) tuner_->update(params_.target, measured, e, integral_, de);
        prev_e_ = e;
        last_gains_ = g;
        return out;
    }

    void reset() {
        primed_ = false;
        integral_ = 0.0;
    }

    double integral() const { return integral_; }
    const Gains& last_gains() const { return last_gains_; }
    const PidParams& params() const { return params_; }
    bool adaptive() const { return tuner_.has_value(); }
    const BpTuner* tuner() const { return tuner_ ? &*tuner_ : nullptr; }

private:
    PidParams params_;
    Gains fixed_;
    std::optional<BpTuner> tuner_;
    double integral_ = 0.0;
    double prev_e_ = 0.0;
    bool primed_ = false;
    Gains last_gains_;
};

}  // namespace statuscale
