#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "statuscale/errors.hpp"
#include "statuscale/trace.hpp"

namespace statuscale {

// Axis-aligned regression tree grown by exact greedy SSE minimization.
// Everything is deterministic: candidate order is fixed and ties keep the
// first-found split, so refits on identical data give identical trees.
class RegressionTree {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        double value = 0.0;
        int left = -1;
        int right = -1;
    };

    void fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
             std::size_t max_depth, std::size_t min_leaf) {
        if (X.size() != y.size()) throw SeriesLengthMismatch{};
        if (X.empty()) throw InsufficientData("tree fit with no samples");
        nodes_.clear();
        std::vector<std::size_t> idx(X.size());
        std::iota(idx.begin(), idx.end(), 0);
        grow(X, y, idx, max_depth, min_leaf);
    }

    double predict(const std::vector<double>& x) const {
        if (nodes_.empty()) throw NotFitted{};
        int cur = 0;
        while (nodes_[cur].feature >= 0) {
            const auto& nd = nodes_[cur];
            cur = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                          : nd.right;
        }
        return nodes_[cur].value;
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    void set_nodes(std::vector<Node> nodes) { nodes_ = std::move(nodes); }

private:
    int grow(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
             const std::vector<std::size_t>& idx, std::size_t depth,
             std::size_t min_leaf) {
        const int self = static_cast<int>(nodes_.size());
        nodes_.emplace_back();

        double sum = 0.0;
        for (auto i : idx) sum += y[i];
        const double mean = sum / static_cast<double>(idx.size());
        nodes_[self].value = mean;

        if (depth == 0 || idx.size() < 2 * min_leaf) return self;

        double parent_sse = 0.0;
        for (auto i : idx) parent_sse += (y[i] - mean) * (y[i] - mean);

        const std::size_t m = X[idx[0]].size();
        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::size_t> order(idx);
        for (std::size_t f = 0; f < m; ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (X[a][f] != X[b][f]) return X[a][f] < X[b][f];
                return a < b;
            });
            double lsum = 0.0, lsq = 0.0;
            double rsum = sum, rsq = 0.0;
            for (auto i : idx) rsq += y[i] * y[i];
            for (std::size_t p = 0; p + 1 < order.size(); ++p) {
                const double yi = y[order[p]];
                lsum += yi;
                lsq += yi * yi;
                rsum -= yi;
                rsq -= yi * yi;
                if (X[order[p]][f] == X[order[p + 1]][f]) continue;
                const std::size_t nl = p + 1, nr = order.size() - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                const double lss = lsq - lsum * lsum / static_cast<double>(nl);
                const double rss = rsq - rsum * rsum / static_cast<double>(nr);
                const double gain = parent_sse - lss - rss;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (X[order[p]][f] + X[order[p + 1]][f]);
                }
            }
        }
        if (best_feature < 0) return self;

        std::vector<std::size_t> li, ri;
        for (auto i : idx)
            (X[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? li : ri)
                .push_back(i);
        nodes_[self].feature = best_feature;
        nodes_[self].threshold = best_threshold;
        nodes_[self].left = grow(X, y, li, depth - 1, min_leaf);
        nodes_[self].right = grow(X, y, ri, depth - 1, min_leaf);
        return self;
    }

    std::vector<Node> nodes_;
};

struct PredictorParams {
    std::size_t n_trees = 50;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    std::size_t min_leaf = 2;
};

// Residual-boosted tree ensemble over a target-mean base. train_mse() keeps
// the in-sample MSE after each stage; with leaf-mean trees and a learning
// rate in (0, 1] it is non-increasing.
class GradientBoostedPredictor {
public:
    explicit GradientBoostedPredictor(PredictorParams params = {})
        : params_(params) {}

    void fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
        if (X.size() != y.size()) throw SeriesLengthMismatch{};
        if (X.empty()) throw InsufficientData("boosting fit with no samples");
        n_features_ = X[0].size();
        for (const auto& row : X)
            if (row.size() != n_features_)
                throw FeatureShapeMismatch("ragged feature matrix");

        base_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
        trees_.clear();
        train_mse_.clear();

        std::vector<double> pred(y.size(), base_);
        std::vector<double> resid(y.size());
        train_mse_.push_back(mse(pred, y));
        for (std::size_t t = 0; t < params_.n_trees; ++t) {
            for (std::size_t i = 0; i < y.size(); ++i) resid[i] = y[i] - pred[i];
            RegressionTree tree;
            tree.fit(X, resid, params_.max_depth, params_.min_leaf);
            for (std::size_t i = 0; i < y.size(); ++i)
                pred[i] += params_.learning_rate * tree.predict(X[i]);
            trees_.push_back(std::move(tree));
            train_mse_.push_back(mse(pred, y));
        }
        fitted_ = true;
    }

    void fit(const std::vector<WindowSample>& samples) {
        std::vector<std::vector<double>> X;
        std::vector<double> y;
        X.reserve(samples.size());
        y.reserve(samples.size());
        for (const auto& s : samples) {
            X.push_back(s.features);
            y.push_back(s.target);
        }
        fit(X, y);
    }

    double predict(const std::vector<double>& x) const {
        if (!fitted_) throw NotFitted{};
        if (x.size() != n_features_)
            throw FeatureShapeMismatch("expected " + std::to_string(n_features_) +
                                       " features, got " + std::to_string(x.size()));
        double out = base_;
        for (const auto& t : trees_) out += params_.learning_rate * t.predict(x);
        return out;
    }

    bool fitted() const { return fitted_; }
    std::size_t n_features() const { return n_features_; }
    const std::vector<double>& train_mse() const { return train_mse_; }
    const PredictorParams& params() const { return params_; }

    nlohmann::ordered_json to_json() const {
        if (!fitted_) throw NotFitted{};
        nlohmann::ordered_json j;
        j["base"] = base_;
        j["learning_rate"] = params_.learning_rate;
        j["n_features"] = n_features_;
        j["trees"] = nlohmann::ordered_json::array();
        for (const auto& t : trees_) {
            nlohmann::ordered_json jt = nlohmann::ordered_json::array();
            for (const auto& nd : t.nodes()) {
                jt.push_back({{"f", nd.feature},
                              {"t", nd.threshold},
                              {"v", nd.value},
                              {"l", nd.left},
                              {"r", nd.right}});
            }
            j["trees"].push_back(std::move(jt));
        }
        return j;
    }

    static GradientBoostedPredictor from_json(const nlohmann::json& j) {
        GradientBoostedPredictor p;
        p.base_ = j.at("base").get<double>();
        p.params_.learning_rate = j.at("learning_rate").get<double>();
        p.n_features_ = j.at("n_features").get<std::size_t>();
        for (const auto& jt : j.at("trees")) {
            std::vector<RegressionTree::Node> nodes;
            for (const auto& jn : jt) {
                RegressionTree::Node nd;
                nd.feature = jn.at("f").get<int>();
                nd.threshold = jn.at("t").get<double>();
                nd.value = jn.at("v").get<double>();
                nd.left = jn.at("l").get<int>();
                nd.right = jn.at("r").get<int>();
                nodes.push_back(nd);
            }
            RegressionTree t;
            t.set_nodes(std::move(nodes));
            p.trees_.push_back(std::move(t));
        }
        p.params_.n_trees = p.trees_.size();
        p.fitted_ = true;
        return p;
    }

private:
    static double mse(const std::vector<double>& pred, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            s += (pred[i] - y[i]) * (pred[i] - y[i]);
        return s / static_cast<double>(y.size());
    }

    PredictorParams params_;
    double base_ = 0.0;
    std::size_t n_features_ = 0;
    std::vector<RegressionTree> trees_;
    std::vector<double> train_mse_;
    bool fitted_ = false;
};

}  // namespace statuscale
