#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "statuscale/calibrate.hpp"
#include "statuscale/errors.hpp"
#include "statuscale/simulator.hpp"
#include "statuscale/trace.hpp"

namespace statuscale {

// One JSON document per experiment. Every parameter has a default; the only
// mandatory piece is the trace block, and a synthesis trace must carry a
// seed. Unknown keys anywhere in the document are rejected by name.
struct RunConfig {
    std::optional<std::string> trace_file;
    std::optional<SynthSpec> synth;
    ControllerKind controller = ControllerKind::StatuScale;
    std::vector<ControllerKind> controllers;  // compare subjects
    int repeats = 5;
    bool budget_match = true;
    double omega = 1.0;
    SimParams sim;
    CalibrationParams calibration;

    TimeSeries load_trace() const {
        if (trace_file) {
            std::ifstream in(*trace_file);
            if (!in) throw ConfigError("trace file not readable: " + *trace_file);
            std::stringstream ss;
            ss << in.rdbuf();
            return parse_csv(ss.str());
        }
        return synthesize(*synth);
    }
};

namespace detail {

using nlohmann::json;

inline std::string dotted(const std::string& scope, const std::string& key) {
    return scope.empty() ? key : scope + "." + key;
}

inline void reject_unknown(const json& obj, const std::string& scope,
                           const std::set<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.count(key))
            throw ConfigError("unknown key \"" + dotted(scope, key) + "\"");
    }
}

inline double num_at(const json& obj, const std::string& scope, const std::string& key,
                     double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError("key \"" + dotted(scope, key) + "\" must be a number");
    return obj[key].get<double>();
}

inline int int_at(const json& obj, const std::string& scope, const std::string& key,
                  int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError("key \"" + dotted(scope, key) + "\" must be an integer");
    return obj[key].get<int>();
}

inline bool bool_at(const json& obj, const std::string& scope, const std::string& key,
                    bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean())
        throw ConfigError("key \"" + dotted(scope, key) + "\" must be a boolean");
    return obj[key].get<bool>();
}

inline std::string str_at(const json& obj, const std::string& scope,
                          const std::string& key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string())
        throw ConfigError("key \"" + dotted(scope, key) + "\" must be a string");
    return obj[key].get<std::string>();
}

inline SynthSpec parse_synth(const json& t) {
    reject_unknown(t, "trace",
                   {"shape", "base", "amplitude", "period", "slope", "n", "interval",
                    "bursts", "noise_sigma", "seed"});
    SynthSpec s;
    const std::string shape = str_at(t, "trace", "shape", "constant");
    if (shape == "constant") s.shape = Shape::Constant;
    else if (shape == "sine") s.shape = Shape::Sine;
    else if (shape == "ramp") s.shape = Shape::Ramp;
    else throw ConfigError("trace.shape must be constant, sine or ramp");
    s.base = num_at(t, "trace", "base", s.base);
    s.amplitude = num_at(t, "trace", "amplitude", s.amplitude);
    s.period = num_at(t, "trace", "period", s.period);
    s.slope = num_at(t, "trace", "slope", s.slope);
    s.n = static_cast<std::size_t>(int_at(t, "trace", "n", static_cast<int>(s.n)));
    s.interval = num_at(t, "trace", "interval", s.interval);
    s.noise_sigma = num_at(t, "trace", "noise_sigma", s.noise_sigma);
    if (!t.contains("seed"))
        throw ConfigError("trace.seed is mandatory for synthesis runs");
    if (!t["seed"].is_number_integer())
        throw ConfigError("key \"trace.seed\" must be an integer");
    s.seed = t["seed"].get<std::uint64_t>();
    if (t.contains("bursts")) {
        if (!t["bursts"].is_array())
            throw ConfigError("key \"trace.bursts\" must be an array");
        for (const auto& b : t["bursts"]) {
            if (!b.is_object()) throw ConfigError("trace.bursts entries must be objects");
            reject_unknown(b, "trace.bursts", {"start", "duration", "amplitude"});
            Burst burst;
            burst.start = num_at(b, "trace.bursts", "start", 0.0);
            burst.duration = num_at(b, "trace.bursts", "duration", 0.0);
            burst.amplitude = num_at(b, "trace.bursts", "amplitude", 0.0);
            s.bursts.push_back(burst);
        }
    }
    return s;
}

}  // namespace detail

// Parse and validate a config document. `name` only decorates messages.
// Parse errors carry the 1-based line they occurred on.
inline RunConfig parse_config(const std::string& text, const std::string& name = "config") {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        for (std::size_t i = 0; i < upto; ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError(name + ":" + std::to_string(line) + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(name + ": top level must be an object");

    detail::reject_unknown(doc, "",
                           {"trace", "controller", "controllers", "repeats",
                            "budget_match", "omega", "seed", "slo_ms", "detector",
                            "vertical", "horizontal", "decay", "service",
                            "calibration"});

    RunConfig cfg;
    if (!doc.contains("trace")) throw ConfigError("missing required key \"trace\"");
    const json& t = doc["trace"];
    if (!t.is_object()) throw ConfigError("key \"trace\" must be an object");
    if (t.contains("file")) {
        detail::reject_unknown(t, "trace", {"file"});
        cfg.trace_file = detail::str_at(t, "trace", "file", "");
    } else {
        cfg.synth = detail::parse_synth(t);
        cfg.sim.seed = cfg.synth->seed;
    }

    if (doc.contains("controller"))
        cfg.controller = controller_from_name(detail::str_at(doc, "", "controller", ""));
    if (doc.contains("controllers")) {
        if (!doc["controllers"].is_array())
            throw ConfigError("key \"controllers\" must be an array");
        for (const auto& c : doc["controllers"]) {
            if (!c.is_string()) throw ConfigError("controllers entries must be strings");
            cfg.controllers.push_back(controller_from_name(c.get<std::string>()));
        }
    }
    cfg.repeats = detail::int_at(doc, "", "repeats", cfg.repeats);
    if (cfg.repeats < 1) throw ConfigError("repeats must be at least 1");
    cfg.budget_match = detail::bool_at(doc, "", "budget_match", cfg.budget_match);
    cfg.omega = detail::num_at(doc, "", "omega", cfg.omega);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer())
            throw ConfigError("key \"seed\" must be an integer");
        cfg.sim.seed = doc["seed"].get<std::uint64_t>();
    }

    // The report schema carries exactly the 200 and 250 ms objectives.
    if (doc.contains("slo_ms")) {
        const json& s = doc["slo_ms"];
        if (!(s.is_array() && s.size() == 2 && s[0].is_number() && s[1].is_number() &&
              s[0].get<double>() == 200.0 && s[1].get<double>() == 250.0))
            throw ConfigError("slo_ms is fixed to [200, 250] in this build");
    }

    if (doc.contains("detector")) {
        const json& d = doc["detector"];
        if (!d.is_object()) throw ConfigError("key \"detector\" must be an object");
        detail::reject_unknown(d, "detector", {"lambda", "segment_len"});
        cfg.sim.lambda = detail::num_at(d, "detector", "lambda", cfg.sim.lambda);
        cfg.sim.segment_len = detail::int_at(d, "detector", "segment_len", cfg.sim.segment_len);
    }

    if (doc.contains("vertical")) {
        const json& v = doc["vertical"];
        if (!v.is_object()) throw ConfigError("key \"vertical\" must be an object");
        detail::reject_unknown(v, "vertical",
                               {"target", "min_quota", "max_quota", "initial_quota",
                                "cold_intervals", "retrain_every", "threshold_band",
                                "threshold_step", "predictor", "pid"});
        cfg.sim.target = detail::num_at(v, "vertical", "target", cfg.sim.target);
        cfg.sim.min_quota = detail::num_at(v, "vertical", "min_quota", cfg.sim.min_quota);
        cfg.sim.max_quota = detail::num_at(v, "vertical", "max_quota", cfg.sim.max_quota);
        cfg.sim.initial_quota =
            detail::num_at(v, "vertical", "initial_quota", cfg.sim.initial_quota);
        cfg.sim.cold_intervals =
            detail::int_at(v, "vertical", "cold_intervals", cfg.sim.cold_intervals);
        cfg.sim.retrain_every =
            detail::int_at(v, "vertical", "retrain_every", cfg.sim.retrain_every);
        cfg.sim.threshold_band =
            detail::num_at(v, "vertical", "threshold_band", cfg.sim.threshold_band);
        cfg.sim.threshold_step =
            detail::num_at(v, "vertical", "threshold_step", cfg.sim.threshold_step);
        if (v.contains("predictor")) {
            const json& p = v["predictor"];
            if (!p.is_object()) throw ConfigError("key \"vertical.predictor\" must be an object");
            detail::reject_unknown(p, "vertical.predictor",
                                   {"n_trees", "max_depth", "learning_rate", "min_leaf",
                                    "window"});
            cfg.sim.predictor.n_trees =
                detail::int_at(p, "vertical.predictor", "n_trees", cfg.sim.predictor.n_trees);
            cfg.sim.predictor.max_depth =
                detail::int_at(p, "vertical.predictor", "max_depth", cfg.sim.predictor.max_depth);
            cfg.sim.predictor.learning_rate = detail::num_at(
                p, "vertical.predictor", "learning_rate", cfg.sim.predictor.learning_rate);
            cfg.sim.predictor.min_leaf =
                detail::int_at(p, "vertical.predictor", "min_leaf", cfg.sim.predictor.min_leaf);
            cfg.sim.predictor_window =
                detail::int_at(p, "vertical.predictor", "window", cfg.sim.predictor_window);
        }
        if (v.contains("pid")) {
            const json& p = v["pid"];
            if (!p.is_object()) throw ConfigError("key \"vertical.pid\" must be an object");
            detail::reject_unknown(p, "vertical.pid",
                                   {"dt", "integral_clamp", "separation"});
            cfg.sim.pid.dt = detail::num_at(p, "vertical.pid", "dt", cfg.sim.pid.dt);
            cfg.sim.pid.integral_clamp =
                detail::num_at(p, "vertical.pid", "integral_clamp", cfg.sim.pid.integral_clamp);
            cfg.sim.pid.separation =
                detail::num_at(p, "vertical.pid", "separation", cfg.sim.pid.separation);
        }
    }

    if (doc.contains("horizontal")) {
        const json& h = doc["horizontal"];
        if (!h.is_object()) throw ConfigError("key \"horizontal\" must be an object");
        detail::reject_unknown(h, "horizontal",
                               {"K", "window", "upper_total", "lower_total",
                                "upper_single", "lower_single", "delta", "cooloff",
                                "min_replicas", "max_replicas", "initial_replicas"});
        HorizontalParams& hp = cfg.sim.horizontal;
        hp.K = detail::num_at(h, "horizontal", "K", hp.K);
        hp.window = static_cast<std::size_t>(
            detail::int_at(h, "horizontal", "window", static_cast<int>(hp.window)));
        hp.upper_total = detail::num_at(h, "horizontal", "upper_total", hp.upper_total);
        hp.lower_total = detail::num_at(h, "horizontal", "lower_total", hp.lower_total);
        hp.upper_single = detail::num_at(h, "horizontal", "upper_single", hp.upper_single);
        hp.lower_single = detail::num_at(h, "horizontal", "lower_single", hp.lower_single);
        hp.delta = detail::num_at(h, "horizontal", "delta", hp.delta);
        hp.cooloff = detail::num_at(h, "horizontal", "cooloff", hp.cooloff);
        hp.min_replicas = detail::int_at(h, "horizontal", "min_replicas", hp.min_replicas);
        hp.max_replicas = detail::int_at(h, "horizontal", "max_replicas", hp.max_replicas);
        cfg.sim.initial_replicas =
            detail::int_at(h, "horizontal", "initial_replicas", cfg.sim.initial_replicas);
    }

    if (doc.contains("decay")) {
        const json& d = doc["decay"];
        if (!d.is_object()) throw ConfigError("key \"decay\" must be an object");
        detail::reject_unknown(d, "decay", {"k", "beta"});
        cfg.sim.decay_k = detail::num_at(d, "decay", "k", cfg.sim.decay_k);
        cfg.sim.decay_beta = detail::num_at(d, "decay", "beta", cfg.sim.decay_beta);
    }

    if (doc.contains("service")) {
        const json& s = doc["service"];
        if (!s.is_object()) throw ConfigError("key \"service\" must be an object");
        detail::reject_unknown(s, "service", {"name", "rt_base_ms", "rt_cap_ms", "curve"});
        cfg.sim.service_name = detail::str_at(s, "service", "name", cfg.sim.service_name);
        cfg.sim.service.rt_base_ms =
            detail::num_at(s, "service", "rt_base_ms", cfg.sim.service.rt_base_ms);
        cfg.sim.service.rt_cap_ms =
            detail::num_at(s, "service", "rt_cap_ms", cfg.sim.service.rt_cap_ms);
        if (s.contains("curve")) {
            if (!s["curve"].is_array())
                throw ConfigError("key \"service.curve\" must be an array of [rate, util] pairs");
            std::vector<std::pair<double, double>> knots;
            for (const auto& k : s["curve"]) {
                if (!(k.is_array() && k.size() == 2 && k[0].is_number() && k[1].is_number()))
                    throw ConfigError("service.curve entries must be [rate, util] pairs");
                knots.emplace_back(k[0].get<double>(), k[1].get<double>());
            }
            try {
                cfg.sim.service.curve = ProfileCurve(knots);
            } catch (const ConstraintViolated& e) {
                throw ConfigError(std::string("service.curve: ") + e.what());
            }
        }
    }

    if (doc.contains("calibration")) {
        const json& c = doc["calibration"];
        if (!c.is_object()) throw ConfigError("key \"calibration\" must be an object");
        detail::reject_unknown(c, "calibration",
                               {"grid", "tolerance", "window", "retrain", "min_train",
                                "segment_len"});
        if (c.contains("grid")) {
            if (!c["grid"].is_array()) throw ConfigError("key \"calibration.grid\" must be an array");
            cfg.calibration.lambda_grid.clear();
            for (const auto& g : c["grid"]) {
                if (!g.is_number())
                    throw ConfigError("calibration.grid entries must be numbers");
                cfg.calibration.lambda_grid.push_back(g.get<double>());
            }
            if (cfg.calibration.lambda_grid.empty())
                throw ConfigError("calibration.grid must not be empty");
        }
        cfg.calibration.tolerance =
            detail::num_at(c, "calibration", "tolerance", cfg.calibration.tolerance);
        cfg.calibration.window =
            detail::int_at(c, "calibration", "window", cfg.calibration.window);
        cfg.calibration.retrain =
            detail::int_at(c, "calibration", "retrain", cfg.calibration.retrain);
        cfg.calibration.min_train =
            detail::int_at(c, "calibration", "min_train", cfg.calibration.min_train);
        cfg.calibration.segment_len =
            detail::int_at(c, "calibration", "segment_len", cfg.calibration.segment_len);
    }
    cfg.calibration.predictor = cfg.sim.predictor;

    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config not readable: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace statuscale
