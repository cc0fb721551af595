#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "statuscale/statuscale.hpp"

namespace {

using namespace statuscale;
namespace fs = std::filesystem;

std::string g17(double v) { return statuscale::detail::fmt_g17(v); }

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

int cmd_run(const RunConfig& cfg, const fs::path& out_dir) {
    const TimeSeries trace = cfg.load_trace();
    SimParams p = cfg.sim;
    p.controller = cfg.controller;
    const RunResult result = simulate(trace, p);
    const EvaluationReport report =
        build_report(result.rows, p.service, trace.interval, cfg.omega);

    fs::create_directories(out_dir);
    write_file(out_dir / "run.csv", run_records_csv(result.rows));
    write_file(out_dir / "actions.csv", action_log_csv(result.actions));
    write_file(out_dir / "report.json", report.to_json().dump(2) + "\n");
    if (p.debug_controllers)
        write_file(out_dir / "debug_controllers.json", result.debug.dump(2) + "\n");

    std::cout << controller_name(p.controller) << ": avg_rt=" << report.avg_rt
              << " ms, budget=" << report.budget << " core-s, objective="
              << report.objective << "\n";
    return 0;
}

int cmd_compare(const RunConfig& cfg, const fs::path& out_dir) {
    if (cfg.controllers.size() < 2)
        throw ConfigError("compare needs at least two entries under \"controllers\"");
    CompareSpec spec;
    spec.kinds = cfg.controllers;
    spec.base = cfg.sim;
    spec.repeats = cfg.repeats;
    spec.budget_match = cfg.budget_match;
    spec.omega = cfg.omega;
    if (cfg.synth) {
        spec.trace = *cfg.synth;
    } else {
        spec.fixed_trace = cfg.load_trace();
        spec.trace.seed = cfg.sim.seed;
    }
    const CompareResult result = run_compare(spec);

    const std::vector<std::string> metric_names = {
        "avg_rt", "p99_rt", "max_rt", "slo_violation_200", "slo_violation_250",
        "a_U", "a_O", "correlation_factor", "objective", "budget"};
    auto metric_values = [](const EvaluationReport& r) {
        return std::vector<double>{r.avg_rt, r.p99_rt, r.max_rt, r.slo_violation_200,
                                   r.slo_violation_250, r.a_U, r.a_O,
                                   r.correlation_factor, r.objective, r.budget};
    };

    std::string out = "controller,repeat,seed,floor";
    for (const auto& m : metric_names) out += ',' + m;
    out += '\n';
    for (const auto& run : result.runs) {
        out += std::string(controller_name(run.kind)) + ',' + std::to_string(run.repeat) +
               ',' + std::to_string(run.seed) + ',' + g17(run.floor);
        for (double v : metric_values(run.report)) out += ',' + g17(v);
        out += '\n';
    }
    for (ControllerKind k : spec.kinds) {
        std::vector<std::vector<double>> cols(metric_names.size());
        for (const auto& run : result.runs)
            if (run.kind == k) {
                const auto vals = metric_values(run.report);
                for (std::size_t i = 0; i < vals.size(); ++i) cols[i].push_back(vals[i]);
            }
        std::string mean_row = std::string(controller_name(k)) + ",mean,,";
        std::string lo_row = std::string(controller_name(k)) + ",ci95_lo,,";
        std::string hi_row = std::string(controller_name(k)) + ",ci95_hi,,";
        for (const auto& col : cols) {
            const ConfidenceInterval ci = mean_ci95(col);
            mean_row += ',' + g17(ci.mean);
            lo_row += ',' + g17(ci.lo);
            hi_row += ',' + g17(ci.hi);
        }
        out += mean_row + '\n' + lo_row + '\n' + hi_row + '\n';
    }

    fs::create_directories(out_dir);
    write_file(out_dir / "compare.csv", out);

    for (const auto& s : result.summaries)
        std::cout << controller_name(s.kind) << ": avg_rt=" << s.avg_rt.mean << " ms ["
                  << s.avg_rt.lo << ", " << s.avg_rt.hi << "], budget="
                  << s.budget.mean << " core-s\n";
    return 0;
}

int cmd_calibrate(const RunConfig& cfg, const fs::path& out_dir) {
    const TimeSeries trace = cfg.load_trace();
    const CalibrationResult result = calibrate_lambda(trace, cfg.calibration);

    std::string out = "lambda,precision,recall,f1,tp,fp,fn,tn,best\n";
    for (const auto& s : result.scores) {
        out += g17(s.lambda) + ',' + g17(s.precision) + ',' + g17(s.recall) + ',' +
               g17(s.f1) + ',' + std::to_string(s.tp) + ',' + std::to_string(s.fp) +
               ',' + std::to_string(s.fn) + ',' + std::to_string(s.tn) + ',' +
               (s.lambda == result.best_lambda ? "1" : "0") + '\n';
    }
    fs::create_directories(out_dir);
    write_file(out_dir / "calibration.csv", out);

    std::cout << "best lambda " << result.best_lambda << " over " << result.labeled
              << " labeled intervals (spearman precision "
              << result.spearman_precision << ", recall " << result.spearman_recall
              << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trace-driven simulator for status-aware elastic scaling"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> omega;
    bool debug_controllers = false;

    CLI::App* run = app.add_subcommand("run", "Simulate one controller on one trace");
    CLI::App* compare =
        app.add_subcommand("compare", "Budget-matched controller comparison with repeats");
    CLI::App* calibrate =
        app.add_subcommand("calibrate", "Sweep the detector lambda grid against predictor labels");
    for (CLI::App* sc : {run, compare, calibrate}) {
        sc->add_option("--config", config_path, "JSON experiment config")->required();
        sc->add_option("--out", out_dir, "output directory");
        sc->add_option("--seed", seed, "override config seed");
        sc->add_option("--omega", omega, "objective latency weight");
        sc->add_flag("--debug-controllers", debug_controllers,
                     "dump per-interval gains, integral and network weights");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        RunConfig cfg = statuscale::load_config(config_path);
        if (seed) {
            cfg.sim.seed = *seed;
            if (cfg.synth) cfg.synth->seed = *seed;
        }
        if (omega) cfg.omega = *omega;
        cfg.sim.debug_controllers = debug_controllers;
        if (run->parsed()) return cmd_run(cfg, out_dir);
        if (compare->parsed()) return cmd_compare(cfg, out_dir);
        return cmd_calibrate(cfg, out_dir);
    } catch (const statuscale::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
