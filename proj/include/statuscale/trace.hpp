#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "statuscale/errors.hpp"
#include "statuscale/random.hpp"

namespace statuscale {

// A load trace: strictly increasing timestamps (seconds) with one load
// sample (requests/s) each. Synthesized traces use a fixed interval; parsed
// traces keep whatever spacing the file had, with `interval` inferred as
// the median gap.
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
    double interval = 0.0;  // seconds between samples
    std::string source;     // provenance label

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
};

struct ParseStats {
    std::size_t rows_kept = 0;
    std::size_t rows_dropped = 0;      // wrong arity or non-numeric fields
    std::size_t duplicates_merged = 0; // same timestamp, last occurrence wins
};

// Column-name mapping for parse_csv: a timestamp column plus either a load
// column or a cpu_usage column (the cpu signal then stands in for load).
// When both are mapped, load wins.
struct CsvSchema {
    std::string timestamp = "timestamp";
    std::string load;
    std::string cpu_usage;

    const std::string& value_column() const {
        if (!load.empty()) return load;
        if (!cpu_usage.empty()) return cpu_usage;
        static const std::string fallback = "load";
        return fallback;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Parses a headered CSV. Rows that do not parse are dropped and counted,
// never fatal; an unmapped column name is. Output is sorted by timestamp
// and duplicate timestamps collapse to the last occurrence in file order.
inline TimeSeries parse_csv(const std::string& text, const CsvSchema& schema = {},
                            ParseStats* stats = nullptr) {
    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) lines.push_back(cur);
    }
    if (lines.empty()) throw EmptyTrace{};

    const auto header = detail::split_csv_row(lines[0]);
    auto col_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw SchemaMismatch("column '" + name + "' not found in header");
    };
    const std::size_t ti = col_of(schema.timestamp);
    const std::size_t li = col_of(schema.value_column());

    struct Row {
        double t, v;
        std::size_t order;
    };
    std::vector<Row> rows;
    ParseStats st;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = detail::split_csv_row(lines[i]);
        double t, v;
        if (fields.size() != header.size() ||
            !detail::parse_double(fields[ti], t) ||
            !detail::parse_double(fields[li], v)) {
            ++st.rows_dropped;
            continue;
        }
        rows.push_back({t, v, i});
    }
    if (rows.empty()) throw EmptyTrace{};

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.t < b.t; });

    TimeSeries out;
    for (const auto& r : rows) {
        if (!out.times.empty() && out.times.back() == r.t) {
            out.values.back() = r.v;  // later file position already wins: stable sort
            ++st.duplicates_merged;
        } else {
            out.times.push_back(r.t);
            out.values.push_back(r.v);
        }
    }
    st.rows_kept = out.size();
    if (stats) *stats = st;
    if (out.size() >= 2) {
        std::vector<double> gaps;
        gaps.reserve(out.size() - 1);
        for (std::size_t i = 1; i < out.size(); ++i)
            gaps.push_back(out.times[i] - out.times[i - 1]);
        std::sort(gaps.begin(), gaps.end());
        out.interval = gaps[gaps.size() / 2];
    }
    out.source = "csv";
    return out;
}

// %.17g round-trips doubles exactly, so parse_csv(to_csv(s)) == s bitwise.
inline std::string to_csv(const TimeSeries& s, const CsvSchema& schema = {}) {
    std::string out = schema.timestamp + "," + schema.value_column() + "\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += detail::fmt_g17(s.times[i]);
        out += ',';
        out += detail::fmt_g17(s.values[i]);
        out += '\n';
    }
    return out;
}

enum class Shape { Constant, Sine, Ramp };

struct Burst {
    double start = 0.0;     // seconds from trace start
    double duration = 0.0;  // seconds
    double amplitude = 0.0; // additive requests/s
};

struct SynthSpec {
    Shape shape = Shape::Constant;
    double base = 100.0;
    double amplitude = 0.0;  // sine peak deviation
    double period = 3600.0;  // sine period, seconds
    double slope = 0.0;      // ramp, requests/s per second
    std::size_t n = 720;
    double interval = 20.0;  // seconds between samples
    std::vector<Burst> bursts;
    double noise_sigma = 0.0;
    std::uint64_t seed = 42;
};

// Deterministic synthetic trace: shape + additive rectangular bursts +
// Gaussian noise, clamped at zero. Bursts must lie inside the trace span.
inline TimeSeries synthesize(const SynthSpec& spec) {
    if (spec.n == 0) throw EmptyTrace{};
    const double span = static_cast<double>(spec.n) * spec.interval;
    for (const auto& b : spec.bursts) {
        if (b.start < 0.0 || b.duration < 0.0 || b.start + b.duration > span)
            throw BurstOutOfRange("start " + detail::fmt_g17(b.start) + " duration " +
                                  detail::fmt_g17(b.duration) + " exceeds trace span " +
                                  detail::fmt_g17(span));
    }
    Rng rng(spec.seed);
    TimeSeries out;
    out.interval = spec.interval;
    out.source = "synthetic";
    out.times.resize(spec.n);
    out.values.resize(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double t = static_cast<double>(i) * spec.interval;
        double v = spec.base;
        switch (spec.shape) {
            case Shape::Constant: break;
            case Shape::Sine:
                v += spec.amplitude * std::sin(2.0 * M_PI * t / spec.period);
                break;
            case Shape::Ramp:
                v += spec.slope * t;
                break;
        }
        for (const auto& b : spec.bursts)
            if (t >= b.start && t < b.start + b.duration) v += b.amplitude;
        if (spec.noise_sigma > 0.0) v += rng.normal(0.0, spec.noise_sigma);
        out.times[i] = t;
        out.values[i] = std::max(v, 0.0);
    }
    return out;
}

// Sliding supervised pairs for one-step-ahead prediction: features are the
// `width` samples ending at i, target is the sample at i+1.
struct WindowSample {
    std::vector<double> features;
    double target = 0.0;
};

inline std::vector<WindowSample> windows(const std::vector<double>& values,
                                         std::size_t width) {
    if (width == 0) throw InsufficientData("window width must be positive");
    if (values.size() <= width)
        throw InsufficientData("need more than " + std::to_string(width) +
                               " samples, have " + std::to_string(values.size()));
    std::vector<WindowSample> out;
    out.reserve(values.size() - width);
    for (std::size_t i = width; i < values.size(); ++i) {
        WindowSample s;
        s.features.assign(values.begin() + (i - width), values.begin() + i);
        s.target = values[i];
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace statuscale
