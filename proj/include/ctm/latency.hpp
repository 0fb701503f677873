#pragma once

// Time-to-consciousness arithmetic: with N processors competing through a
// k-ary tree, a submission reaches STM after h = ceil(log_k N) ticks and the
// broadcast lands one tick later.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "text.hpp"
#include "uptree.hpp"

namespace ctm {

struct LatencyReport {
    std::uint64_t n_processors = 0;
    std::uint32_t arity = 2;
    std::uint32_t height = 0;
    std::uint64_t ticks_to_stm = 0;
    std::uint64_t ticks_to_awareness = 0;
    double tick_ms = 0.0;
    double seconds_to_stm = 0.0;
    double seconds_to_awareness = 0.0;
};

inline LatencyReport latency(double tick_ms, std::uint64_t n_processors, std::uint32_t arity) {
    if (!(tick_ms > 0.0)) throw std::invalid_argument("latency: tick_ms must be positive");
    LatencyReport r;
    r.n_processors = n_processors;
    r.arity = arity;
    r.height = competition_height(n_processors, arity);
    r.ticks_to_stm = r.height;
    r.ticks_to_awareness = r.height + 1;
    r.tick_ms = tick_ms;
    r.seconds_to_stm = static_cast<double>(r.ticks_to_stm) * tick_ms / 1000.0;
    r.seconds_to_awareness = static_cast<double>(r.ticks_to_awareness) * tick_ms / 1000.0;
    return r;
}

inline std::string format_latency(const LatencyReport& r) {
    std::string out;
    out += "n_processors=" + std::to_string(r.n_processors);
    out += " arity=" + std::to_string(r.arity);
    out += " height=" + std::to_string(r.height);
    out += "\nticks_to_stm=" + std::to_string(r.ticks_to_stm);
    out += " ticks_to_awareness=" + std::to_string(r.ticks_to_awareness);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", r.tick_ms);
    out += "\ntick_ms=";
    out += buf;
    std::snprintf(buf, sizeof buf, "%.1f", r.seconds_to_stm);
    out += "\nseconds_to_stm=";
    out += buf;
    std::snprintf(buf, sizeof buf, "%.1f", r.seconds_to_awareness);
    out += "\nseconds_to_awareness=";
    out += buf;
    out += "\n";
    return out;
}

} // namespace ctm
