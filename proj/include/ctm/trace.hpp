#pragma once

// Machine trace: one event per line, canonical field order, byte-identical
// for identical (config, seed). Format:
//
//   ctm-trace schema_version=1 seed=<u64>
//   t=<tick> ph=<phase> ev=<Kind> key=value ...
//
// Values never contain spaces (payload bytes are percent-encoded), so a line
// splits on single spaces. Reals carry nine fractional digits.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chunk.hpp"
#include "text.hpp"

namespace ctm {

enum class EventKind {
    Submission,
    NodeWin,
    StmInstall,
    Broadcast,
    LinkSend,
    LinkFormed,
    InputDelivery,
    ActuatorCommand,
    FeedbackApplied,
};

inline const char* event_name(EventKind k) {
    switch (k) {
    case EventKind::Submission: return "Submission";
    case EventKind::NodeWin: return "NodeWin";
    case EventKind::StmInstall: return "StmInstall";
    case EventKind::Broadcast: return "Broadcast";
    case EventKind::LinkSend: return "LinkSend";
    case EventKind::LinkFormed: return "LinkFormed";
    case EventKind::InputDelivery: return "InputDelivery";
    case EventKind::ActuatorCommand: return "ActuatorCommand";
    case EventKind::FeedbackApplied: return "FeedbackApplied";
    }
    return "?";
}

inline EventKind parse_event_kind(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(EventKind::FeedbackApplied); ++i)
        if (s == event_name(static_cast<EventKind>(i))) return static_cast<EventKind>(i);
    throw ParseError("unknown event kind '" + std::string(s) + "'");
}

struct TraceEvent {
    Tick tick = 0;
    int phase = 0;
    EventKind kind = EventKind::Submission;
    std::vector<std::pair<std::string, std::string>> fields;

    TraceEvent() = default;
    TraceEvent(Tick t, int ph, EventKind k) : tick(t), phase(ph), kind(k) {}

    TraceEvent& with(std::string key, std::string_view value) {
        fields.emplace_back(std::move(key), escape(value));
        return *this;
    }
    TraceEvent& with_raw(std::string key, std::string value) {
        fields.emplace_back(std::move(key), std::move(value));
        return *this;
    }
    TraceEvent& with_u64(std::string key, std::uint64_t v) {
        return with_raw(std::move(key), std::to_string(v));
    }
    TraceEvent& with_real(std::string key, double v) {
        return with_raw(std::move(key), format_real(v));
    }
    TraceEvent& with_chunk(std::string key, const Chunk& c) {
        // escaped like any other value so field() round-trips it exactly
        return with(std::move(key), encode_chunk(c));
    }

    const std::string* find(std::string_view key) const {
        for (const auto& [k, v] : fields)
            if (k == key) return &v;
        return nullptr;
    }
    std::string field(std::string_view key) const {
        const auto* v = find(key);
        if (!v) throw ParseError(std::string(event_name(kind)) + ": missing field '" +
                                 std::string(key) + "'");
        return unescape(*v);
    }
    std::uint64_t field_u64(std::string_view key) const { return parse_u64(field(key), "field"); }
    double field_real(std::string_view key) const { return parse_real(field(key), "field"); }
    Chunk field_chunk(std::string_view key) const { return parse_chunk(field(key)); }

    std::string to_line() const {
        std::string out = "t=" + std::to_string(tick) + " ph=" + std::to_string(phase) +
                          " ev=" + event_name(kind);
        for (const auto& [k, v] : fields) {
            out += ' ';
            out += k;
            out += '=';
            out += v;
        }
        return out;
    }
};

class Trace {
public:
    int schema_version = 1;
    std::uint64_t seed = 0;

    void append(TraceEvent ev) { events_.push_back(std::move(ev)); }
    const std::vector<TraceEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    std::string to_text() const {
        std::string out = "ctm-trace schema_version=" + std::to_string(schema_version) +
                          " seed=" + std::to_string(seed) + "\n";
        for (const auto& ev : events_) {
            out += ev.to_line();
            out += '\n';
        }
        return out;
    }

    static Trace from_text(std::string_view text) {
        Trace trace;
        std::size_t lineno = 0;
        bool saw_header = false;
        for (auto line : split(text, '\n')) {
            ++lineno;
            line = trim(line);
            if (line.empty()) continue;
            try {
                if (!saw_header) {
                    auto toks = split(line, ' ');
                    if (toks.empty() || toks[0] != "ctm-trace")
                        throw ParseError("expected 'ctm-trace' header");
                    for (std::size_t i = 1; i < toks.size(); ++i) {
                        auto kv = split(toks[i], '=');
                        if (kv.size() != 2) throw ParseError("bad header token");
                        if (kv[0] == "schema_version")
                            trace.schema_version = static_cast<int>(parse_u64(kv[1], "schema_version"));
                        else if (kv[0] == "seed")
                            trace.seed = parse_u64(kv[1], "seed");
                    }
                    saw_header = true;
                    continue;
                }
                TraceEvent ev;
                bool have_t = false, have_ph = false, have_ev = false;
                for (auto tok : split(line, ' ')) {
                    if (tok.empty()) throw ParseError("empty token (double space?)");
                    auto eq = tok.find('=');
                    if (eq == std::string_view::npos) throw ParseError("token without '='");
                    auto key = tok.substr(0, eq);
                    auto value = tok.substr(eq + 1);
                    if (key == "t" && !have_t) {
                        ev.tick = parse_u64(value, "t");
                        have_t = true;
                    } else if (key == "ph" && !have_ph) {
                        ev.phase = static_cast<int>(parse_u64(value, "ph"));
                        have_ph = true;
                    } else if (key == "ev" && !have_ev) {
                        ev.kind = parse_event_kind(value);
                        have_ev = true;
                    } else {
                        ev.fields.emplace_back(std::string(key), std::string(value));
                    }
                }
                if (!have_t || !have_ph || !have_ev)
                    throw ParseError("missing t/ph/ev");
                trace.append(std::move(ev));
            } catch (const ParseError& e) {
                throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
            }
        }
        if (!saw_header) throw ParseError("line 1: missing trace header");
        return trace;
    }

private:
    std::vector<TraceEvent> events_;
};

// Filter criteria: kind=<EventKind>, tick=<n> or tick=<a>..<b>, addr=<n>
// (matches any address-bearing field), or any literal field=value pair.
inline std::vector<TraceEvent> filter_events(const Trace& trace,
                                             const std::map<std::string, std::string>& criteria) {
    std::vector<TraceEvent> out;
    for (const auto& ev : trace.events()) {
        bool keep = true;
        for (const auto& [key, want] : criteria) {
            if (key == "kind") {
                if (event_name(ev.kind) != want) keep = false;
            } else if (key == "tick") {
                auto dots = want.find("..");
                Tick lo, hi;
                if (dots == std::string::npos) {
                    lo = hi = parse_u64(want, "tick filter");
                } else {
                    lo = parse_u64(std::string_view(want).substr(0, dots), "tick filter");
                    hi = parse_u64(std::string_view(want).substr(dots + 2), "tick filter");
                }
                if (ev.tick < lo || ev.tick > hi) keep = false;
            } else if (key == "addr") {
                bool any = false;
                for (const char* f : {"addr", "from", "to", "a", "b", "source"}) {
                    const auto* v = ev.find(f);
                    if (v && *v == want) any = true;
                }
                if (!any) keep = false;
            } else {
                const auto* v = ev.find(key);
                if (!v || *v != want) keep = false;
            }
            if (!keep) break;
        }
        if (keep) out.push_back(ev);
    }
    return out;
}

// The stream of consciousness: time-ordered broadcast gists.
inline std::vector<std::pair<Tick, Gist>> stream_of_consciousness(const Trace& trace) {
    std::vector<std::pair<Tick, Gist>> out;
    for (const auto& ev : trace.events())
        if (ev.kind == EventKind::Broadcast)
            out.emplace_back(ev.tick, ev.field_chunk("chunk").gist);
    return out;
}

} // namespace ctm
