#pragma once

// The whole machine: processors + Up-Tree + STM + environment, advanced one
// tick at a time. Each tick runs fixed phases:
//   1 environment sensors -> input maps -> inboxes (subject to sleep gating)
//   2 previous tick's broadcast and link sends delivered to inboxes
//   3 processors step (acks / link sends / commands / feedback buffered)
//   4 submissions logged, pipeline advances one level, submissions enter level 0
//   5 completed competition's winner installs into STM, broadcast queued
//   6 output maps drain actuator commands (blocked while sleeping)
//   7 buffered feedback plus the hush-broadcast rule update weight-giving powers
// Events are appended to the trace as they happen, stamped (tick, phase), so
// a trace is byte-identical for identical (config, seed).

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "behaviors.hpp"
#include "chunk.hpp"
#include "config.hpp"
#include "environment.hpp"
#include "processor.hpp"
#include "rng.hpp"
#include "trace.hpp"
#include "uptree.hpp"

namespace ctm {

struct TickReport {
    Tick tick = 0;
    std::optional<Chunk> installed;           // StmInstall this tick, if any
    std::optional<Chunk> broadcast_delivered; // broadcast received this tick, if any
};

struct MoodReading {
    Tick tick = 0;
    double mood = 0.0;
    double intensity = 0.0;
    std::string label;
};

inline const char* mood_label(double mood) {
    if (mood > 0.0) return "optimistic";
    if (mood < 0.0) return "pessimistic";
    return "neutral";
}

class Ctm {
public:
    explicit Ctm(CtmConfig cfg) : cfg_(std::move(cfg)) {
        auto diags = validate_config(cfg_);
        for (const auto& p : cfg_.roster)
            if (!behavior_known(p.behavior))
                diags.push_back("processor." + std::to_string(p.address) +
                                ": unknown behavior '" + p.behavior + "'");
        if (!environment_known(cfg_.env.kind))
            diags.push_back("env: unknown kind '" + cfg_.env.kind + "'");
        if (!diags.empty()) throw ConfigError(std::move(diags));

        sea_.c_sea = cfg_.c_sea;
        sea_.clamp_exp = cfg_.g_clamp_exp;

        Rng master(cfg_.seed);
        tree_rng_ = master.derive(0);
        env_ = make_environment(cfg_.env, master.derive(1));

        const std::size_t n = static_cast<std::size_t>(cfg_.n_processors);
        procs_.reserve(n);
        proc_rngs_.reserve(n);
        std::map<Address, const ProcessorSpec*> roster;
        for (const auto& p : cfg_.roster) roster[p.address] = &p;
        ProcessorSpec idle_spec; // unlisted processors idle
        for (std::size_t i = 0; i < n; ++i) {
            const ProcessorSpec* spec = &idle_spec;
            if (auto it = roster.find(static_cast<Address>(i)); it != roster.end())
                spec = it->second;
            procs_.emplace_back(static_cast<Address>(i), spec->specialty, 4096);
            try {
                procs_.back().behavior = make_behavior(*spec);
            } catch (const std::exception& e) {
                diags.push_back("processor." + std::to_string(i) + ": " + e.what());
            }
            proc_rngs_.push_back(master.derive(1000 + i));
        }
        if (!diags.empty()) throw ConfigError(std::move(diags));

        for (auto [a, b] : cfg_.preformed_links) {
            procs_[a].links[b] = {cfg_.link_threshold, 0, true};
            procs_[b].links[a] = {cfg_.link_threshold, 0, true};
        }

        tree_ = std::make_unique<UpTree>(cfg_.n_processors, cfg_.arity, cfg_.f, cfg_.mode);
        tree_->set_observer([this](std::uint32_t level, std::uint64_t node, const Chunk& c) {
            trace_.append(TraceEvent(now_, 4, EventKind::NodeWin)
                              .with_u64("level", level)
                              .with_u64("node", node)
                              .with_chunk("chunk", c));
        });

        stm_ = make_chunk(0, 0, Gist::nil(), 0.0);
        last_hush_.assign(n, std::nullopt);
        trace_.seed = cfg_.seed;
    }

    Tick now() const { return now_; }
    std::uint32_t height() const { return tree_->shape().height; }
    const TreeShape& shape() const { return tree_->shape(); }
    const CtmConfig& config() const { return cfg_; }
    const Chunk& stm() const { return stm_; }
    const Trace& trace() const { return trace_; }
    Environment& env() { return *env_; }
    const std::vector<ActuatorEvent>& actuator_log() const { return actuator_log_; }
    std::vector<Processor>& processors() { return procs_; }
    Processor& processor(Address a) { return procs_.at(a); }
    Behavior* behavior(Address a) { return procs_.at(a).behavior.get(); }

    TickReport tick() {
        if (now_ >= cfg_.lifetime) throw std::out_of_range("tick: lifetime exhausted");
        const Tick t = now_;
        const std::size_t n = procs_.size();
        TickReport report{t, std::nullopt, std::nullopt};
        std::vector<std::vector<InboxItem>> inbox(n);

        // sleep gating is sampled once, before this tick's steps
        bool gate_inputs = false, gate_outputs = false;
        double gate_weight = 0.0;
        for (const auto& p : procs_) {
            if (p.behavior->gating_inputs()) {
                gate_inputs = true;
                gate_weight = std::max(gate_weight, p.behavior->input_gate_weight());
            }
            if (p.behavior->gating_outputs()) gate_outputs = true;
        }

        // (1) environment: apply last tick's commands, read sensors, map inputs
        env_->apply(t, pending_commands_);
        pending_commands_.clear();
        auto readings = env_->sense(t);
        for (const auto& m : cfg_.inputs) {
            for (const auto& r : readings) {
                if (r.sensor != m.sensor) continue;
                if (gate_inputs && !(r.weight > gate_weight)) continue;
                for (Address dest : m.to) {
                    Chunk c = make_chunk(dest, t, r.gist, r.weight);
                    inbox[dest].push_back({InboxItem::Source::input, dest, r.sensor, c});
                    procs_[dest].memory.add({t, MemoryKind::input_received, c});
                    trace_.append(TraceEvent(t, 1, EventKind::InputDelivery)
                                      .with("sensor", r.sensor)
                                      .with_u64("to", dest)
                                      .with_chunk("chunk", c));
                }
            }
        }

        // (2) deliveries from the previous tick
        std::optional<Chunk> delivered;
        if (pending_broadcast_) {
            Chunk b = *pending_broadcast_;
            pending_broadcast_.reset();
            delivered = b;
            report.broadcast_delivered = b;
            trace_.append(TraceEvent(t, 2, EventKind::Broadcast).with_chunk("chunk", b));
            for (std::size_t i = 0; i < n; ++i) {
                inbox[i].push_back({InboxItem::Source::broadcast, b.address, "", b});
                procs_[i].memory.add({t, MemoryKind::broadcast_received, b});
            }
        }
        for (const auto& pl : pending_links_) {
            inbox[pl.to].push_back({InboxItem::Source::link, pl.from, "", pl.chunk});
            procs_[pl.to].memory.add({t, MemoryKind::link_received, pl.chunk});
        }
        pending_links_.clear();

        // (3) processor steps, then buffered acks and link sends
        std::vector<Effects> fx(n);
        std::vector<SubmissionIntent> intents(n);
        for (std::size_t i = 0; i < n; ++i)
            intents[i] = procs_[i].behavior->step(procs_[i], t, inbox[i], fx[i], proc_rngs_[i]);
        for (std::size_t i = 0; i < n; ++i) {
            for (Address peer : fx[i].acks) {
                if (peer >= n) throw std::logic_error("acknowledge: no such processor");
                if (acknowledge_useful(procs_[i], procs_[peer], cfg_.link_threshold))
                    trace_.append(TraceEvent(t, 3, EventKind::LinkFormed)
                                      .with_u64("a", std::min<std::uint64_t>(i, peer))
                                      .with_u64("b", std::max<std::uint64_t>(i, peer)));
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& [to, c] : fx[i].link_sends) {
                if (to >= n || to == i || !link_formed(procs_[i], to))
                    throw std::logic_error("send_via_link: no formed link " +
                                           std::to_string(i) + "->" + std::to_string(to));
                pending_links_.push_back({static_cast<Address>(i), to, c});
                trace_.append(TraceEvent(t, 3, EventKind::LinkSend)
                                  .with_u64("from", i)
                                  .with_u64("to", to)
                                  .with_chunk("chunk", c));
            }
        }

        // (4) submissions; pipeline advances on pre-existing occupancy, then
        // this tick's chunks enter level 0
        std::vector<Chunk> subs;
        subs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            Chunk c = make_submission(procs_[i], intents[i], t);
            subs.push_back(c);
            trace_.append(TraceEvent(t, 4, EventKind::Submission)
                              .with_u64("addr", i)
                              .with_chunk("chunk", c));
        }
        auto winner = tree_->advance(tree_rng_);
        tree_->submit_level0(subs, t);

        // (5) STM install + broadcast queue
        if (winner) {
            stm_ = *winner;
            report.installed = stm_;
            pending_broadcast_ = stm_;
            trace_.append(TraceEvent(t, 5, EventKind::StmInstall).with_chunk("chunk", stm_));
        }

        // (6) actuator commands, through the configured output maps only
        if (!gate_outputs) {
            for (const auto& m : cfg_.outputs) {
                for (Address src : m.from) {
                    for (const auto& cmd : fx[src].commands) {
                        if (cmd.actuator != m.actuator) continue;
                        ActuatorEvent ev{t, src, cmd.actuator, cmd.command, cmd.magnitude};
                        pending_commands_.push_back(ev);
                        actuator_log_.push_back(ev);
                        trace_.append(TraceEvent(t, 6, EventKind::ActuatorCommand)
                                          .with_u64("source", src)
                                          .with("actuator", cmd.actuator)
                                          .with("command", cmd.command)
                                          .with_real("magnitude", cmd.magnitude));
                    }
                }
            }
        }

        // (7) feedback: processors' own, then the hush-broadcast rule
        std::vector<std::pair<Address, Feedback>> feedback;
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& fb : fx[i].self_feedback)
                feedback.emplace_back(static_cast<Address>(i), fb);
        if (delivered && delivered->gist.has(Tag::command) &&
            delivered->gist.payload() == "hush") {
            for (std::size_t j = 0; j < n; ++j) {
                if (j == delivered->address) continue;
                if (last_hush_[j] && t - *last_hush_[j] < cfg_.sea_cooldown) continue;
                last_hush_[j] = t;
                feedback.emplace_back(static_cast<Address>(j),
                                      Feedback{Verdict::hush, delivered->t, "hush-command"});
            }
        }
        for (const auto& [addr, fb] : feedback) {
            procs_[addr].g = sea_update(procs_[addr].g, fb, sea_);
            trace_.append(TraceEvent(t, 7, EventKind::FeedbackApplied)
                              .with_u64("addr", addr)
                              .with("verdict", verdict_name(fb.verdict))
                              .with_u64("ref", fb.ref_tick)
                              .with_real("g", procs_[addr].g)
                              .with("reason", fb.reason));
        }

        history_.push_back({t, stm_.mood, stm_.intensity, mood_label(stm_.mood)});
        now_ = t + 1;
        return report;
    }

    const Trace& run(Tick until_tick) {
        if (until_tick > cfg_.lifetime)
            throw std::invalid_argument("run: until_tick exceeds lifetime");
        while (now_ < until_tick) tick();
        return trace_;
    }

    MoodReading mood_reading(Tick t) const {
        if (t < height())
            throw std::invalid_argument("mood_reading: no conscious content before tick " +
                                        std::to_string(height()));
        if (t >= now_) throw std::out_of_range("mood_reading: tick not simulated yet");
        return history_[t];
    }

private:
    struct PendingLink {
        Address from = 0, to = 0;
        Chunk chunk;
    };

    CtmConfig cfg_;
    SeaParams sea_;
    std::vector<Processor> procs_;
    std::vector<Rng> proc_rngs_;
    std::unique_ptr<UpTree> tree_;
    Rng tree_rng_{0};
    std::unique_ptr<Environment> env_;
    Chunk stm_;
    std::optional<Chunk> pending_broadcast_;
    std::vector<PendingLink> pending_links_;
    std::vector<ActuatorEvent> pending_commands_;
    std::vector<ActuatorEvent> actuator_log_;
    std::vector<std::optional<Tick>> last_hush_;
    std::vector<MoodReading> history_;
    Trace trace_;
    Tick now_ = 0;
};

} // namespace ctm
