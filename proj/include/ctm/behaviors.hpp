#pragma once

// Built-in processor behaviors. A behavior is stepped once per tick with its
// inbox (this tick's broadcast/link/input deliveries) and produces a
// submission intent plus buffered effects (link sends, acknowledgements,
// actuator commands, self-feedback). Behaviors are selected by name in the
// machine configuration; there is no dynamic code loading.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "gist.hpp"
#include "processor.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace ctm {

struct InboxItem {
    enum class Source { broadcast, link, input };
    Source source = Source::broadcast;
    Address from = 0;    // chunk origin (broadcast winner / link sender)
    std::string sensor;  // inputs only
    Chunk chunk;
};

struct ActuatorIntent {
    std::string actuator;
    std::string command;
    double magnitude = 1.0;
};

struct Effects {
    std::vector<std::pair<Address, Chunk>> link_sends;
    std::vector<Address> acks;
    std::vector<ActuatorIntent> commands;
    std::vector<Feedback> self_feedback;
};

class Behavior {
public:
    virtual ~Behavior() = default;
    virtual SubmissionIntent step(Processor& self, Tick tick, const std::vector<InboxItem>& inbox,
                                  Effects& fx, Rng& rng) = 0;
    // Sleep-style gating, sampled by the machine at the top of each tick.
    virtual bool gating_inputs() const { return false; }
    virtual double input_gate_weight() const { return 0.0; }
    virtual bool gating_outputs() const { return false; }
};

namespace detail {

class BehaviorParams {
public:
    explicit BehaviorParams(const std::map<std::string, std::string>& m) : m_(m) {}
    double real(const std::string& key, double def) const {
        auto it = m_.find(key);
        return it == m_.end() ? def : parse_real(it->second, key.c_str());
    }
    std::uint64_t u64(const std::string& key, std::uint64_t def) const {
        auto it = m_.find(key);
        return it == m_.end() ? def : parse_u64(it->second, key.c_str());
    }
    bool flag(const std::string& key, bool def) const {
        auto it = m_.find(key);
        if (it == m_.end()) return def;
        return it->second == "1" || it->second == "true" || it->second == "yes";
    }
    std::string str(const std::string& key, std::string def) const {
        auto it = m_.find(key);
        return it == m_.end() ? std::move(def) : it->second;
    }
    bool has(const std::string& key) const { return m_.count(key) > 0; }

private:
    const std::map<std::string, std::string>& m_;
};

inline std::string clip(std::string_view s, std::size_t n) {
    return std::string(s.substr(0, n));
}

} // namespace detail

// Submits nothing, ever.
class IdleBehavior : public Behavior {
public:
    SubmissionIntent step(Processor&, Tick, const std::vector<InboxItem>&, Effects&,
                          Rng&) override {
        return {};
    }
};

// Fixed gist at a fixed cadence; the workhorse background chatter.
class ConstantBehavior : public Behavior {
public:
    explicit ConstantBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        payload_ = p.str("payload", spec.specialty.empty() ? "tick" : spec.specialty);
        weight_ = p.real("weight", 1.0);
        period_ = p.u64("period", 1);
        offset_ = p.u64("offset", 0);
        Tag tag = Tag::speech;
        std::string tag_spec = p.str("tag", "speech");
        for (int i = 0; i < kTagCount; ++i)
            if (tag_spec == tag_name(static_cast<Tag>(i))) tag = static_cast<Tag>(i);
        std::string flag = p.str("flag", "");
        if (flag == "surprising") gist_ = Gist::make({tag}, payload_, {Flag::surprising});
        else if (flag == "terrible") gist_ = Gist::make({tag}, payload_, {Flag::terrible});
        else if (flag == "wonderful") gist_ = Gist::make({tag}, payload_, {Flag::wonderful});
        else gist_ = Gist::make({tag}, payload_);
    }

    SubmissionIntent step(Processor&, Tick tick, const std::vector<InboxItem>&, Effects&,
                          Rng&) override {
        if (period_ == 0 || tick % period_ != offset_ % std::max<Tick>(period_, 1)) return {};
        return {gist_, weight_};
    }

private:
    std::string payload_;
    Gist gist_ = Gist::nil();
    double weight_ = 1.0;
    Tick period_ = 1, offset_ = 0;
};

// Sees obstacles through the eye sensor; can warn a peer over a link and/or
// compete for consciousness, depending on wiring.
class VisionBehavior : public Behavior {
public:
    explicit VisionBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        weight_ = p.real("weight", 8.0);
        submit_ = p.flag("submit", true);
        has_peer_ = p.has("link_peer");
        peer_ = static_cast<Address>(p.u64("link_peer", 0));
    }

    SubmissionIntent step(Processor& self, Tick tick, const std::vector<InboxItem>& inbox,
                          Effects& fx, Rng&) override {
        bool saw = false;
        for (const auto& item : inbox)
            if (item.source == InboxItem::Source::input && item.sensor == "eye" &&
                item.chunk.gist.payload() == "obstacle-ahead")
                saw = true;
        if (saw) {
            if (has_peer_ && link_formed(self, peer_))
                fx.link_sends.emplace_back(
                    peer_, make_chunk(self.address, tick,
                                      Gist::make({Tag::vision}, "obstacle-ahead"), weight_));
            if (submit_) return {Gist::make({Tag::vision}, "obstacle-ahead"), weight_};
        }
        return {};
    }

private:
    double weight_ = 8.0;
    bool submit_ = true, has_peer_ = false;
    Address peer_ = 0;
};

// Walks forward every tick; steps over when warned (by link or broadcast).
class WalkBehavior : public Behavior {
public:
    explicit WalkBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        actuator_ = p.str("actuator", "legs");
    }

    SubmissionIntent step(Processor&, Tick, const std::vector<InboxItem>& inbox, Effects& fx,
                          Rng&) override {
        bool warned = false;
        for (const auto& item : inbox)
            if (item.source != InboxItem::Source::input &&
                item.chunk.gist.payload() == "obstacle-ahead")
                warned = true;
        fx.commands.push_back({actuator_, warned ? "step_over" : "advance", 1.0});
        return {};
    }

private:
    std::string actuator_ = "legs";
};

// Turns raw frames into scene-level gists: everything after '#' (surface
// detail) is dropped, so detail churn never reaches consciousness.
class SceneBehavior : public Behavior {
public:
    explicit SceneBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        weight_ = p.real("weight", 2.0);
        sensor_ = p.str("sensor", "frame");
    }

    SubmissionIntent step(Processor&, Tick, const std::vector<InboxItem>& inbox, Effects&,
                          Rng&) override {
        for (const auto& item : inbox) {
            if (item.source != InboxItem::Source::input || item.sensor != sensor_) continue;
            const auto& payload = item.chunk.gist.payload();
            auto hash = payload.find('#');
            return {Gist::make({Tag::vision}, payload.substr(0, hash)), weight_};
        }
        return {};
    }

private:
    double weight_ = 2.0;
    std::string sensor_;
};

// Watches consecutive vision broadcasts and yells when the gist changes.
// Disabled between enter-dream/wake link messages (dream incoherence goes
// unchallenged).
class ChangeDetectorBehavior : public Behavior {
public:
    explicit ChangeDetectorBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        weight_ = p.real("weight", 50.0);
    }

    SubmissionIntent step(Processor& self, Tick, const std::vector<InboxItem>& inbox, Effects&,
                          Rng&) override {
        std::optional<std::string> seen;
        for (const auto& item : inbox) {
            if (item.source == InboxItem::Source::link) {
                if (item.chunk.gist.payload() == "enter-dream") {
                    disabled_ = true;
                    pending_ = false;
                }
                if (item.chunk.gist.payload() == "wake") disabled_ = false;
            }
            if (item.source != InboxItem::Source::broadcast) continue;
            const auto& payload = item.chunk.gist.payload();
            if (payload == "scene-changed") {
                // the alarm reached consciousness, stop repeating; alarms are
                // never tracked as scenes
                if (item.chunk.address == self.address) pending_ = false;
            } else if (item.chunk.gist.has(Tag::vision) && !payload.empty()) {
                seen = payload;
            }
        }
        if (disabled_) return {};
        if (seen) {
            std::string scene = seen->substr(0, seen->find('#'));
            if (last_.has_value() && scene != *last_) pending_ = true;
            last_ = scene;
        }
        if (pending_)
            return {Gist::make({Tag::vision}, "scene-changed", {Flag::surprising}), weight_};
        return {};
    }

private:
    double weight_ = 50.0;
    bool disabled_ = false;
    bool pending_ = false;
    std::optional<std::string> last_;
};

// The sleep governor: counts time awake, then floods the competition with
// high-weight NIL chunks (decaying with the need), hands the stage to the
// dream creator, and wakes — early if something loud enough gets through the
// input gate.
class SleepBehavior : public Behavior {
public:
    explicit SleepBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        awake_ticks_ = p.u64("awake_ticks", 60);
        sleep_ticks_ = p.u64("sleep_ticks", 100);
        dream_ticks_ = p.u64("dream_ticks", 25);
        weight_ = p.real("weight", 10000.0);
        gate_weight_ = p.real("gate_weight", 1000.0);
        const std::string notify = p.str("notify", "");
        for (auto part : split(notify, ','))
            if (!trim(part).empty())
                notify_.push_back(static_cast<Address>(parse_u64(trim(part), "notify")));
    }

    enum class Phase { awake, asleep, dreaming };
    Phase phase() const { return phase_; }
    Tick woke_by_noise_at() const { return woke_by_noise_at_; }

    bool gating_inputs() const override { return phase_ != Phase::awake; }
    double input_gate_weight() const override { return gate_weight_; }
    bool gating_outputs() const override { return phase_ != Phase::awake; }

    SubmissionIntent step(Processor& self, Tick tick, const std::vector<InboxItem>& inbox,
                          Effects& fx, Rng&) override {
        if (phase_ != Phase::awake) {
            for (const auto& item : inbox) {
                if (item.source == InboxItem::Source::input &&
                    item.chunk.weight > gate_weight_) {
                    woke_by_noise_at_ = tick;
                    wake(self, tick, fx);
                    return {};
                }
            }
        }
        switch (phase_) {
        case Phase::awake:
            if (++awake_count_ >= awake_ticks_) {
                phase_ = Phase::asleep;
                need_ = sleep_ticks_ + dream_ticks_;
            }
            return {};
        case Phase::asleep: {
            double frac = static_cast<double>(need_) / static_cast<double>(sleep_ticks_ + dream_ticks_);
            --need_;
            if (need_ <= dream_ticks_) {
                phase_ = Phase::dreaming;
                send_all(self, tick, "enter-dream", fx);
            }
            return {Gist::nil(), weight_ * frac};
        }
        case Phase::dreaming:
            if (need_ == 0) {
                wake(self, tick, fx);
                return {};
            }
            --need_;
            return {};
        }
        return {};
    }

private:
    void wake(Processor& self, Tick tick, Effects& fx) {
        phase_ = Phase::awake;
        awake_count_ = 0;
        need_ = 0;
        send_all(self, tick, "wake", fx);
    }

    void send_all(Processor& self, Tick tick, const std::string& msg, Effects& fx) {
        for (Address peer : notify_)
            if (link_formed(self, peer))
                fx.link_sends.emplace_back(
                    peer, make_chunk(self.address, tick, Gist::make({Tag::command}, msg), 1.0));
    }

    Tick awake_ticks_, sleep_ticks_, dream_ticks_;
    double weight_, gate_weight_;
    std::vector<Address> notify_;
    Phase phase_ = Phase::awake;
    Tick awake_count_ = 0;
    Tick need_ = 0;
    Tick woke_by_noise_at_ = 0;
};

// Stashes salient awake experiences and, while dreaming, recombines them
// into dream gists.
class DreamCreatorBehavior : public Behavior {
public:
    explicit DreamCreatorBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        weight_ = p.real("weight", 100.0);
        stash_cap_ = p.u64("stash_cap", 16);
    }

    bool dreaming() const { return dreaming_; }

    SubmissionIntent step(Processor& self, Tick tick, const std::vector<InboxItem>& inbox,
                          Effects&, Rng& rng) override {
        for (const auto& item : inbox) {
            if (item.source == InboxItem::Source::link) {
                if (item.chunk.gist.payload() == "enter-dream") dreaming_ = true;
                if (item.chunk.gist.payload() == "wake") dreaming_ = false;
            }
            if (!dreaming_ && item.source == InboxItem::Source::broadcast &&
                item.chunk.gist.salient() &&
                item.chunk.gist.payload().rfind("dream:", 0) != 0 &&
                !item.chunk.gist.payload().empty()) {
                stash_.push_back(detail::clip(item.chunk.gist.payload(), 24));
                if (stash_.size() > stash_cap_) stash_.erase(stash_.begin());
            }
        }
        (void)self;
        (void)tick;
        if (!dreaming_) return {};
        std::string a = stash_.empty() ? "void" : stash_[rng.uniform_index(stash_.size())];
        std::string b = stash_.empty() ? "flying" : stash_[rng.uniform_index(stash_.size())];
        return {Gist::make({Tag::vision}, "dream:" + a + "/" + b), weight_};
    }

private:
    double weight_ = 100.0;
    std::uint64_t stash_cap_ = 16;
    bool dreaming_ = false;
    std::vector<std::string> stash_;
};

// Elaborates on dream broadcasts — inner speech riffing on the dream.
class InnerBehavior : public Behavior {
public:
    explicit InnerBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        weight_ = p.real("weight", 40.0);
    }

    SubmissionIntent step(Processor&, Tick, const std::vector<InboxItem>& inbox, Effects&,
                          Rng&) override {
        for (const auto& item : inbox) {
            if (item.source != InboxItem::Source::broadcast) continue;
            const auto& payload = item.chunk.gist.payload();
            if (payload.rfind("dream:", 0) == 0)
                return {Gist::make({Tag::speech}, "inner:" + detail::clip(payload.substr(6), 24)),
                        weight_};
        }
        return {};
    }

private:
    double weight_ = 40.0;
};

// Mindful meditation: during its sessions, repeats a hush mantra that the
// machine's feedback rule turns into Hush for every other processor.
class MmpBehavior : public Behavior {
public:
    explicit MmpBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        weight_ = p.real("weight", 3.0);
        const std::string sessions = p.str("sessions", "0-300");
        for (auto part : split(sessions, ',')) {
            part = trim(part);
            if (part.empty()) continue;
            auto dash = part.find('-');
            if (dash == std::string_view::npos)
                throw ParseError("mmp sessions: expected start-end");
            sessions_.emplace_back(parse_u64(trim(part.substr(0, dash)), "session start"),
                                   parse_u64(trim(part.substr(dash + 1)), "session end"));
        }
    }

    bool in_session(Tick t) const {
        for (auto [b, e] : sessions_)
            if (t >= b && t < e) return true;
        return false;
    }

    SubmissionIntent step(Processor&, Tick tick, const std::vector<InboxItem>&, Effects&,
                          Rng&) override {
        if (!in_session(tick)) return {};
        return {Gist::make({Tag::command, Tag::speech}, "hush"), weight_};
    }

private:
    double weight_ = 3.0;
    std::vector<std::pair<Tick, Tick>> sessions_;
};

// Answers matching queries; once a link to the asker has formed, answers
// travel the link (unconsciously) instead of competing for STM.
class ResponderBehavior : public Behavior {
public:
    explicit ResponderBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        trigger_ = p.str("trigger", "what-is-her-name");
        answer_ = p.str("answer", "Tatiana");
        weight_ = p.real("weight", 6.0);
        has_peer_ = p.has("link_peer");
        peer_ = static_cast<Address>(p.u64("link_peer", 0));
    }

    SubmissionIntent step(Processor& self, Tick tick, const std::vector<InboxItem>& inbox,
                          Effects& fx, Rng&) override {
        for (const auto& item : inbox) {
            if (item.source == InboxItem::Source::broadcast && item.chunk.gist.has(Tag::query) &&
                item.chunk.gist.payload() == trigger_)
                pending_ref_ = item.chunk.t;
        }
        if (!pending_ref_) return {};
        Tick ref = *pending_ref_;
        pending_ref_.reset();
        auto gist = Gist::make({Tag::answer}, answer_ + "#ref=" + std::to_string(ref));
        if (has_peer_ && link_formed(self, peer_)) {
            fx.link_sends.emplace_back(peer_, make_chunk(self.address, tick, gist, weight_));
            return {};
        }
        return {gist, weight_};
    }

private:
    std::string trigger_, answer_;
    double weight_ = 6.0;
    bool has_peer_ = false;
    Address peer_ = 0;
    std::optional<Tick> pending_ref_;
};

// Asks a question periodically and acknowledges useful answers — the ack
// stream is what forms the link.
class AskerBehavior : public Behavior {
public:
    explicit AskerBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        question_ = p.str("question", "what-is-her-name");
        period_ = p.u64("period", 25);
        weight_ = p.real("weight", 5.0);
    }

    std::uint64_t answers_via_link() const { return answers_via_link_; }

    SubmissionIntent step(Processor&, Tick tick, const std::vector<InboxItem>& inbox, Effects& fx,
                          Rng&) override {
        for (const auto& item : inbox) {
            if (!item.chunk.gist.has(Tag::answer)) continue;
            if (item.source == InboxItem::Source::broadcast ||
                item.source == InboxItem::Source::link) {
                fx.acks.push_back(item.from);
                if (item.source == InboxItem::Source::link) ++answers_via_link_;
            }
        }
        if (period_ > 0 && tick % period_ == 0)
            return {Gist::make({Tag::query, Tag::speech}, question_), weight_};
        return {};
    }

private:
    std::string question_;
    Tick period_ = 25;
    double weight_ = 5.0;
    std::uint64_t answers_via_link_ = 0;
};

// Thinks "move" thoughts; when its own thought comes back as a broadcast, it
// actually moves the actuator.
class MotorBehavior : public Behavior {
public:
    explicit MotorBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        period_ = p.u64("period", 10);
        weight_ = p.real("weight", 20.0);
        entity_ = p.str("entity", "arm");
    }

    SubmissionIntent step(Processor& self, Tick tick, const std::vector<InboxItem>& inbox,
                          Effects& fx, Rng&) override {
        for (const auto& item : inbox)
            if (item.source == InboxItem::Source::broadcast &&
                item.chunk.address == self.address && item.chunk.gist.has(Tag::command) &&
                item.chunk.gist.payload() == "move-" + entity_)
                fx.commands.push_back({entity_, "move", 1.0});
        if (period_ > 0 && tick % period_ == 0)
            return {Gist::make({Tag::command}, "move-" + entity_), weight_};
        return {};
    }

private:
    Tick period_ = 10;
    double weight_ = 20.0;
    std::string entity_;
};

// Model-of-the-World: correlates broadcast "move" thoughts with proprioceptive
// movement reports and tags entities self / not_self / unknown.
class WorldModelBehavior : public Behavior {
public:
    enum class EntityTag { self, not_self, unknown };

    struct Entry {
        std::uint64_t co = 0;  // movements preceded by a matching command broadcast
        std::uint64_t non = 0; // movements with no matching command
    };

    explicit WorldModelBehavior(const ProcessorSpec& spec) {
        detail::BehaviorParams p(spec.params);
        threshold_ = p.u64("self_threshold", 5);
        window_ = p.u64("window", 2);
        report_weight_ = p.real("report_weight", 25.0);
        const std::string entities = p.str("entities", "");
        for (auto part : split(entities, ','))
            if (!trim(part).empty()) entries_[std::string(trim(part))] = {};
    }

    const std::map<std::string, Entry>& entries() const { return entries_; }
    bool ctm_tagged_conscious() const { return ctm_conscious_; }

    EntityTag tag_of(const std::string& entity) const {
        auto it = entries_.find(entity);
        if (it == entries_.end()) return EntityTag::unknown;
        const auto& e = it->second;
        if (e.co >= threshold_ && e.non * 4 <= e.co) return EntityTag::self;
        if (e.non >= threshold_ && e.co * 4 <= e.non) return EntityTag::not_self;
        return EntityTag::unknown;
    }

    static const char* tag_name(EntityTag t) {
        switch (t) {
        case EntityTag::self: return "self";
        case EntityTag::not_self: return "not_self";
        case EntityTag::unknown: return "unknown";
        }
        return "?";
    }

    SubmissionIntent step(Processor&, Tick tick, const std::vector<InboxItem>& inbox, Effects&,
                          Rng&) override {
        for (const auto& item : inbox) {
            const auto& payload = item.chunk.gist.payload();
            if (item.source == InboxItem::Source::broadcast) {
                if (item.chunk.gist.has(Tag::command) && payload.rfind("move-", 0) == 0)
                    pending_.emplace_back(payload.substr(5), tick);
                if (payload.find("#self-model") != std::string::npos) ctm_conscious_ = true;
            }
            if (item.source == InboxItem::Source::input && payload.rfind("moved:", 0) == 0) {
                std::string entity = payload.substr(6);
                bool matched = false;
                for (auto it = pending_.begin(); it != pending_.end(); ++it) {
                    if (it->first == entity && tick >= it->second &&
                        tick - it->second <= window_) {
                        matched = true;
                        pending_.erase(it);
                        break;
                    }
                }
                auto& e = entries_[entity];
                if (matched) ++e.co;
                else ++e.non;
            }
        }
        // drop stale pending commands
        while (!pending_.empty() && tick > pending_.front().second + window_ + 1)
            pending_.erase(pending_.begin());

        // announce the first self discovery until the thought is heard back
        if (!ctm_conscious_)
            for (const auto& [entity, e] : entries_)
                if (tag_of(entity) == EntityTag::self)
                    return {Gist::make({Tag::speech}, entity + "-is-self#self-model"),
                            report_weight_};
        return {};
    }

private:
    std::uint64_t threshold_ = 5;
    Tick window_ = 2;
    double report_weight_ = 25.0;
    std::map<std::string, Entry> entries_;
    std::vector<std::pair<std::string, Tick>> pending_;
    bool ctm_conscious_ = false;
};

inline const std::vector<std::string>& behavior_names() {
    static const std::vector<std::string> names{
        "idle",   "constant",      "vision", "walk",  "scene",
        "change_detector", "sleep", "dream_creator", "inner", "mmp",
        "responder", "asker", "motor", "world_model"};
    return names;
}

inline bool behavior_known(const std::string& kind) {
    const auto& names = behavior_names();
    return std::find(names.begin(), names.end(), kind) != names.end();
}

inline std::unique_ptr<Behavior> make_behavior(const ProcessorSpec& spec) {
    const auto& k = spec.behavior;
    if (k == "idle") return std::make_unique<IdleBehavior>();
    if (k == "constant") return std::make_unique<ConstantBehavior>(spec);
    if (k == "vision") return std::make_unique<VisionBehavior>(spec);
    if (k == "walk") return std::make_unique<WalkBehavior>(spec);
    if (k == "scene") return std::make_unique<SceneBehavior>(spec);
    if (k == "change_detector") return std::make_unique<ChangeDetectorBehavior>(spec);
    if (k == "sleep") return std::make_unique<SleepBehavior>(spec);
    if (k == "dream_creator") return std::make_unique<DreamCreatorBehavior>(spec);
    if (k == "inner") return std::make_unique<InnerBehavior>(spec);
    if (k == "mmp") return std::make_unique<MmpBehavior>(spec);
    if (k == "responder") return std::make_unique<ResponderBehavior>(spec);
    if (k == "asker") return std::make_unique<AskerBehavior>(spec);
    if (k == "motor") return std::make_unique<MotorBehavior>(spec);
    if (k == "world_model") return std::make_unique<WorldModelBehavior>(spec);
    throw ParseError("behavior: unknown kind '" + k + "'");
}

} // namespace ctm
