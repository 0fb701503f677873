#pragma once

// Environments close the sensor/actuator loop. apply() consumes the previous
// tick's actuator commands, sense() produces this tick's sensor readings.
// All randomness comes from the machine-derived rng, so runs replay exactly.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "gist.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace ctm {

struct SensorReading {
    std::string sensor;
    Gist gist;
    double weight = 0.0;
};

struct ActuatorEvent {
    Tick tick = 0;
    Address source = 0;
    std::string actuator;
    std::string command;
    double magnitude = 0.0;
};

class Environment {
public:
    virtual ~Environment() = default;
    virtual void apply(Tick, std::span<const ActuatorEvent>) {}
    virtual std::vector<SensorReading> sense(Tick) { return {}; }
    // named scalar signals for scenario metrics
    virtual double signal(const std::string&) const { return 0.0; }
};

namespace detail {

class EnvParams {
public:
    explicit EnvParams(const std::map<std::string, std::string>& m) : m_(m) {}
    double real(const std::string& key, double def) const {
        auto it = m_.find(key);
        return it == m_.end() ? def : parse_real(it->second, key.c_str());
    }
    std::uint64_t u64(const std::string& key, std::uint64_t def) const {
        auto it = m_.find(key);
        return it == m_.end() ? def : parse_u64(it->second, key.c_str());
    }
    std::string str(const std::string& key, std::string def) const {
        auto it = m_.find(key);
        return it == m_.end() ? std::move(def) : it->second;
    }

private:
    const std::map<std::string, std::string>& m_;
};

} // namespace detail

// A corridor with obstacles: "advance" moves one cell and collides on an
// obstacle cell; "step_over" moves one cell safely. The eye sensor reports an
// obstacle `lookahead` cells ahead.
class CorridorEnv : public Environment {
public:
    CorridorEnv(const EnvSpec& spec) {
        detail::EnvParams p(spec.params);
        length_ = p.u64("length", 12);
        goal_ = p.u64("goal", 10);
        lookahead_ = p.u64("lookahead", 2);
        sensor_weight_ = p.real("sensor_weight", 3.0);
        const std::string obstacles = p.str("obstacles", "3,7");
        for (auto part : split(obstacles, ','))
            if (!trim(part).empty()) obstacles_.insert(parse_u64(trim(part), "obstacles"));
    }

    void apply(Tick, std::span<const ActuatorEvent> commands) override {
        for (const auto& cmd : commands) {
            if (cmd.actuator != "legs" || position_ >= length_) continue;
            if (cmd.command == "advance") {
                position_ += 1;
                if (obstacles_.count(position_)) collided_ = true;
            } else if (cmd.command == "step_over") {
                position_ += 1;
            }
        }
    }

    std::vector<SensorReading> sense(Tick) override {
        std::vector<SensorReading> out;
        if (obstacles_.count(position_ + lookahead_))
            out.push_back({"eye", Gist::make({Tag::vision}, "obstacle-ahead"), sensor_weight_});
        return out;
    }

    double signal(const std::string& name) const override {
        if (name == "position") return static_cast<double>(position_);
        if (name == "collided") return collided_ ? 1.0 : 0.0;
        if (name == "fetch_success") return (!collided_ && position_ >= goal_) ? 1.0 : 0.0;
        return 0.0;
    }

private:
    std::uint64_t length_ = 12, goal_ = 10, lookahead_ = 2;
    std::uint64_t position_ = 0;
    std::set<std::uint64_t> obstacles_;
    double sensor_weight_ = 3.0;
    bool collided_ = false;
};

// A frame stream: payload "<scene>#v<k>" where surface details churn every
// detail_period ticks and the scene itself switches at change_tick (0 =
// never).
class FrameStreamEnv : public Environment {
public:
    FrameStreamEnv(const EnvSpec& spec) {
        detail::EnvParams p(spec.params);
        scene_ = p.str("scene", "parlor");
        changed_scene_ = p.str("changed_scene", "garden");
        change_tick_ = p.u64("change_tick", 0);
        detail_period_ = p.u64("detail_period", 4);
        weight_ = p.real("sensor_weight", 2.0);
    }

    std::vector<SensorReading> sense(Tick t) override {
        std::string scene = (change_tick_ > 0 && t >= change_tick_) ? changed_scene_ : scene_;
        std::string payload = scene;
        if (detail_period_ > 0) payload += "#v" + std::to_string(t / detail_period_);
        return {{"frame", Gist::make({Tag::vision}, payload), weight_}};
    }

private:
    std::string scene_, changed_scene_;
    Tick change_tick_ = 0;
    Tick detail_period_ = 4;
    double weight_ = 2.0;
};

// A quiet night: periodic faint ambient sounds and one optional loud noise.
class NightEnv : public Environment {
public:
    NightEnv(const EnvSpec& spec) {
        detail::EnvParams p(spec.params);
        noise_tick_ = p.u64("noise_tick", 0);
        noise_weight_ = p.real("noise_weight", 100000.0);
        ambient_period_ = p.u64("ambient_period", 2);
        ambient_weight_ = p.real("ambient_weight", 0.5);
    }

    std::vector<SensorReading> sense(Tick t) override {
        if (noise_tick_ > 0 && t == noise_tick_)
            return {{"ear", Gist::make({Tag::tactile}, "loud-noise", {Flag::surprising}),
                     noise_weight_}};
        if (ambient_period_ > 0 && t % ambient_period_ == 0)
            return {{"ear", Gist::make({Tag::tactile}, "ambient"), ambient_weight_}};
        return {};
    }

private:
    Tick noise_tick_ = 0;
    double noise_weight_ = 100000.0;
    Tick ambient_period_ = 2;
    double ambient_weight_ = 0.5;
};

// A playground with a commanded arm, an independently drifting object, and an
// inert wall. Proprioception reports every movement the tick after it occurs.
class PlaygroundEnv : public Environment {
public:
    PlaygroundEnv(const EnvSpec& spec, Rng rng) : rng_(rng) {
        detail::EnvParams p(spec.params);
        drifter_period_ = p.u64("drifter_period", 7);
        drifter_offset_ = rng_.uniform_index(static_cast<std::size_t>(drifter_period_));
        weight_ = p.real("sensor_weight", 4.0);
    }

    void apply(Tick, std::span<const ActuatorEvent> commands) override {
        arm_moved_ = false;
        for (const auto& cmd : commands)
            if (cmd.actuator == "arm" && cmd.command == "move") arm_moved_ = true;
        if (arm_moved_) ++arm_moves_;
    }

    std::vector<SensorReading> sense(Tick t) override {
        std::vector<SensorReading> out;
        if (arm_moved_)
            out.push_back({"proprio", Gist::make({Tag::tactile}, "moved:arm"), weight_});
        if (drifter_period_ > 0 && t % drifter_period_ == drifter_offset_) {
            out.push_back({"proprio", Gist::make({Tag::tactile}, "moved:drifter"), weight_});
            ++drifter_moves_;
        }
        return out;
    }

    double signal(const std::string& name) const override {
        if (name == "arm_moves") return static_cast<double>(arm_moves_);
        if (name == "drifter_moves") return static_cast<double>(drifter_moves_);
        return 0.0;
    }

private:
    Rng rng_;
    Tick drifter_period_ = 7;
    std::uint64_t drifter_offset_ = 0;
    double weight_ = 4.0;
    bool arm_moved_ = false;
    std::uint64_t arm_moves_ = 0, drifter_moves_ = 0;
};

inline std::unique_ptr<Environment> make_environment(const EnvSpec& spec, Rng rng) {
    if (spec.kind == "null") return std::make_unique<Environment>();
    if (spec.kind == "corridor") return std::make_unique<CorridorEnv>(spec);
    if (spec.kind == "frames") return std::make_unique<FrameStreamEnv>(spec);
    if (spec.kind == "night") return std::make_unique<NightEnv>(spec);
    if (spec.kind == "playground") return std::make_unique<PlaygroundEnv>(spec, rng);
    throw ParseError("env.kind: unknown environment '" + spec.kind + "'");
}

inline bool environment_known(const std::string& kind) {
    return kind == "null" || kind == "corridor" || kind == "frames" || kind == "night" ||
           kind == "playground";
}

} // namespace ctm
