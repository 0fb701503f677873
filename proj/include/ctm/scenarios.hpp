#pragma once

// Consciousness phenomena as falsifiable experiments. Every scenario builds
// its machine from an ordinary configuration, computes its expected numbers
// at runtime (from the configured weights via the exact competition oracle —
// no magic constants in assertions), runs at least one control that flips the
// phenomenon, and reports metrics + assertions + the primary trace.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "machine.hpp"
#include "oracle.hpp"

namespace ctm {

struct ScenarioAssertion {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double expected = 0.0;
};

struct ScenarioResult {
    std::string name;
    std::uint64_t seed = 0;
    std::map<std::string, double> metrics;
    std::vector<ScenarioAssertion> assertions;
    Trace trace; // primary run

    bool passed() const {
        return std::all_of(assertions.begin(), assertions.end(),
                           [](const ScenarioAssertion& a) { return a.pass; });
    }

    void expect(const std::string& what, bool pass, double observed, double expected) {
        assertions.push_back({what, pass, observed, expected});
    }
    void expect_eq(const std::string& what, double observed, double expected,
                   double tol = 0.0) {
        expect(what, std::fabs(observed - expected) <= tol, observed, expected);
    }
    void expect_le(const std::string& what, double observed, double bound) {
        expect(what, observed <= bound, observed, bound);
    }
    void expect_ge(const std::string& what, double observed, double bound) {
        expect(what, observed >= bound, observed, bound);
    }
    void expect_lt(const std::string& what, double observed, double bound) {
        expect(what, observed < bound, observed, bound);
    }

    std::string report() const {
        std::string out = "scenario " + name + " seed=" + std::to_string(seed) + "\n";
        for (const auto& [k, v] : metrics) out += "metric " + k + " = " + format_real(v) + "\n";
        for (const auto& a : assertions)
            out += std::string("assert ") + (a.pass ? "pass" : "FAIL") + " " + a.name +
                   " (observed " + format_real(a.observed) + ", expected " +
                   format_real(a.expected) + ")\n";
        out += std::string("result ") + (passed() ? "PASS" : "FAIL") + "\n";
        return out;
    }
};

namespace detail {

inline ProcessorSpec behavior_spec(Address addr, const std::string& behavior,
                                   std::map<std::string, std::string> params = {},
                                   const std::string& specialty = "") {
    ProcessorSpec p;
    p.address = addr;
    p.specialty = specialty;
    p.behavior = behavior;
    p.params = std::move(params);
    return p;
}

inline ProcessorSpec chatter(Address addr, double weight, const std::string& payload,
                             std::map<std::string, std::string> extra = {}) {
    extra["payload"] = payload;
    extra["weight"] = format_real(weight);
    return behavior_spec(addr, "constant", std::move(extra), payload);
}

// winner address per install, keyed by the deciding competition's tick
inline std::map<Tick, Chunk> installs_by_cohort(const Trace& tr) {
    std::map<Tick, Chunk> out;
    for (const auto& ev : tr.events())
        if (ev.kind == EventKind::StmInstall) {
            Chunk c = ev.field_chunk("chunk");
            out[c.t] = c;
        }
    return out;
}

inline std::size_t count_broadcasts_from(const Trace& tr, Address addr) {
    std::size_t n = 0;
    for (const auto& ev : tr.events())
        if (ev.kind == EventKind::Broadcast && ev.field_chunk("chunk").address == addr) ++n;
    return n;
}

inline std::size_t count_broadcasts(const Trace& tr) {
    std::size_t n = 0;
    for (const auto& ev : tr.events())
        if (ev.kind == EventKind::Broadcast) ++n;
    return n;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Blindsight: vision that cannot compete for consciousness still guides the
// body over a direct link.

inline CtmConfig blindsight_config(std::uint64_t seed, bool linked, bool vision_submits) {
    CtmConfig cfg;
    cfg.n_processors = 4;
    cfg.lifetime = 60;
    cfg.seed = seed;
    cfg.roster.push_back(detail::behavior_spec(0, "vision",
                                               {{"weight", "8"},
                                                {"submit", vision_submits ? "1" : "0"},
                                                {"link_peer", "1"}},
                                               "eyes"));
    cfg.roster.push_back(detail::behavior_spec(1, "walk", {}, "legs"));
    cfg.roster.push_back(detail::chatter(2, 1.0, "hum"));
    cfg.roster.push_back(detail::chatter(3, 1.0, "murmur"));
    cfg.env.kind = "corridor";
    cfg.env.params["obstacles"] = "3,7";
    cfg.env.params["lookahead"] = "2";
    cfg.env.params["goal"] = "10";
    cfg.inputs.push_back({"eye", {0}});
    cfg.outputs.push_back({"legs", {1}});
    if (linked) cfg.preformed_links.emplace_back(0, 1);
    return cfg;
}

inline ScenarioResult run_blindsight(std::uint64_t seed = 7) {
    ScenarioResult res;
    res.name = "blindsight";
    res.seed = seed;

    Ctm ctm(blindsight_config(seed, true, false));
    ctm.run(ctm.config().lifetime);
    res.trace = ctm.trace();

    double vision_broadcasts =
        static_cast<double>(detail::count_broadcasts_from(res.trace, 0));
    double fetch = ctm.env().signal("fetch_success");
    double collided = ctm.env().signal("collided");
    std::size_t warnings = filter_events(res.trace, {{"kind", "LinkSend"}}).size();

    res.metrics["vision_broadcast_count"] = vision_broadcasts;
    res.metrics["fetch_success"] = fetch;
    res.metrics["collided"] = collided;
    res.metrics["position"] = ctm.env().signal("position");
    res.metrics["link_warnings"] = static_cast<double>(warnings);

    res.expect_eq("vision never enters consciousness", vision_broadcasts, 0.0);
    res.expect_eq("the errand still succeeds", fetch, 1.0);
    res.expect_eq("no collisions on the way", collided, 0.0);
    res.expect_ge("warnings travelled the link", static_cast<double>(warnings), 2.0);

    // control: cut the link and the adept behavior collapses
    Ctm cut(blindsight_config(seed, false, false));
    cut.run(cut.config().lifetime);
    res.metrics["fetch_success_without_link"] = cut.env().signal("fetch_success");
    res.expect_eq("without the link the errand fails",
                  cut.env().signal("fetch_success"), 0.0);
    res.expect_eq("without the link it collides", cut.env().signal("collided"), 1.0);

    // control: let vision compete again and it becomes conscious
    CtmConfig sighted_cfg = blindsight_config(seed, true, true);
    sighted_cfg.mode = Mode::deterministic; // weight 8 must beat the chatter
    Ctm sighted(sighted_cfg);
    sighted.run(sighted.config().lifetime);
    double sighted_broadcasts =
        static_cast<double>(detail::count_broadcasts_from(sighted.trace(), 0));
    res.metrics["vision_broadcasts_resubmitted"] = sighted_broadcasts;
    res.expect_ge("re-enabled vision becomes conscious", sighted_broadcasts, 1.0);

    return res;
}

// ---------------------------------------------------------------------------
// Inattentional blindness: the gorilla's gist is weighted so low that it
// almost never reaches consciousness; the exact share is the proportional-
// competition prediction, recomputed here from the weights.

inline CtmConfig inattentional_machine_config(double intensity_ratio, std::uint64_t seed) {
    const std::size_t n = 10, gorilla = 9;
    CtmConfig cfg;
    cfg.n_processors = n;
    cfg.lifetime = 2000;
    cfg.seed = seed;
    for (std::size_t i = 0; i < n - 1; ++i)
        cfg.roster.push_back(detail::chatter(static_cast<Address>(i), intensity_ratio,
                                             "white-shirt-pass", {{"tag", "vision"}}));
    cfg.roster.push_back(detail::chatter(static_cast<Address>(gorilla), 1.0, "gorilla",
                                         {{"tag", "vision"}}));
    return cfg;
}

inline ScenarioResult run_inattentional_blindness(double intensity_ratio = 11.0,
                                                  std::uint64_t seed = 7) {
    ScenarioResult res;
    res.name = "inattentional-blindness";
    res.seed = seed;
    if (!(intensity_ratio >= 0.0))
        throw std::invalid_argument("run_inattentional_blindness: ratio must be >= 0");

    const std::size_t n = 10, gorilla = 9;
    const double w_hi = intensity_ratio, w_lo = 1.0;

    // one competition profile: nine white-shirt gists and one gorilla
    std::vector<Chunk> profile;
    for (std::size_t i = 0; i < n - 1; ++i)
        profile.push_back(
            make_chunk(static_cast<Address>(i), 0,
                       Gist::make({Tag::vision}, "white-shirt-pass"), w_hi));
    profile.push_back(make_chunk(static_cast<Address>(gorilla), 0,
                                 Gist::make({Tag::vision}, "gorilla"), w_lo));

    CompetitionFunction f = CompetitionFunction::intensity();
    auto oracle = exact_win_probabilities(profile, f, 2, Mode::probabilistic);
    auto closed = closed_form_additive(profile, f, 2);
    double p_gorilla = oracle[gorilla];

    const std::uint64_t trials = 100000;
    auto mc = monte_carlo_win_frequencies(profile, f, 2, Mode::probabilistic, trials,
                                          Rng(seed));
    double mc_rate = mc[gorilla];
    double tol_mc = four_sigma_tolerance(p_gorilla, trials);

    res.metrics["oracle_gorilla_rate"] = p_gorilla;
    res.metrics["mc_gorilla_rate"] = mc_rate;
    res.metrics["mc_tolerance"] = tol_mc;
    res.metrics["oracle_vs_closed_form"] = max_abs_deviation(oracle, closed);

    res.expect_le("oracle matches the proportional closed form",
                  max_abs_deviation(oracle, closed), 1e-12);
    res.expect_le("gorilla stays below one percent of consciousness", p_gorilla, 0.01);
    res.expect_eq("sampled rate within Monte Carlo tolerance of the oracle", mc_rate,
                  p_gorilla, tol_mc);

    // whole-machine arm: the same weights inside a running machine
    CtmConfig cfg = inattentional_machine_config(intensity_ratio, seed);
    Ctm ctm(cfg);
    ctm.run(cfg.lifetime);
    res.trace = ctm.trace();
    double total = static_cast<double>(detail::count_broadcasts(res.trace));
    double g_wins = static_cast<double>(detail::count_broadcasts_from(res.trace, gorilla));
    double machine_rate = total > 0 ? g_wins / total : 0.0;
    double tol_machine = four_sigma_tolerance(p_gorilla, static_cast<std::uint64_t>(total));
    res.metrics["machine_gorilla_rate"] = machine_rate;
    res.metrics["machine_broadcasts"] = total;
    res.expect_eq("machine-level rate within sampling tolerance", machine_rate, p_gorilla,
                  tol_machine);

    // zero weight: the gorilla never wins at all
    std::vector<Chunk> zero = profile;
    zero[gorilla] = make_chunk(static_cast<Address>(gorilla), 0,
                               Gist::make({Tag::vision}, "gorilla"), 0.0);
    auto mc_zero = monte_carlo_win_frequencies(zero, f, 2, Mode::probabilistic, trials,
                                               Rng(seed + 1));
    res.metrics["zero_weight_rate"] = mc_zero[gorilla];
    res.expect_eq("zero weight never wins", mc_zero[gorilla], 0.0);

    // equal weights: the gorilla is just another processor, rate 1/N
    std::vector<Chunk> equal;
    for (std::size_t i = 0; i < n; ++i)
        equal.push_back(make_chunk(static_cast<Address>(i), 0,
                                   Gist::make({Tag::vision}, "anything"), w_hi));
    auto eq_oracle = exact_win_probabilities(equal, f, 2, Mode::probabilistic);
    res.metrics["equal_weight_rate"] = eq_oracle[gorilla];
    res.expect_eq("equal weights give a uniform share", eq_oracle[gorilla],
                  1.0 / static_cast<double>(n), 1e-12);

    return res;
}

// ---------------------------------------------------------------------------
// Change blindness: surface details churn but the scene-level gist is stable,
// so the change detector has nothing to report; move the scene itself and the
// alarm fires (after the broadcast pipeline delay).

inline CtmConfig change_blindness_config(std::uint64_t seed, Tick change_tick,
                                         Tick detail_period) {
    CtmConfig cfg;
    cfg.n_processors = 4;
    cfg.lifetime = 200;
    cfg.seed = seed;
    cfg.roster.push_back(detail::behavior_spec(0, "scene", {{"weight", "2"}}, "scene-gist"));
    cfg.roster.push_back(detail::behavior_spec(1, "change_detector", {{"weight", "50"}}));
    cfg.roster.push_back(detail::chatter(2, 1.0, "hum"));
    cfg.env.kind = "frames";
    cfg.env.params["scene"] = "parlor";
    cfg.env.params["changed_scene"] = "garden";
    cfg.env.params["change_tick"] = std::to_string(change_tick);
    cfg.env.params["detail_period"] = std::to_string(detail_period);
    cfg.inputs.push_back({"frame", {0}});
    return cfg;
}

inline ScenarioResult run_change_blindness(std::uint64_t seed = 7) {
    ScenarioResult res;
    res.name = "change-blindness";
    res.seed = seed;

    auto detections = [](const Trace& tr) {
        std::vector<Tick> out;
        for (const auto& ev : tr.events())
            if (ev.kind == EventKind::Broadcast &&
                ev.field_chunk("chunk").gist.payload() == "scene-changed")
                out.push_back(ev.tick);
        return out;
    };

    // primary: details swapped every 4 ticks, scene gist constant
    Ctm stable(change_blindness_config(seed, 0, 4));
    stable.run(stable.config().lifetime);
    res.trace = stable.trace();
    auto stable_hits = detections(res.trace);
    res.metrics["detections_gist_stable"] = static_cast<double>(stable_hits.size());
    res.expect_eq("detail churn goes unnoticed",
                  static_cast<double>(stable_hits.size()), 0.0);
    // the details really were churning at the sensor
    std::size_t distinct_frames = 0;
    {
        std::vector<std::string> seen;
        for (const auto& ev : filter_events(stable.trace(), {{"kind", "InputDelivery"}})) {
            auto payload = ev.field_chunk("chunk").gist.payload();
            if (std::find(seen.begin(), seen.end(), payload) == seen.end())
                seen.push_back(payload);
        }
        distinct_frames = seen.size();
    }
    res.metrics["distinct_frames_seen"] = static_cast<double>(distinct_frames);
    res.expect_ge("frames really differed", static_cast<double>(distinct_frames), 2.0);

    // control: the scene itself changes at tick 50
    Ctm control(change_blindness_config(seed, 50, 4));
    control.run(control.config().lifetime);
    auto control_hits = detections(control.trace());
    double earliest_possible =
        static_cast<double>(50 + control.height() + 1); // change must first be broadcast
    res.metrics["detections_scene_change"] = static_cast<double>(control_hits.size());
    res.expect_ge("a real scene change is detected",
                  static_cast<double>(control_hits.size()), 1.0);
    if (!control_hits.empty()) {
        res.metrics["first_detection_tick"] = static_cast<double>(control_hits.front());
        res.expect(
            "detection follows the broadcast pipeline delay",
            static_cast<double>(control_hits.front()) > earliest_possible,
            static_cast<double>(control_hits.front()), earliest_possible);
    }

    // control: perfectly identical frames
    Ctm identical(change_blindness_config(seed, 0, 0));
    identical.run(identical.config().lifetime);
    res.metrics["detections_identical_frames"] =
        static_cast<double>(detections(identical.trace()).size());
    res.expect_eq("identical frames are uneventful",
                  res.metrics["detections_identical_frames"], 0.0);

    return res;
}

// ---------------------------------------------------------------------------
// Sleep / dream cycle.

inline CtmConfig sleep_config(std::uint64_t seed, bool with_sleep, Tick noise_tick) {
    CtmConfig cfg;
    cfg.n_processors = 8;
    cfg.lifetime = 400;
    cfg.seed = seed;
    if (with_sleep)
        cfg.roster.push_back(detail::behavior_spec(0, "sleep",
                                                   {{"awake_ticks", "60"},
                                                    {"sleep_ticks", "100"},
                                                    {"dream_ticks", "25"},
                                                    {"weight", "10000"},
                                                    {"gate_weight", "1000"},
                                                    {"notify", "1,2"}},
                                                   "sleep-governor"));
    else
        cfg.roster.push_back(detail::behavior_spec(0, "idle"));
    cfg.roster.push_back(detail::behavior_spec(1, "dream_creator", {{"weight", "100"}}));
    cfg.roster.push_back(detail::behavior_spec(2, "change_detector", {{"weight", "50"}}));
    cfg.roster.push_back(detail::behavior_spec(3, "inner", {{"weight", "40"}}));
    cfg.roster.push_back(detail::behavior_spec(4, "walk", {{"actuator", "hand"}}));
    cfg.roster.push_back(detail::chatter(
        5, 2.0, "birdsong", {{"tag", "vision"}, {"flag", "surprising"}}));
    cfg.roster.push_back(detail::chatter(6, 1.0, "breath"));
    cfg.roster.push_back(detail::chatter(7, 1.0, "heartbeat"));
    cfg.env.kind = "night";
    cfg.env.params["noise_tick"] = std::to_string(noise_tick);
    cfg.inputs.push_back({"ear", {0, 3}});
    cfg.outputs.push_back({"hand", {4}});
    if (with_sleep) {
        cfg.preformed_links.emplace_back(0, 1);
        cfg.preformed_links.emplace_back(0, 2);
    }
    return cfg;
}

namespace detail {

struct SleepRun {
    std::vector<int> pre_phase;  // phase while the tick's inputs were gated
    std::vector<int> post_phase; // phase that produced the tick's submissions
    Trace trace;
    Tick woke_by_noise_at = 0;
    // per-phase tallies over deciding cohorts
    std::map<int, std::size_t> cohort_ticks;
    std::map<int, std::size_t> nil_installs;
    std::map<int, std::map<Address, std::size_t>> wins;
};

inline SleepRun run_sleep_machine(const CtmConfig& cfg) {
    Ctm ctm(cfg);
    auto* sleep = dynamic_cast<SleepBehavior*>(ctm.behavior(0));
    SleepRun out;
    for (Tick t = 0; t < cfg.lifetime; ++t) {
        out.pre_phase.push_back(sleep ? static_cast<int>(sleep->phase()) : 0);
        ctm.tick();
        out.post_phase.push_back(sleep ? static_cast<int>(sleep->phase()) : 0);
    }
    out.trace = ctm.trace();
    out.woke_by_noise_at = sleep ? sleep->woke_by_noise_at() : 0;
    for (const auto& [cohort, chunk] : installs_by_cohort(out.trace)) {
        int phase = out.post_phase[cohort];
        out.cohort_ticks[phase] += 1;
        if (chunk.gist.is_nil()) out.nil_installs[phase] += 1;
        out.wins[phase][chunk.address] += 1;
    }
    return out;
}

} // namespace detail

inline ScenarioResult run_sleep_dream_cycle(std::uint64_t seed = 7) {
    ScenarioResult res;
    res.name = "sleep-dream-cycle";
    res.seed = seed;

    constexpr int kAwake = static_cast<int>(SleepBehavior::Phase::awake);
    constexpr int kAsleep = static_cast<int>(SleepBehavior::Phase::asleep);
    constexpr int kDreaming = static_cast<int>(SleepBehavior::Phase::dreaming);

    auto nil_share = [&](const detail::SleepRun& r) {
        auto ticks = r.cohort_ticks.count(kAsleep) ? r.cohort_ticks.at(kAsleep) : 0;
        if (ticks == 0) return 0.0;
        auto nils = r.nil_installs.count(kAsleep) ? r.nil_installs.at(kAsleep) : 0;
        return static_cast<double>(nils) / static_cast<double>(ticks);
    };
    auto dream_share = [&](const detail::SleepRun& r) {
        auto it = r.wins.find(kDreaming);
        if (it == r.wins.end()) return 0.0;
        std::size_t total = 0, creative = 0;
        for (const auto& [addr, n] : it->second) {
            total += n;
            if (addr == 1 || addr == 3) creative += n; // dream creator + inner speech
        }
        return total ? static_cast<double>(creative) / static_cast<double>(total) : 0.0;
    };
    auto gated_inputs = [&](const detail::SleepRun& r) {
        std::size_t n = 0;
        for (const auto& ev : filter_events(r.trace, {{"kind", "InputDelivery"}}))
            if (r.pre_phase[ev.tick] != kAwake &&
                ev.field_chunk("chunk").gist.payload() != "loud-noise")
                ++n;
        return n;
    };
    auto gated_commands = [&](const detail::SleepRun& r) {
        std::size_t n = 0;
        for (const auto& ev : filter_events(r.trace, {{"kind", "ActuatorCommand"}}))
            if (r.pre_phase[ev.tick] != kAwake) ++n;
        return n;
    };
    auto phase_order_ok = [&](const detail::SleepRun& r) {
        // awake -> asleep -> dreaming -> awake, each boundary in order
        const auto& p = r.post_phase;
        auto first_sleep = std::find(p.begin(), p.end(), kAsleep);
        auto first_dream = std::find(first_sleep, p.end(), kDreaming);
        auto wake_again = std::find(first_dream, p.end(), kAwake);
        return p.front() == kAwake && first_sleep != p.end() && first_dream != p.end() &&
               wake_again != p.end();
    };

    auto primary = detail::run_sleep_machine(sleep_config(seed, true, 0));
    res.trace = primary.trace;
    res.metrics["sleep_nil_share"] = nil_share(primary);
    res.metrics["dream_creative_share"] = dream_share(primary);
    res.metrics["inputs_delivered_asleep"] = static_cast<double>(gated_inputs(primary));
    res.metrics["commands_while_asleep"] = static_cast<double>(gated_commands(primary));
    res.metrics["awake_command_ticks"] = static_cast<double>(
        filter_events(primary.trace, {{"kind", "ActuatorCommand"}}).size());

    res.expect("phases run awake, asleep, dreaming, awake", phase_order_ok(primary), 1.0,
               1.0);
    res.expect_ge("asleep consciousness is NIL", nil_share(primary), 0.95);
    res.expect_ge("dreams come from the dream creator and inner speech",
                  dream_share(primary), 0.80);
    res.expect_eq("routine inputs are gated while asleep",
                  static_cast<double>(gated_inputs(primary)), 0.0);
    res.expect_eq("the body is paralyzed while asleep",
                  static_cast<double>(gated_commands(primary)), 0.0);
    res.expect_ge("the hand works while awake", res.metrics["awake_command_ticks"], 1.0);

    // the same assertions over a 20-seed sweep
    std::size_t seeds_ok = 0;
    const std::size_t sweep = 20;
    for (std::uint64_t s = 0; s < sweep; ++s) {
        auto r = detail::run_sleep_machine(sleep_config(seed + 1 + s, true, 0));
        if (phase_order_ok(r) && nil_share(r) >= 0.95 && dream_share(r) >= 0.80 &&
            gated_inputs(r) == 0 && gated_commands(r) == 0)
            ++seeds_ok;
    }
    res.metrics["seed_sweep_passes"] = static_cast<double>(seeds_ok);
    res.expect_eq("every seed in the sweep shows the same cycle",
                  static_cast<double>(seeds_ok), static_cast<double>(sweep));

    // loud noise wakes the sleeper early
    auto noisy = detail::run_sleep_machine(sleep_config(seed, true, 100));
    res.metrics["woke_by_noise_at"] = static_cast<double>(noisy.woke_by_noise_at);
    res.expect_eq("a loud noise wakes the machine at once",
                  static_cast<double>(noisy.woke_by_noise_at), 100.0);
    res.expect("the noise itself was delivered through the gate",
               !filter_events(noisy.trace, {{"kind", "InputDelivery"}, {"tick", "100"}})
                    .empty(),
               1.0, 1.0);

    // ablation: no sleep processor, no sleep phase
    auto awake_only = detail::run_sleep_machine(sleep_config(seed, false, 0));
    bool never_sleeps =
        std::all_of(awake_only.post_phase.begin(), awake_only.post_phase.end(),
                    [&](int p) { return p == kAwake; });
    res.metrics["ablation_sleep_ticks"] =
        static_cast<double>(std::count_if(awake_only.post_phase.begin(),
                                          awake_only.post_phase.end(),
                                          [&](int p) { return p != kAwake; }));
    res.expect("without the sleep processor the machine never sleeps", never_sleeps, 1.0,
               1.0);

    return res;
}

// ---------------------------------------------------------------------------
// Meditation: the mantra hushes everyone else, and the mantra's share of
// consciousness grows as the competition fades.

inline CtmConfig meditation_config(std::uint64_t seed, const std::string& sessions,
                                   double mmp_weight, Tick lifetime) {
    CtmConfig cfg;
    cfg.n_processors = 8;
    cfg.lifetime = lifetime;
    cfg.seed = seed;
    cfg.roster.push_back(detail::behavior_spec(
        0, "mmp", {{"sessions", sessions}, {"weight", format_real(mmp_weight)}},
        "meditation"));
    static const char* noises[] = {"todo-list", "itch", "lunch", "email", "song", "worry"};
    for (Address a = 1; a <= 6; ++a) cfg.roster.push_back(detail::chatter(a, 1.0, noises[a - 1]));
    cfg.roster.push_back(detail::behavior_spec(7, "idle"));
    return cfg;
}

inline ScenarioResult run_meditation(Tick session_ticks = 300, std::uint64_t seed = 7) {
    ScenarioResult res;
    res.name = "meditation";
    res.seed = seed;
    if (session_ticks < 30)
        throw std::invalid_argument("run_meditation: session must be at least 30 ticks");

    const Tick s1 = 20, e1 = s1 + session_ticks;
    auto mmp_wins_in = [](const Trace& tr, Tick begin, Tick end) {
        std::size_t wins = 0, total = 0;
        for (const auto& [cohort, chunk] : detail::installs_by_cohort(tr)) {
            if (cohort < begin || cohort >= end) continue;
            ++total;
            if (chunk.address == 0) ++wins;
        }
        return std::pair<std::size_t, std::size_t>(wins, total);
    };
    auto share = [&](const Trace& tr, Tick begin, Tick end) {
        auto [w, n] = mmp_wins_in(tr, begin, end);
        return n ? static_cast<double>(w) / static_cast<double>(n) : 0.0;
    };

    // primary session
    {
        CtmConfig cfg = meditation_config(seed, std::to_string(s1) + "-" + std::to_string(e1),
                                          3.0, e1 + 30);
        Ctm ctm(cfg);
        ctm.run(s1);
        double g0 = 0.0;
        for (Address a = 1; a <= 6; ++a) g0 += ctm.processor(a).g;
        g0 /= 6.0;
        ctm.run(cfg.lifetime);
        res.trace = ctm.trace();
        double g1 = 0.0, g_min = 1e300;
        for (Address a = 1; a <= 6; ++a) {
            g1 += ctm.processor(a).g;
            g_min = std::min(g_min, ctm.processor(a).g);
        }
        g1 /= 6.0;

        Tick third = session_ticks / 3;
        double sh1 = share(res.trace, s1, s1 + third);
        double sh2 = share(res.trace, s1 + third, s1 + 2 * third);
        double sh3 = share(res.trace, s1 + 2 * third, e1);
        res.metrics["mmp_share_third_1"] = sh1;
        res.metrics["mmp_share_third_2"] = sh2;
        res.metrics["mmp_share_third_3"] = sh3;
        res.metrics["other_g_initial"] = g0;
        res.metrics["other_g_final"] = g1;
        res.metrics["other_g_min"] = g_min;
        res.metrics["hushes_applied"] = static_cast<double>(
            filter_events(res.trace, {{"kind", "FeedbackApplied"}, {"reason", "hush-command"}})
                .size());

        res.expect("the mantra's share grows across session thirds",
                   sh1 < sh2 && sh2 < sh3, sh1 < sh2 && sh2 < sh3 ? 1.0 : 0.0, 1.0);
        res.expect_lt("other processors end the session quieter", g1, g0);
        res.expect_le("at least one competitor was halved", g_min, 0.5);
        res.expect_ge("hush feedback was actually applied", res.metrics["hushes_applied"],
                      6.0);
    }

    // practice effect: the second of two sessions settles faster
    {
        const Tick s2 = e1 + 100, e2 = s2 + session_ticks;
        std::string sessions = std::to_string(s1) + "-" + std::to_string(e1) + ", " +
                               std::to_string(s2) + "-" + std::to_string(e2);
        CtmConfig cfg = meditation_config(seed, sessions, 3.0, e2 + 30);
        Ctm ctm(cfg);
        ctm.run(cfg.lifetime);
        auto settle = [&](Tick begin, Tick end) {
            // cohorts until the mantra has won 10 competitions in-session
            std::size_t wins = 0;
            for (const auto& [cohort, chunk] : detail::installs_by_cohort(ctm.trace())) {
                if (cohort < begin || cohort >= end || chunk.address != 0) continue;
                if (++wins == 10) return static_cast<double>(cohort - begin + 1);
            }
            return static_cast<double>(end - begin);
        };
        double settle1 = settle(s1, e1), settle2 = settle(s2, e2);
        res.metrics["ticks_to_settle_session_1"] = settle1;
        res.metrics["ticks_to_settle_session_2"] = settle2;
        res.expect_lt("practice: the second session settles faster", settle2, settle1);
    }

    // ablation: a weightless mantra changes nothing
    {
        CtmConfig cfg = meditation_config(seed, std::to_string(s1) + "-" + std::to_string(e1),
                                          0.0, e1 + 30);
        Ctm ctm(cfg);
        ctm.run(cfg.lifetime);
        double sh = share(ctm.trace(), s1, e1);
        double g_sum = 0.0;
        for (Address a = 1; a <= 6; ++a) g_sum += ctm.processor(a).g;
        res.metrics["zero_weight_share"] = sh;
        res.expect_le("a weightless mantra never rises above baseline", sh,
                      1.0 / static_cast<double>(cfg.n_processors));
        res.expect_eq("and nobody gets hushed", g_sum, 6.0);
    }

    return res;
}

// ---------------------------------------------------------------------------
// The self-model: thought-then-movement correlation tags the arm as self; the
// drifting object never correlates and is tagged not-self.

inline CtmConfig self_model_config(std::uint64_t seed, bool motor_active) {
    CtmConfig cfg;
    cfg.n_processors = 8;
    cfg.lifetime = 300;
    cfg.seed = seed;
    cfg.roster.push_back(detail::behavior_spec(
        0, motor_active ? "motor" : "idle",
        motor_active
            ? std::map<std::string, std::string>{{"period", "8"}, {"weight", "20"}, {"entity", "arm"}}
            : std::map<std::string, std::string>{},
        "motor-cortex"));
    cfg.roster.push_back(detail::behavior_spec(1, "world_model",
                                               {{"entities", "arm,drifter,wall"},
                                                {"self_threshold", "5"},
                                                {"window", "2"},
                                                {"report_weight", "25"}},
                                               "model-of-the-world"));
    cfg.roster.push_back(detail::chatter(2, 1.0, "hum"));
    cfg.roster.push_back(detail::chatter(3, 1.0, "murmur"));
    cfg.env.kind = "playground";
    cfg.env.params["drifter_period"] = "7";
    cfg.inputs.push_back({"proprio", {1}});
    cfg.outputs.push_back({"arm", {0}});
    return cfg;
}

inline ScenarioResult run_self_model(std::uint64_t seed = 7) {
    ScenarioResult res;
    res.name = "self-model";
    res.seed = seed;

    Ctm ctm(self_model_config(seed, true));
    ctm.run(ctm.config().lifetime);
    res.trace = ctm.trace();
    auto* wm = dynamic_cast<WorldModelBehavior*>(ctm.behavior(1));

    auto tag = [&](const std::string& e) { return wm->tag_of(e); };
    const auto& arm = wm->entries().at("arm");
    const auto& drifter = wm->entries().at("drifter");
    const auto& wall = wm->entries().at("wall");

    res.metrics["arm_co_occurrences"] = static_cast<double>(arm.co);
    res.metrics["arm_uncorrelated_moves"] = static_cast<double>(arm.non);
    res.metrics["drifter_uncorrelated_moves"] = static_cast<double>(drifter.non);
    res.metrics["drifter_co_occurrences"] = static_cast<double>(drifter.co);
    res.metrics["wall_evidence"] = static_cast<double>(wall.co + wall.non);
    res.metrics["arm_is_self"] = tag("arm") == WorldModelBehavior::EntityTag::self;
    res.metrics["drifter_is_not_self"] =
        tag("drifter") == WorldModelBehavior::EntityTag::not_self;
    res.metrics["ctm_tagged_conscious"] = wm->ctm_tagged_conscious() ? 1.0 : 0.0;

    res.expect("the wired arm is tagged self",
               tag("arm") == WorldModelBehavior::EntityTag::self, 1.0, 1.0);
    res.expect_ge("with at least threshold co-occurrences",
                  static_cast<double>(arm.co), 5.0);
    res.expect("the drifting object is tagged not-self",
               tag("drifter") == WorldModelBehavior::EntityTag::not_self, 1.0, 1.0);
    res.expect_ge("after repeated uncorrelated movement",
                  static_cast<double>(drifter.non), 5.0);
    res.expect("the inert wall stays unknown",
               tag("wall") == WorldModelBehavior::EntityTag::unknown, 1.0, 1.0);
    res.expect_eq("with zero evidence either way",
                  static_cast<double>(wall.co + wall.non), 0.0);
    res.expect("the self discovery itself became conscious", wm->ctm_tagged_conscious(),
               1.0, 1.0);

    double self_reports = 0;
    for (const auto& ev : res.trace.events())
        if (ev.kind == EventKind::Broadcast &&
            ev.field_chunk("chunk").gist.payload().find("#self-model") != std::string::npos)
            ++self_reports;
    res.metrics["self_model_broadcasts"] = self_reports;
    res.expect_ge("the discovery was broadcast", self_reports, 1.0);

    // ablation: without the motor there is no thought-action correlation
    Ctm still(self_model_config(seed, false));
    still.run(still.config().lifetime);
    auto* wm2 = dynamic_cast<WorldModelBehavior*>(still.behavior(1));
    res.metrics["ablation_arm_evidence"] = static_cast<double>(
        wm2->entries().at("arm").co + wm2->entries().at("arm").non);
    res.expect("without the motor the arm stays unknown",
               wm2->tag_of("arm") == WorldModelBehavior::EntityTag::unknown, 1.0, 1.0);
    res.expect("the drifter is still not-self",
               wm2->tag_of("drifter") == WorldModelBehavior::EntityTag::not_self, 1.0, 1.0);

    return res;
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{
        "blindsight",       "inattentional-blindness", "change-blindness",
        "sleep-dream-cycle", "meditation",             "self-model"};
    return names;
}

inline ScenarioResult run_scenario(const std::string& name, std::uint64_t seed) {
    if (name == "blindsight") return run_blindsight(seed);
    if (name == "inattentional-blindness") return run_inattentional_blindness(11.0, seed);
    if (name == "change-blindness") return run_change_blindness(seed);
    if (name == "sleep-dream-cycle") return run_sleep_dream_cycle(seed);
    if (name == "meditation") return run_meditation(300, seed);
    if (name == "self-model") return run_self_model(seed);
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

// The primary arm's machine configuration (the roster the scenario is built
// on, controls excluded) — written next to the trace so a run is inspectable.
inline CtmConfig scenario_primary_config(const std::string& name, std::uint64_t seed) {
    if (name == "blindsight") return blindsight_config(seed, true, false);
    if (name == "inattentional-blindness") return inattentional_machine_config(11.0, seed);
    if (name == "change-blindness") return change_blindness_config(seed, 0, 4);
    if (name == "sleep-dream-cycle") return sleep_config(seed, true, 0);
    if (name == "meditation") {
        const Tick s1 = 20, e1 = s1 + 300;
        return meditation_config(seed, std::to_string(s1) + "-" + std::to_string(e1), 3.0,
                                 e1 + 30);
    }
    if (name == "self-model") return self_model_config(seed, true);
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

} // namespace ctm
