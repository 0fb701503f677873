#include <catch2/catch_amalgamated.hpp>

#include "ctm/scenarios.hpp"

using namespace ctm;

namespace {

void require_scenario_passes(const ScenarioResult& res) {
    INFO(res.report());
    for (const auto& a : res.assertions) {
        INFO(a.name << ": observed " << a.observed << ", expected " << a.expected);
        CHECK(a.pass);
    }
    REQUIRE(res.passed());
}

double metric(const ScenarioResult& res, const std::string& key) {
    auto it = res.metrics.find(key);
    REQUIRE(it != res.metrics.end());
    return it->second;
}

} // namespace

TEST_CASE("blindsight: unconscious sight still guides the body") {
    auto res = run_blindsight();
    require_scenario_passes(res);
    REQUIRE(metric(res, "vision_broadcast_count") == 0.0);
    REQUIRE(metric(res, "fetch_success") == 1.0);
    REQUIRE(metric(res, "fetch_success_without_link") == 0.0);
    REQUIRE(metric(res, "vision_broadcasts_resubmitted") >= 1.0);
    REQUIRE(res.trace.events().size() > 0);
}

TEST_CASE("blindsight holds for other seeds") {
    require_scenario_passes(run_blindsight(12345));
    require_scenario_passes(run_blindsight(777));
}

TEST_CASE("inattentional blindness: the gorilla stays unseen at the predicted rate") {
    auto res = run_inattentional_blindness();
    require_scenario_passes(res);
    // nine competitors at 11x weight: the exact share is 1/100
    REQUIRE(metric(res, "oracle_gorilla_rate") == Catch::Approx(0.01).margin(1e-15));
    REQUIRE(metric(res, "zero_weight_rate") == 0.0);
    REQUIRE(metric(res, "equal_weight_rate") == Catch::Approx(0.1).margin(1e-12));
}

TEST_CASE("inattentional blindness rejects a negative ratio") {
    REQUIRE_THROWS_AS(run_inattentional_blindness(-2.0), std::invalid_argument);
}

TEST_CASE("change blindness: gist-stable churn is invisible, real change is not") {
    auto res = run_change_blindness();
    require_scenario_passes(res);
    REQUIRE(metric(res, "detections_gist_stable") == 0.0);
    REQUIRE(metric(res, "detections_scene_change") >= 1.0);
    REQUIRE(metric(res, "first_detection_tick") > 53.0); // change + pipeline depth
    REQUIRE(metric(res, "detections_identical_frames") == 0.0);
}

TEST_CASE("sleep and dream: gated senses, paralyzed body, creative dreams") {
    auto res = run_sleep_dream_cycle();
    require_scenario_passes(res);
    REQUIRE(metric(res, "sleep_nil_share") >= 0.95);
    REQUIRE(metric(res, "dream_creative_share") >= 0.80);
    REQUIRE(metric(res, "commands_while_asleep") == 0.0);
    REQUIRE(metric(res, "woke_by_noise_at") == 100.0);
    REQUIRE(metric(res, "ablation_sleep_ticks") == 0.0);
}

TEST_CASE("meditation: the mantra takes over and the chatter is hushed") {
    auto res = run_meditation();
    require_scenario_passes(res);
    REQUIRE(metric(res, "mmp_share_third_1") < metric(res, "mmp_share_third_3"));
    REQUIRE(metric(res, "other_g_final") < metric(res, "other_g_initial"));
    REQUIRE(metric(res, "ticks_to_settle_session_2") <
            metric(res, "ticks_to_settle_session_1"));
    REQUIRE(metric(res, "zero_weight_share") <= 1.0 / 8.0);
}

TEST_CASE("meditation rejects a too-short session") {
    REQUIRE_THROWS_AS(run_meditation(10), std::invalid_argument);
}

TEST_CASE("self-model: the arm is self, the drifter is not, the wall is unknown") {
    auto res = run_self_model();
    require_scenario_passes(res);
    REQUIRE(metric(res, "arm_is_self") == 1.0);
    REQUIRE(metric(res, "drifter_is_not_self") == 1.0);
    REQUIRE(metric(res, "arm_co_occurrences") >= 5.0);
    REQUIRE(metric(res, "wall_evidence") == 0.0);
    REQUIRE(metric(res, "ctm_tagged_conscious") == 1.0);
}

TEST_CASE("scenario registry runs every scenario by name") {
    REQUIRE(scenario_names().size() == 6);
    for (const auto& name : scenario_names()) {
        auto res = run_scenario(name, 7);
        INFO(res.report());
        REQUIRE(res.name == name);
        REQUIRE(res.passed());
    }
    REQUIRE_THROWS_AS(run_scenario("lucid-dreaming", 7), std::invalid_argument);
}

TEST_CASE("scenario reports carry metrics and a verdict line") {
    auto res = run_blindsight();
    auto text = res.report();
    REQUIRE(text.find("scenario blindsight") == 0);
    REQUIRE(text.find("metric fetch_success = 1") != std::string::npos);
    REQUIRE(text.find("result PASS") != std::string::npos);
    REQUIRE(text.find("assert pass") != std::string::npos);
}
