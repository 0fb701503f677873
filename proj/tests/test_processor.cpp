#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "ctm/behaviors.hpp"
#include "ctm/processor.hpp"

using namespace ctm;

namespace {

Chunk mk(Address addr, Tick t, double w, const std::string& payload = "x",
         bool surprising = false) {
    Gist g = surprising ? Gist::make({Tag::speech}, payload, {Flag::surprising})
                        : Gist::make({Tag::speech}, payload);
    return make_chunk(addr, t, g, w);
}

} // namespace

TEST_CASE("weight adaptation follows the doubling rule") {
    SeaParams sea; // c_sea = 2, clamp 2^±20

    CHECK(sea_update(1.0, {Verdict::embolden, 0, ""}, sea) == 2.0);
    CHECK(sea_update(4.0, {Verdict::hush, 0, ""}, sea) == 2.0);

    SECTION("clamped at both ends") {
        CHECK(sea_update(sea.g_max(), {Verdict::embolden, 0, ""}, sea) == sea.g_max());
        CHECK(sea_update(sea.g_min(), {Verdict::hush, 0, ""}, sea) == sea.g_min());
    }
    SECTION("bad arguments rejected") {
        CHECK_THROWS_AS(sea_update(0.0, {Verdict::embolden, 0, ""}, sea), std::invalid_argument);
        CHECK_THROWS_AS(sea_update(-1.0, {Verdict::hush, 0, ""}, sea), std::invalid_argument);
        SeaParams flat{1.0, 20};
        CHECK_THROWS_AS(sea_update(1.0, {Verdict::embolden, 0, ""}, flat), std::invalid_argument);
    }
}

TEST_CASE("weight-giving power stays a power of c_sea within the clamp") {
    SeaParams sea;
    Rng rng(41);
    double g = 1.0;
    for (int i = 0; i < 400; ++i) {
        Verdict v = rng.uniform01() < 0.5 ? Verdict::embolden : Verdict::hush;
        g = sea_update(g, {v, 0, ""}, sea);
        double k = std::log2(g);
        CHECK(std::abs(k - std::round(k)) < 1e-9);
        CHECK(g >= sea.g_min());
        CHECK(g <= sea.g_max());
    }
}

TEST_CASE("doubling reaches a 2^m target within factor c_sea in at most m+1 steps") {
    SeaParams sea;
    for (int m = 1; m <= 6; ++m) {
        double target = std::pow(2.0, m);
        double g = 1.0;
        int steps = 0;
        while (std::max(g, target) / std::min(g, target) > sea.c_sea && steps <= m + 1) {
            g = sea_update(g, {Verdict::embolden, 0, ""}, sea);
            ++steps;
        }
        INFO("m=" << m);
        CHECK(steps <= m + 1);
        CHECK(std::max(g, target) / std::min(g, target) <= sea.c_sea);
    }
}

TEST_CASE("links form at the acknowledgement threshold and strengthen after") {
    Processor a(0, "asker", 64), b(1, "responder", 64);
    const std::uint32_t threshold = 3;

    CHECK_FALSE(acknowledge_useful(a, b, threshold));
    CHECK_FALSE(acknowledge_useful(a, b, threshold));
    CHECK_FALSE(link_formed(a, 1));
    CHECK_FALSE(link_formed(b, 0));

    CHECK(acknowledge_useful(a, b, threshold)); // third ack forms it
    CHECK(link_formed(a, 1));
    CHECK(link_formed(b, 0)); // bidirectional

    SECTION("subsequent acks strengthen both sides equally") {
        CHECK_FALSE(acknowledge_useful(a, b, threshold));
        CHECK(a.links[1].strength == 1);
        CHECK(b.links[0].strength == 1);
        acknowledge_useful(a, b, threshold);
        CHECK(a.links[1].strength == 2);
        CHECK(b.links[0].strength == 2);
    }
    SECTION("self-acknowledgement is rejected") {
        CHECK_THROWS_AS(acknowledge_useful(a, a, threshold), std::invalid_argument);
    }
}

TEST_CASE("submissions carry g times the base weight and are remembered") {
    Processor p(3, "motor", 64);
    p.g = 4.0;
    Chunk c = make_submission(p, {Gist::make({Tag::command}, "go"), 2.0}, 7);
    CHECK(c.address == 3);
    CHECK(c.t == 7);
    CHECK(c.weight == 8.0);
    REQUIRE(p.memory.size() == 1);
    CHECK(p.memory.records()[0].kind == MemoryKind::submitted);
    CHECK(p.memory.records()[0].tick == 7);
}

TEST_CASE("memory pruning keeps flagged records beyond the recency window") {
    MemoryStore store(64, 32);
    std::vector<Tick> flagged{10, 20, 30, 40, 50};
    for (Tick t = 0; t < 100; ++t) {
        bool flag = std::find(flagged.begin(), flagged.end(), t) != flagged.end();
        store.add({t, MemoryKind::submitted, mk(0, t, 1.0, "e" + std::to_string(t), flag)});
    }
    CHECK(store.size() <= store.capacity());
    for (Tick t : flagged) {
        bool present = false;
        for (const auto& r : store.records())
            if (r.tick == t) present = true;
        INFO("flagged tick " << t);
        CHECK(present);
    }
    // nothing unflagged and stale survives once pruning has bitten
    for (const auto& r : store.records())
        if (!r.chunk.gist.salient()) CHECK(r.tick >= 61);
}

TEST_CASE("memory pruning admits the top decile of |weight| regardless of age") {
    MemoryStore store(64, 32);
    for (Tick t = 0; t < 100; ++t) {
        double w = (t == 3 || t == 40) ? 5.0 : 0.1; // two heavy records, one very old
        store.add({t, MemoryKind::broadcast_received, mk(1, t, w)});
    }
    bool heavy_old_retained = false;
    for (const auto& r : store.records())
        if (r.tick == 3 && r.chunk.weight == 5.0) heavy_old_retained = true;
    CHECK(heavy_old_retained);
}

TEST_CASE("with equal unflagged weights only recent records survive pruning") {
    MemoryStore store(64, 32);
    for (Tick t = 0; t <= 64; ++t) store.add({t, MemoryKind::input_received, mk(2, t, 1.0)});
    // the 65th record crossed capacity and forced a prune at tick 64
    CHECK(store.size() == 32);
    for (const auto& r : store.records()) CHECK(r.tick >= 33);
}

TEST_CASE("memory under capacity is never pruned") {
    MemoryStore store(64, 32);
    for (Tick t = 0; t < 50; ++t) store.add({t, MemoryKind::submitted, mk(0, t, 1.0)});
    CHECK(store.size() == 50);
    CHECK(store.prune() == 50);
    CHECK(store.size() == 50);
}

TEST_CASE("the high-level story is the time-ordered gist projection") {
    Processor p(0, "", 64);
    p.memory.add({2, MemoryKind::submitted, mk(0, 2, 1.0, "woke")});
    p.memory.add({4, MemoryKind::broadcast_received, mk(1, 3, 1.0, "saw-cat")});
    p.memory.add({6, MemoryKind::submitted, mk(0, 6, 1.0, "ran")});

    auto all = p.memory.story(0, 10);
    REQUIRE(all.size() == 3);
    CHECK(all[0].payload() == "woke");
    CHECK(all[1].payload() == "saw-cat");
    CHECK(all[2].payload() == "ran");

    CHECK(p.memory.story(3, 5).size() == 1);
    CHECK(p.memory.story(5, 5).empty());
    CHECK(p.memory.story(7, 100).empty());
}

TEST_CASE("pruned records drop out of the story") {
    MemoryStore store(64, 32);
    for (Tick t = 0; t < 100; ++t) store.add({t, MemoryKind::submitted, mk(0, t, 1.0)});
    CHECK(store.story(0, 40).empty()); // early unflagged records were pruned
    CHECK_FALSE(store.story(90, 100).empty());
}

TEST_CASE("payload reference convention") {
    Tick ref = 0;
    CHECK(payload_ref_tick("Tatiana#ref=12", ref));
    CHECK(ref == 12);
    CHECK(payload_ref_tick("#ref=007", ref));
    CHECK(ref == 7);
    CHECK_FALSE(payload_ref_tick("Tatiana", ref));
    CHECK_FALSE(payload_ref_tick("#ref=", ref));
    CHECK_FALSE(payload_ref_tick("#ref=x9", ref));
}

namespace {

// two-processor fixture: p submits, rival's chunks win or reference later
struct FeedbackFixture {
    Processor p{0, "expert", 64};
    std::uint32_t height = 1;

    void submit(Tick t, double w) { (void)make_submission(p, {Gist::make({Tag::speech}, "mine"), w}, t); }
    void broadcast(Tick at, const Chunk& c) {
        p.memory.add({at, MemoryKind::broadcast_received, c});
    }
    std::vector<Feedback> feedback(Tick b, Tick e) {
        return generate_feedback(p, b, e, height,
                                 [](const Chunk& c) { return std::fabs(c.weight); });
    }
};

} // namespace

TEST_CASE("losing with more valuable information emboldens") {
    FeedbackFixture fx;
    fx.submit(5, 10.0);
    fx.broadcast(7, mk(1, 5, 4.0, "rival")); // rival won competition 5
    auto fbs = fx.feedback(0, 10);
    REQUIRE(fbs.size() == 1);
    CHECK(fbs[0].verdict == Verdict::embolden);
    CHECK(fbs[0].ref_tick == 5);
    CHECK(fbs[0].reason == "lost-with-higher-value");
}

TEST_CASE("winning while a higher value surfaces later hushes") {
    FeedbackFixture fx;
    fx.submit(5, 1.0);
    fx.broadcast(7, mk(0, 5, 1.0, "mine")); // own win echoed back
    fx.broadcast(9, mk(2, 7, 7.0, "better#ref=5"));
    auto fbs = fx.feedback(0, 10);
    REQUIRE(fbs.size() == 1);
    CHECK(fbs[0].verdict == Verdict::hush);
    CHECK(fbs[0].ref_tick == 5);
    CHECK(fbs[0].reason == "higher-value-surfaced");
}

TEST_CASE("winning with nothing better surfacing yields no feedback") {
    FeedbackFixture fx;
    fx.submit(5, 6.0);
    fx.broadcast(7, mk(0, 5, 6.0, "mine"));
    fx.broadcast(9, mk(2, 7, 2.0, "worse#ref=5"));
    CHECK(fx.feedback(0, 10).empty());
}

TEST_CASE("losing against a more valuable winner is accepted silently") {
    FeedbackFixture fx;
    fx.submit(5, 3.0);
    fx.broadcast(7, mk(1, 5, 9.0, "rival"));
    CHECK(fx.feedback(0, 10).empty());
}

TEST_CASE("feedback respects the tick window") {
    FeedbackFixture fx;
    fx.submit(5, 10.0);
    fx.broadcast(7, mk(1, 5, 4.0, "rival"));
    CHECK(fx.feedback(6, 10).empty());
    CHECK(fx.feedback(0, 5).empty());
    CHECK(fx.feedback(5, 6).size() == 1);
}
