#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ctm/chunk.hpp"
#include "ctm/oracle.hpp"
#include "ctm/uptree.hpp"

using namespace ctm;

namespace {

std::vector<Chunk> weights_to_chunks(const std::vector<double>& ws, Tick t = 0) {
    std::vector<Chunk> out;
    for (std::size_t i = 0; i < ws.size(); ++i)
        out.push_back(make_chunk(static_cast<Address>(i), t, Gist::nil(), ws[i]));
    return out;
}

// Independent brute-force cross-check of the class DP: enumerate every joint
// assignment of child winners recursively, with no value-class grouping.
struct BruteOutcome {
    std::size_t leaf;
    double prob;
};

std::vector<BruteOutcome> brute_distribution(const std::vector<Chunk>& leaves, std::size_t begin,
                                             std::size_t count, std::uint32_t arity,
                                             const CompetitionFunction& f, double& sum_i,
                                             double& sum_m) {
    if (count == 1) {
        sum_i = leaves[begin].intensity;
        sum_m = leaves[begin].mood;
        return {{begin, 1.0}};
    }
    std::size_t sub = count / arity;
    std::vector<std::vector<BruteOutcome>> kids(arity);
    sum_i = 0.0;
    sum_m = 0.0;
    for (std::uint32_t i = 0; i < arity; ++i) {
        double si = 0, sm = 0;
        kids[i] = brute_distribution(leaves, begin + i * sub, sub, arity, f, si, sm);
        sum_i += si;
        sum_m += sm;
    }
    // child subtree sums, needed to evaluate each child's presented f-value
    std::vector<double> kid_i(arity, 0.0), kid_m(arity, 0.0);
    for (std::uint32_t i = 0; i < arity; ++i) {
        for (std::size_t l = begin + i * sub; l < begin + (i + 1) * sub; ++l) {
            kid_i[i] += leaves[l].intensity;
            kid_m[i] += leaves[l].mood;
        }
    }
    std::vector<double> acc(leaves.size(), 0.0);
    std::vector<std::size_t> idx(arity, 0);
    for (;;) {
        double q = 1.0;
        std::vector<double> fv(arity);
        for (std::uint32_t i = 0; i < arity; ++i) {
            q *= kids[i][idx[i]].prob;
            Chunk c;
            c.weight = leaves[kids[i][idx[i]].leaf].weight;
            c.intensity = kid_i[i];
            c.mood = kid_m[i];
            fv[i] = f(c);
        }
        if (q > 0.0) {
            double s = std::accumulate(fv.begin(), fv.end(), 0.0);
            for (std::uint32_t i = 0; i < arity; ++i) {
                double pw = s > 0.0 ? fv[i] / s : 1.0 / arity;
                acc[kids[i][idx[i]].leaf] += q * pw;
            }
        }
        std::uint32_t d = 0;
        while (d < arity && ++idx[d] == kids[d].size()) idx[d++] = 0;
        if (d == arity) break;
    }
    std::vector<BruteOutcome> out;
    for (std::size_t l = 0; l < leaves.size(); ++l)
        if (acc[l] > 0.0) out.push_back({l, acc[l]});
    return out;
}

std::vector<double> brute_probabilities(const std::vector<Chunk>& level0,
                                        const CompetitionFunction& f, std::uint32_t arity) {
    auto shape = tree_shape(level0.size(), arity);
    auto padded = pad_level0(level0, shape.leaf_count, level0.front().t);
    double si = 0, sm = 0;
    auto dist = brute_distribution(padded, 0, padded.size(), arity, f, si, sm);
    std::vector<double> probs(padded.size(), 0.0);
    for (auto& o : dist) probs[o.leaf] += o.prob;
    return probs;
}

} // namespace

TEST_CASE("oracle: additive f gives exactly f over sum-of-f") {
    auto chunks = weights_to_chunks({1, 2, 3, 4});
    auto f = CompetitionFunction::intensity();
    auto probs = exact_win_probabilities(chunks, f, 2, Mode::probabilistic);
    REQUIRE(probs.size() == 4);
    std::vector<double> want{0.1, 0.2, 0.3, 0.4};
    CHECK(max_abs_deviation(probs, want) <= 1e-12);

    auto closed = closed_form_additive(chunks, f, 2);
    CHECK(max_abs_deviation(probs, closed) <= 1e-12);
}

TEST_CASE("oracle: cancelling siblings under |mood|") {
    auto chunks = weights_to_chunks({100, -100, 1, 2});
    auto probs =
        exact_win_probabilities(chunks, CompetitionFunction::abs_mood(), 2, Mode::probabilistic);
    std::vector<double> want{0.0, 0.0, 1.0 / 3.0, 2.0 / 3.0};
    CHECK(max_abs_deviation(probs, want) <= 1e-12);
}

TEST_CASE("oracle: lopsided |weight| tree gives the lone right chunk almost half") {
    std::vector<Chunk> chunks =
        weights_to_chunks({10, 10, 10, 10, 10, 0, 0, 0});
    auto probs =
        exact_win_probabilities(chunks, CompetitionFunction::abs_weight(), 2, Mode::probabilistic);
    std::vector<double> want{0.125, 0.125, 0.125, 0.125, 0.5, 0.0, 0.0, 0.0};
    CHECK(max_abs_deviation(probs, want) <= 1e-12);
}

TEST_CASE("oracle matches the independent brute-force enumeration") {
    Rng rng(77);
    std::vector<CompetitionFunction> fns{
        CompetitionFunction::intensity(), CompetitionFunction::intensity_plus_c_mood(0.5),
        CompetitionFunction::intensity_plus_c_mood(-1.0), CompetitionFunction::abs_mood(),
        CompetitionFunction::abs_weight()};
    for (int rep = 0; rep < 30; ++rep) {
        std::size_t n = (rep % 2 == 0) ? 4 : 8;
        std::vector<double> ws(n);
        for (auto& w : ws) w = std::floor((rng.uniform01() - 0.5) * 20.0);
        auto chunks = weights_to_chunks(ws);
        const auto& f = fns[static_cast<std::size_t>(rep) % fns.size()];
        auto dp = exact_win_probabilities(chunks, f, 2, Mode::probabilistic);
        auto brute = brute_probabilities(chunks, f, 2);
        CHECK(max_abs_deviation(dp, brute) <= 1e-12);
    }
}

TEST_CASE("oracle vectors sum to one") {
    Rng rng(88);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> ws(6);
        for (auto& w : ws) w = (rng.uniform01() - 0.5) * 8.0;
        auto chunks = weights_to_chunks(ws);
        auto probs = exact_win_probabilities(chunks, CompetitionFunction::abs_weight(), 2,
                                             Mode::probabilistic);
        double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
        for (double p : probs) CHECK(p >= 0.0);
    }
}

TEST_CASE("proportional selection holds for random additive instances") {
    Rng rng(99);
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t n = std::size_t(1) << (1 + rng.uniform_index(4)); // 2,4,8,16
        std::vector<double> ws(n);
        for (auto& w : ws) w = (rng.uniform01() - 0.5) * 20.0;
        double c = rng.uniform01() * 2.0 - 1.0;
        auto f = CompetitionFunction::intensity_plus_c_mood(c);
        auto chunks = weights_to_chunks(ws);
        auto oracle = exact_win_probabilities(chunks, f, 2, Mode::probabilistic);
        auto closed = closed_form_additive(chunks, f, 2);
        CHECK(max_abs_deviation(oracle, closed) <= 1e-12);
    }
}

TEST_CASE("Monte Carlo agrees with the oracle within four sigma") {
    auto f = CompetitionFunction::intensity();
    auto chunks = weights_to_chunks({1, 2, 3, 4});
    const std::uint64_t trials = 100000;
    auto freq = monte_carlo_win_frequencies(chunks, f, 2, Mode::probabilistic, trials, Rng(5));
    auto oracle = exact_win_probabilities(chunks, f, 2, Mode::probabilistic);
    for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(std::fabs(freq[i] - oracle[i]) <= four_sigma_tolerance(oracle[i], trials));

    // multi-class DP exercised against sampling
    auto wsf = CompetitionFunction::abs_weight();
    auto mixed = weights_to_chunks({3, 5, 2, 7});
    auto freq2 = monte_carlo_win_frequencies(mixed, wsf, 2, Mode::probabilistic, 20000, Rng(6));
    auto oracle2 = exact_win_probabilities(mixed, wsf, 2, Mode::probabilistic);
    for (std::size_t i = 0; i < oracle2.size(); ++i)
        CHECK(std::fabs(freq2[i] - oracle2[i]) <= four_sigma_tolerance(oracle2[i], 20000) + 1e-9);
}

TEST_CASE("permutation invariance of the oracle under additive f") {
    Rng rng(111);
    std::vector<double> ws{4, 1, 7, 2, 6, 3, 5, 8};
    auto f = CompetitionFunction::intensity_plus_c_mood(0.25);
    auto base = exact_win_probabilities(weights_to_chunks(ws), f, 2, Mode::probabilistic);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::size_t> perm(ws.size());
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
        std::vector<double> pw(ws.size());
        for (std::size_t i = 0; i < ws.size(); ++i) pw[i] = ws[perm[i]];
        auto probs = exact_win_probabilities(weights_to_chunks(pw), f, 2, Mode::probabilistic);
        for (std::size_t i = 0; i < ws.size(); ++i)
            CHECK(std::fabs(probs[i] - base[perm[i]]) <= 1e-12);
    }
}

TEST_CASE("deterministic mode is permutation dependent") {
    auto f = CompetitionFunction::intensity();
    auto order_a = weights_to_chunks({10, 9, 8, 1});
    auto order_b = weights_to_chunks({10, 1, 9, 8});
    auto pa = exact_win_probabilities(order_a, f, 2, Mode::deterministic);
    auto pb = exact_win_probabilities(order_b, f, 2, Mode::deterministic);
    // order A: pairs (10,9) and (8,1) -> subtree intensities 19 vs 9 -> the
    // weight-10 chunk wins; order B: pairs (10,1) and (9,8) -> 11 vs 17 ->
    // the weight-9 chunk wins.
    CHECK(pa[0] == 1.0);
    CHECK(pb[2] == 1.0);
    CHECK(order_a[0].weight != order_b[2].weight);
}

TEST_CASE("deterministic oracle matches the deterministic competition") {
    Rng rng(123);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> ws(8);
        for (auto& w : ws) w = std::floor(rng.uniform01() * 30.0) - 10.0;
        auto chunks = weights_to_chunks(ws);
        auto probs = exact_win_probabilities(chunks, CompetitionFunction::intensity(), 2,
                                             Mode::deterministic);
        Rng unused(0);
        auto outcome = run_single_competition(chunks, CompetitionFunction::intensity(), 2,
                                              Mode::deterministic, unused);
        REQUIRE(probs[outcome.winner_leaf] == 1.0);
        double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
        CHECK(sum == 1.0);
    }
}

TEST_CASE("all-zero submissions fall back to a uniform winner") {
    auto chunks = weights_to_chunks({0, 0, 0, 0});
    auto probs = exact_win_probabilities(chunks, CompetitionFunction::intensity(), 2,
                                         Mode::probabilistic);
    for (double p : probs) CHECK(std::fabs(p - 0.25) <= 1e-12);

    auto freq =
        monte_carlo_win_frequencies(chunks, CompetitionFunction::intensity(), 2,
                                    Mode::probabilistic, 20000, Rng(7));
    for (double fr : freq) CHECK(std::fabs(fr - 0.25) <= four_sigma_tolerance(0.25, 20000));
}

TEST_CASE("oracle size limit") {
    std::vector<Chunk> big;
    for (std::size_t i = 0; i < 4097; ++i)
        big.push_back(make_chunk(static_cast<Address>(i), 0, Gist::nil(), 1.0));
    CHECK_THROWS_AS(
        exact_win_probabilities(big, CompetitionFunction::intensity(), 2, Mode::probabilistic),
        std::invalid_argument);
}

TEST_CASE("single-trial and single-leaf Monte Carlo basics") {
    std::vector<Chunk> one{make_chunk(0, 0, Gist::nil(), 2.0)};
    auto freq = monte_carlo_win_frequencies(one, CompetitionFunction::intensity(), 2,
                                            Mode::probabilistic, 1, Rng(1));
    CHECK(freq[0] == 1.0);
    CHECK_THROWS_AS(monte_carlo_win_frequencies(one, CompetitionFunction::intensity(), 2,
                                                Mode::probabilistic, 0, Rng(1)),
                    std::invalid_argument);
}
