#pragma once

// The k-ary Up-Tree: a pipelined tournament. Leaves take one submission per
// tick; every internal node whose child slots are full runs a local
// competition and lifts the (combined) winner one level. A chunk submitted at
// tick t therefore reaches the root at t+h.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "chunk.hpp"
#include "competition.hpp"
#include "rng.hpp"

namespace ctm {

enum class Mode { probabilistic, deterministic };

inline const char* mode_name(Mode m) {
    return m == Mode::probabilistic ? "probabilistic" : "deterministic";
}

inline Mode parse_mode(std::string_view s) {
    if (s == "probabilistic") return Mode::probabilistic;
    if (s == "deterministic") return Mode::deterministic;
    throw ParseError("mode: expected probabilistic|deterministic");
}

struct TreeShape {
    std::uint32_t arity = 2;
    std::uint32_t height = 1;
    std::uint64_t leaf_count = 2;
};

// Shape of the competition tree for n processors: leaves rounded up to the
// next power of arity, minimum height 1 (a lone processor still competes
// against null padding).
inline TreeShape tree_shape(std::uint64_t n_processors, std::uint32_t arity) {
    if (n_processors < 1) throw std::invalid_argument("tree_shape: need at least one processor");
    if (arity < 2) throw std::invalid_argument("tree_shape: arity must be at least 2");
    TreeShape s;
    s.arity = arity;
    s.height = 1;
    s.leaf_count = arity;
    while (s.leaf_count < n_processors) {
        if (s.leaf_count > (std::uint64_t(1) << 62) / arity)
            throw std::invalid_argument("tree_shape: leaf count overflow");
        s.leaf_count *= arity;
        ++s.height;
    }
    return s;
}

// Height used for latency arithmetic: ceil(log_arity n), zero for n = 1 (no
// competition needed). Distinct from tree_shape, which pads a lone leaf.
inline std::uint32_t competition_height(std::uint64_t n_processors, std::uint32_t arity) {
    if (n_processors < 1) throw std::invalid_argument("competition_height: n must be positive");
    if (arity < 2) throw std::invalid_argument("competition_height: arity must be at least 2");
    std::uint32_t h = 0;
    std::uint64_t leaves = 1;
    while (leaves < n_processors) {
        if (leaves > (std::uint64_t(1) << 62) / arity)
            throw std::invalid_argument("competition_height: overflow");
        leaves *= arity;
        ++h;
    }
    return h;
}

// One local competition: probabilistic mode draws the winner index in a
// single categorical draw over the f-values; deterministic mode takes the
// leftmost argmax and consumes no randomness.
inline std::size_t pick_winner(std::span<const double> fvals, Mode mode, Rng& rng) {
    if (mode == Mode::probabilistic) return categorical_pick(fvals, rng);
    std::size_t best = 0;
    for (std::size_t i = 1; i < fvals.size(); ++i)
        if (fvals[i] > fvals[best]) best = i;
    return best;
}

// combine_children variant used internally where the winner is known by
// position (skips the membership scan).
inline Chunk combine_children_at(std::span<const Chunk> children, std::size_t winner_index) {
    if (winner_index >= children.size())
        throw std::invalid_argument("combine_children_at: winner index out of range");
    double intensity = 0.0, mood = 0.0;
    for (const Chunk& c : children) {
        if (c.t != children.front().t)
            throw std::invalid_argument("combine_children_at: children from different ticks");
        intensity += c.intensity;
        mood += c.mood;
    }
    Chunk out = children[winner_index];
    out.intensity = intensity;
    out.mood = mood;
    return out;
}

// Extends a submission list to the padded leaf count with zero-weight NIL
// chunks from null processors (addressed by leaf position).
inline std::vector<Chunk> pad_level0(std::span<const Chunk> chunks, std::uint64_t leaf_count,
                                     Tick tick) {
    if (chunks.size() > leaf_count) throw std::invalid_argument("pad_level0: too many chunks");
    std::vector<Chunk> out(chunks.begin(), chunks.end());
    out.reserve(leaf_count);
    for (std::uint64_t i = chunks.size(); i < leaf_count; ++i)
        out.push_back(make_chunk(static_cast<Address>(i), tick, Gist::nil(), 0.0));
    return out;
}

class UpTree {
public:
    // Called once per local competition resolved by advance().
    using NodeObserver =
        std::function<void(std::uint32_t level, std::uint64_t node_index, const Chunk& installed)>;

    UpTree(std::uint64_t n_processors, std::uint32_t arity, CompetitionFunction f, Mode mode)
        : shape_(tree_shape(n_processors, arity)), f_(f), mode_(mode), n_real_(n_processors) {
        levels_.resize(shape_.height + 1);
        std::uint64_t width = shape_.leaf_count;
        for (std::uint32_t s = 0; s <= shape_.height; ++s) {
            levels_[s].assign(width, std::nullopt);
            width /= arity;
        }
    }

    const TreeShape& shape() const { return shape_; }
    std::uint64_t real_leaves() const { return n_real_; }
    Mode mode() const { return mode_; }
    const CompetitionFunction& f() const { return f_; }
    void set_observer(NodeObserver obs) { observer_ = std::move(obs); }

    // One chunk per real leaf, in leaf order; null leaves are auto-filled.
    void submit_level0(std::span<const Chunk> chunks, Tick tick) {
        if (chunks.size() != n_real_)
            throw std::invalid_argument("submit_level0: expected one chunk per non-null leaf");
        for (const Chunk& c : chunks)
            if (c.t != tick) throw std::invalid_argument("submit_level0: chunk tick mismatch");
        for (const auto& slot : levels_[0])
            if (slot.has_value()) throw std::invalid_argument("submit_level0: level-0 slot occupied");
        auto padded = pad_level0(chunks, shape_.leaf_count, tick);
        for (std::uint64_t i = 0; i < shape_.leaf_count; ++i) levels_[0][i] = std::move(padded[i]);
    }

    // Moves every completed local competition up one level. Competitions are
    // decided bottom-up, left-to-right (fixed rng order), but installed only
    // after all decisions, so a chunk climbs exactly one level per call.
    // Returns the root winner when a competition completes.
    std::optional<Chunk> advance(Rng& rng) {
        struct Pending {
            std::uint32_t level;
            std::uint64_t node;
            Chunk chunk;
        };
        std::vector<Pending> pending;
        std::vector<Chunk> children;
        std::vector<double> fvals;
        for (std::uint32_t s = 1; s <= shape_.height; ++s) {
            const auto& below = levels_[s - 1];
            for (std::uint64_t node = 0; node < levels_[s].size(); ++node) {
                bool full = true;
                for (std::uint32_t j = 0; j < shape_.arity && full; ++j)
                    full = below[node * shape_.arity + j].has_value();
                if (!full) continue;
                children.clear();
                fvals.clear();
                for (std::uint32_t j = 0; j < shape_.arity; ++j) {
                    children.push_back(*below[node * shape_.arity + j]);
                    fvals.push_back(f_(children.back()));
                }
                std::size_t w = pick_winner(fvals, mode_, rng);
                pending.push_back({s, node, combine_children_at(children, w)});
            }
        }
        // Clear every consumed child slot before any install: a slot can be
        // both an install target (from below) and a consumed child (from
        // above) in the same call.
        for (const auto& p : pending)
            for (std::uint32_t j = 0; j < shape_.arity; ++j)
                levels_[p.level - 1][p.node * shape_.arity + j].reset();
        std::optional<Chunk> winner;
        for (auto& p : pending) {
            if (observer_) observer_(p.level, p.node, p.chunk);
            if (p.level == shape_.height) {
                winner = std::move(p.chunk);
            } else {
                levels_[p.level][p.node] = std::move(p.chunk);
            }
        }
        return winner;
    }

private:
    TreeShape shape_;
    CompetitionFunction f_;
    Mode mode_;
    std::uint64_t n_real_;
    std::vector<std::vector<std::optional<Chunk>>> levels_;
    NodeObserver observer_;
};

struct CompetitionOutcome {
    std::size_t winner_leaf = 0;
    Chunk root;
};

// Runs one full (non-pipelined) competition over the given submissions.
// Decision order matches UpTree::advance: bottom-up, left-to-right.
inline CompetitionOutcome run_single_competition(std::span<const Chunk> level0,
                                                 const CompetitionFunction& f, std::uint32_t arity,
                                                 Mode mode, Rng& rng) {
    if (level0.empty()) throw std::invalid_argument("run_single_competition: no submissions");
    auto shape = tree_shape(level0.size(), arity);
    auto padded = pad_level0(level0, shape.leaf_count, level0.front().t);
    std::vector<std::size_t> origin(padded.size());
    for (std::size_t i = 0; i < origin.size(); ++i) origin[i] = i;
    std::vector<Chunk> current = std::move(padded);
    std::vector<Chunk> children;
    std::vector<double> fvals;
    while (current.size() > 1) {
        std::vector<Chunk> next;
        std::vector<std::size_t> next_origin;
        next.reserve(current.size() / arity);
        for (std::size_t node = 0; node < current.size() / arity; ++node) {
            children.assign(current.begin() + static_cast<std::ptrdiff_t>(node * arity),
                            current.begin() + static_cast<std::ptrdiff_t>((node + 1) * arity));
            fvals.clear();
            for (const Chunk& c : children) fvals.push_back(f(c));
            std::size_t w = pick_winner(fvals, mode, rng);
            next.push_back(combine_children_at(children, w));
            next_origin.push_back(origin[node * arity + w]);
        }
        current = std::move(next);
        origin = std::move(next_origin);
    }
    return {origin[0], current[0]};
}

// Per-leaf win frequencies over independent trials; each trial uses its own
// derived rng stream so results are order-independent and parallelizable.
//
// Produces exactly the win counts a loop over run_single_competition would:
// same decision order (bottom-up, left-to-right), same f-values, same draws.
// It is just faster — a node's intensity/mood are sums over its whole subtree
// and never depend on who won below, so every f-value except |weight|'s above
// level 0 is hoisted out of the trial loop.
inline std::vector<double> monte_carlo_win_frequencies(std::span<const Chunk> level0,
                                                       const CompetitionFunction& f,
                                                       std::uint32_t arity, Mode mode,
                                                       std::uint64_t trials, const Rng& base) {
    if (trials < 1) throw std::invalid_argument("monte_carlo_win_frequencies: trials must be >= 1");
    if (level0.empty())
        throw std::invalid_argument("monte_carlo_win_frequencies: no submissions");
    auto shape = tree_shape(level0.size(), arity);
    auto padded = pad_level0(level0, shape.leaf_count, level0.front().t);
    const std::size_t leaves = padded.size();

    Chunk scratch = padded.front();
    auto eval = [&](double intensity, double mood, double weight) {
        scratch.intensity = intensity;
        scratch.mood = mood;
        scratch.weight = weight;
        return f(scratch);
    };

    // static_f[level][node]: f of the chunk that node holds, valid whenever f
    // ignores the winner's weight (always true at level 0). Sums accumulate
    // front-to-back exactly as combine_children does.
    const bool f_reads_weight = f.kind() == FKind::abs_weight;
    std::vector<std::vector<double>> static_f(1);
    {
        std::vector<double> sum_i(leaves), sum_m(leaves);
        static_f[0].resize(leaves);
        for (std::size_t i = 0; i < leaves; ++i) {
            sum_i[i] = padded[i].intensity;
            sum_m[i] = padded[i].mood;
            static_f[0][i] = f(padded[i]);
        }
        while (sum_i.size() > 1) {
            const std::size_t nnodes = sum_i.size() / arity;
            std::vector<double> ni(nnodes), nm(nnodes), nf(nnodes);
            for (std::size_t node = 0; node < nnodes; ++node) {
                double si = 0.0, sm = 0.0;
                for (std::uint32_t j = 0; j < arity; ++j) {
                    si += sum_i[node * arity + j];
                    sm += sum_m[node * arity + j];
                }
                ni[node] = si;
                nm[node] = sm;
                nf[node] = eval(si, sm, 0.0);
            }
            sum_i = std::move(ni);
            sum_m = std::move(nm);
            static_f.push_back(std::move(nf));
        }
    }

    const std::size_t rounds = static_f.size() - 1;
    std::size_t picks_per_trial = 0;
    for (std::size_t level = 1; level <= rounds; ++level) picks_per_trial += static_f[level].size();
    std::vector<double> draws(mode == Mode::probabilistic ? picks_per_trial : 0);
    Rng det_rng(0); // pick_winner never draws from it in deterministic mode

    std::vector<std::uint64_t> wins(leaves, 0);
    std::vector<std::size_t> origin(leaves), next_origin;
    std::vector<double> wcur, wnext;
    std::vector<double> fvals(arity);
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        if (!draws.empty()) first_uniform01_draws(base.derive_seed(trial), draws);
        std::size_t draw_at = 0;
        origin.resize(leaves);
        for (std::size_t i = 0; i < leaves; ++i) origin[i] = i;
        if (f_reads_weight) {
            wcur.resize(leaves);
            for (std::size_t i = 0; i < leaves; ++i) wcur[i] = padded[i].weight;
        }
        for (std::size_t level = 0; level < rounds; ++level) {
            const std::size_t nnodes = static_f[level + 1].size();
            next_origin.resize(nnodes);
            if (f_reads_weight) wnext.resize(nnodes);
            const bool use_static = !f_reads_weight || level == 0;
            for (std::size_t node = 0; node < nnodes; ++node) {
                for (std::uint32_t j = 0; j < arity; ++j)
                    fvals[j] = use_static ? static_f[level][node * arity + j]
                                          : eval(0.0, 0.0, wcur[node * arity + j]);
                std::size_t w = mode == Mode::probabilistic
                                    ? categorical_pick(fvals, draws[draw_at++])
                                    : pick_winner(fvals, mode, det_rng);
                next_origin[node] = origin[node * arity + w];
                if (f_reads_weight) wnext[node] = wcur[node * arity + w];
            }
            origin.swap(next_origin);
            if (f_reads_weight) wcur.swap(wnext);
        }
        wins[origin[0]] += 1;
    }
    std::vector<double> freq(wins.size());
    for (std::size_t i = 0; i < wins.size(); ++i)
        freq[i] = static_cast<double>(wins[i]) / static_cast<double>(trials);
    return freq;
}

} // namespace ctm
