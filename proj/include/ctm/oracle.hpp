#pragma once

// Exact win-probability oracle for a single Up-Tree competition, written as
// an independent check on the simulator (and on the proportional-selection
// property of additive competition functions).
//
// Key structural facts exploited:
//   * a node chunk's intensity/mood are winner-independent subtree sums;
//   * its weight is the winning leaf's weight;
//   * hence the f-value a node presents to its parent is a function of the
//     winning leaf alone. Leaves inducing equal f-values are interchangeable
//     above that node, so each node only needs a distribution over distinct
//     induced f-values ("classes"), with per-leaf masses inside each class.
// Additive f collapses to one class per node; |weight|-style functions get a
// class per distinct induced value, combined by enumerating class tuples
// across siblings.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "chunk.hpp"
#include "competition.hpp"
#include "uptree.hpp"

namespace ctm {

inline constexpr std::uint64_t kOracleMaxLeaves = 4096;

// f over a whole probability-vector: closed form f/Σf per padded leaf;
// uniform when every f-value is zero. Valid as a win-probability prediction
// only for additive f (that is the theorem).
inline std::vector<double> closed_form_additive(std::span<const Chunk> level0,
                                                const CompetitionFunction& f,
                                                std::uint32_t arity) {
    auto shape = tree_shape(level0.empty() ? 1 : level0.size(), arity);
    auto padded = pad_level0(level0, shape.leaf_count, level0.empty() ? 0 : level0.front().t);
    std::vector<double> vals(padded.size());
    double total = 0.0;
    for (std::size_t i = 0; i < padded.size(); ++i) {
        vals[i] = f(padded[i]);
        total += vals[i];
    }
    if (total <= 0.0) {
        std::vector<double> out(padded.size(), 1.0 / static_cast<double>(padded.size()));
        return out;
    }
    for (double& v : vals) v /= total;
    return vals;
}

namespace detail {

struct ValueClass {
    double value = 0.0;            // f-value this node presents if a leaf in the class won
    double prob = 0.0;             // probability that the winner lies in this class
    std::vector<double> mass;      // per-leaf win probability within the node's leaf range
};

struct NodeDist {
    double sum_intensity = 0.0;
    double sum_mood = 0.0;
    std::vector<ValueClass> classes;
};

inline double induced_value(const CompetitionFunction& f, double weight, double sum_i, double sum_m) {
    Chunk c;
    c.weight = weight;
    c.intensity = sum_i;
    c.mood = sum_m;
    return f(c);
}

inline NodeDist combine_dists(std::span<const NodeDist> children,
                              std::span<const double> child_leaf_weights, // concatenated leaf weights
                              std::span<const std::size_t> child_offsets, // offset of each child's range
                              const CompetitionFunction& f) {
    const std::size_t k = children.size();
    NodeDist parent;
    for (const auto& ch : children) {
        parent.sum_intensity += ch.sum_intensity;
        parent.sum_mood += ch.sum_mood;
    }
    const std::size_t total_leaves = child_offsets[k];

    std::uint64_t combos = 1;
    for (const auto& ch : children) {
        combos *= ch.classes.size();
        if (combos > (std::uint64_t(1) << 22))
            throw std::invalid_argument("exact_win_probabilities: too many distinct value classes");
    }

    // factor[i][j]: total probability-weight multiplying child i's class j
    // normalized mass, summed over all sibling class combinations.
    std::vector<std::vector<double>> factor(k);
    for (std::size_t i = 0; i < k; ++i) factor[i].assign(children[i].classes.size(), 0.0);

    std::vector<std::size_t> idx(k, 0);
    for (;;) {
        double q = 1.0;
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const auto& cl = children[i].classes[idx[i]];
            q *= cl.prob;
            s += cl.value;
        }
        if (q > 0.0) {
            for (std::size_t i = 0; i < k; ++i) {
                const auto& cl = children[i].classes[idx[i]];
                double pw = s > 0.0 ? cl.value / s : 1.0 / static_cast<double>(k);
                if (pw > 0.0) factor[i][idx[i]] += (q / cl.prob) * pw;
            }
        }
        std::size_t d = 0;
        while (d < k && ++idx[d] == children[d].classes.size()) idx[d++] = 0;
        if (d == k) break;
    }

    // Flatten to per-leaf win probabilities over the parent's leaf range.
    // factor[i][j] already carries the 1/q_j conditioning, so it multiplies
    // the raw class mass directly.
    std::vector<double> leaf_prob(total_leaves, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < children[i].classes.size(); ++j) {
            const auto& cl = children[i].classes[j];
            if (factor[i][j] <= 0.0 || cl.prob <= 0.0) continue;
            for (std::size_t l = 0; l < cl.mass.size(); ++l)
                leaf_prob[child_offsets[i] + l] += factor[i][j] * cl.mass[l];
        }
    }

    // Re-partition by the f-value the parent would present for each winner.
    std::map<double, ValueClass> grouped;
    for (std::size_t l = 0; l < total_leaves; ++l) {
        double v = induced_value(f, child_leaf_weights[l], parent.sum_intensity, parent.sum_mood);
        auto& cl = grouped[v];
        cl.value = v;
        if (cl.mass.empty()) cl.mass.assign(total_leaves, 0.0);
        cl.mass[l] += leaf_prob[l];
        cl.prob += leaf_prob[l];
    }
    for (auto& [v, cl] : grouped)
        if (cl.prob > 0.0) parent.classes.push_back(std::move(cl));
    if (parent.classes.empty()) {
        // all leaves have zero win probability mass — cannot happen, but keep
        // the structure total
        ValueClass cl;
        cl.mass.assign(total_leaves, 0.0);
        parent.classes.push_back(std::move(cl));
    }
    return parent;
}

struct DetOutcome {
    std::size_t winner_leaf = 0;
    Chunk chunk;
};

inline DetOutcome deterministic_winner(std::span<const Chunk> leaves, std::size_t begin,
                                       std::size_t count, std::uint32_t arity,
                                       const CompetitionFunction& f) {
    if (count == 1) return {begin, leaves[begin]};
    std::size_t sub = count / arity;
    std::vector<DetOutcome> children;
    std::vector<Chunk> child_chunks;
    std::vector<double> fvals;
    for (std::uint32_t i = 0; i < arity; ++i) {
        children.push_back(deterministic_winner(leaves, begin + i * sub, sub, arity, f));
        child_chunks.push_back(children.back().chunk);
        fvals.push_back(f(child_chunks.back()));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < fvals.size(); ++i)
        if (fvals[i] > fvals[best]) best = i;
    DetOutcome out;
    out.winner_leaf = children[best].winner_leaf;
    out.chunk = combine_children_at(child_chunks, best);
    return out;
}

} // namespace detail

// Exact per-leaf win probabilities over the padded leaf range. Probabilistic
// mode runs the class DP; deterministic mode walks the unique outcome.
inline std::vector<double> exact_win_probabilities(std::span<const Chunk> level0,
                                                   const CompetitionFunction& f,
                                                   std::uint32_t arity, Mode mode) {
    auto shape = tree_shape(level0.empty() ? 1 : level0.size(), arity);
    if (shape.leaf_count > kOracleMaxLeaves)
        throw std::invalid_argument("exact_win_probabilities: padded leaf count exceeds 4096");
    auto padded = pad_level0(level0, shape.leaf_count, level0.empty() ? 0 : level0.front().t);

    if (mode == Mode::deterministic) {
        auto out = detail::deterministic_winner(padded, 0, padded.size(), arity, f);
        std::vector<double> probs(padded.size(), 0.0);
        probs[out.winner_leaf] = 1.0;
        return probs;
    }

    std::vector<double> weights(padded.size());
    for (std::size_t i = 0; i < padded.size(); ++i) weights[i] = padded[i].weight;

    // Bottom-up over levels: current[] holds one NodeDist per node.
    std::vector<detail::NodeDist> current(padded.size());
    for (std::size_t i = 0; i < padded.size(); ++i) {
        detail::NodeDist d;
        d.sum_intensity = padded[i].intensity;
        d.sum_mood = padded[i].mood;
        detail::ValueClass cl;
        cl.value = f(padded[i]);
        cl.prob = 1.0;
        cl.mass = {1.0};
        d.classes.push_back(std::move(cl));
        current[i] = std::move(d);
    }
    std::size_t node_leaves = 1;
    while (current.size() > 1) {
        std::vector<detail::NodeDist> next;
        next.reserve(current.size() / arity);
        for (std::size_t node = 0; node < current.size() / arity; ++node) {
            std::vector<detail::NodeDist> children(
                std::make_move_iterator(current.begin() + static_cast<std::ptrdiff_t>(node * arity)),
                std::make_move_iterator(current.begin() + static_cast<std::ptrdiff_t>((node + 1) * arity)));
            std::vector<std::size_t> offsets(arity + 1);
            for (std::size_t i = 0; i <= arity; ++i) offsets[i] = i * node_leaves;
            std::span<const double> leaf_w(weights.data() + node * arity * node_leaves,
                                           arity * node_leaves);
            next.push_back(detail::combine_dists(children, leaf_w, offsets, f));
        }
        current = std::move(next);
        node_leaves *= arity;
    }

    std::vector<double> probs(padded.size(), 0.0);
    for (const auto& cl : current[0].classes)
        for (std::size_t l = 0; l < cl.mass.size(); ++l) probs[l] += cl.mass[l];
    return probs;
}

// Monte-Carlo acceptance band for a frequency estimate of probability p.
inline double four_sigma_tolerance(double p, std::uint64_t trials) {
    return 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

inline double max_abs_deviation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_deviation: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

} // namespace ctm
