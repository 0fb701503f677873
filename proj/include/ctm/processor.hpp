#pragma once

// LTM processor state: chunk memories with salience-based pruning, link
// state, and the Sleeping-Experts weight adaptation that tunes how much
// weight a processor puts behind its submissions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "chunk.hpp"
#include "gist.hpp"

namespace ctm {

enum class MemoryKind { submitted, broadcast_received, link_received, input_received };

inline const char* memory_kind_name(MemoryKind k) {
    switch (k) {
    case MemoryKind::submitted: return "submitted";
    case MemoryKind::broadcast_received: return "broadcast_received";
    case MemoryKind::link_received: return "link_received";
    case MemoryKind::input_received: return "input_received";
    }
    return "?";
}

struct MemoryRecord {
    Tick tick = 0;
    MemoryKind kind = MemoryKind::submitted;
    Chunk chunk;
};

// Bounded chunk memory. When over capacity, keeps salience-flagged records,
// the top decile by |weight|, and everything inside the recency window;
// plain old records go first.
class MemoryStore {
public:
    explicit MemoryStore(std::size_t capacity = 4096, Tick recency_window = 32)
        : capacity_(std::max<std::size_t>(capacity, 64)), recency_window_(recency_window) {}

    std::size_t capacity() const { return capacity_; }
    Tick recency_window() const { return recency_window_; }
    const std::deque<MemoryRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    void add(MemoryRecord rec) {
        records_.push_back(std::move(rec));
        if (records_.size() > capacity_) prune();
    }

    // Applies the retention rule; returns the retained record count.
    std::size_t prune() {
        if (records_.size() <= capacity_) return records_.size();
        Tick newest = records_.back().tick;
        Tick cutoff = newest >= recency_window_ ? newest - recency_window_ + 1 : 0;

        // top decile of |weight| across the store, largest first
        std::vector<double> mags;
        mags.reserve(records_.size());
        for (const auto& r : records_) mags.push_back(std::fabs(r.chunk.weight));
        std::sort(mags.begin(), mags.end(), std::greater<>());
        std::size_t decile = std::max<std::size_t>(1, records_.size() / 10);
        double threshold = mags[decile - 1];
        // everything strictly above the decile boundary stays; ties at the
        // boundary compete for the remaining slots, newest first
        std::size_t above = 0;
        for (double m : mags)
            if (m > threshold) ++above;
        std::size_t tie_budget = decile - above;
        std::size_t ties_used = 0;

        std::deque<MemoryRecord> kept;
        for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
            bool recent = it->tick >= cutoff;
            bool flagged = it->chunk.gist.salient();
            double mag = std::fabs(it->chunk.weight);
            bool heavy = false;
            if (threshold > 0.0) {
                if (mag > threshold) heavy = true;
                else if (mag == threshold && ties_used < tie_budget) heavy = (++ties_used, true);
            }
            if (recent || flagged || heavy)
                kept.push_front(*it);
        }
        std::size_t over = kept.size() > capacity_ ? kept.size() - capacity_ : 0;
        // capacity pressure beyond the retention rule: drop oldest unflagged
        while (over > 0) {
            auto victim = std::find_if(kept.begin(), kept.end(), [&](const MemoryRecord& r) {
                return !r.chunk.gist.salient();
            });
            if (victim == kept.end()) victim = kept.begin();
            kept.erase(victim);
            --over;
        }
        records_ = std::move(kept);
        return records_.size();
    }

    // Time-ordered gists of retained records in [begin, end).
    std::vector<Gist> story(Tick begin, Tick end) const {
        std::vector<Gist> out;
        for (const auto& r : records_)
            if (r.tick >= begin && r.tick < end) out.push_back(r.chunk.gist);
        return out;
    }

private:
    std::size_t capacity_;
    Tick recency_window_;
    std::deque<MemoryRecord> records_;
};

struct LinkState {
    std::uint32_t usefulness_count = 0;
    std::uint32_t strength = 0;
    bool formed = false;
};

enum class Verdict { embolden, hush };

inline const char* verdict_name(Verdict v) { return v == Verdict::embolden ? "Embolden" : "Hush"; }

struct Feedback {
    Verdict verdict = Verdict::embolden;
    Tick ref_tick = 0;
    std::string reason;
};

struct SeaParams {
    double c_sea = 2.0;
    int clamp_exp = 20; // g clamped to [c_sea^-clamp_exp, c_sea^clamp_exp]

    double g_min() const { return std::pow(c_sea, -clamp_exp); }
    double g_max() const { return std::pow(c_sea, clamp_exp); }
};

inline double sea_update(double g, const Feedback& fb, const SeaParams& params) {
    if (!(g > 0.0)) throw std::invalid_argument("sea_update: g must be positive");
    if (!(params.c_sea > 1.0)) throw std::invalid_argument("sea_update: c_sea must exceed 1");
    double next = fb.verdict == Verdict::embolden ? g * params.c_sea : g / params.c_sea;
    return std::clamp(next, params.g_min(), params.g_max());
}

class Behavior; // defined in behaviors.hpp

struct Processor {
    Address address = 0;
    std::string specialty;
    double g = 1.0;
    MemoryStore memory;
    std::map<Address, LinkState> links;
    std::unique_ptr<Behavior> behavior;

    Processor() = default;
    Processor(Address addr, std::string spec, std::size_t memory_capacity)
        : address(addr), specialty(std::move(spec)), memory(memory_capacity) {}
};

struct SubmissionIntent {
    Gist gist = Gist::nil();
    double base_weight = 0.0;
};

// Applies weight-giving power and records the submission.
inline Chunk make_submission(Processor& p, const SubmissionIntent& intent, Tick tick) {
    Chunk c = make_chunk(p.address, tick, intent.gist, p.g * intent.base_weight);
    p.memory.add({tick, MemoryKind::submitted, c});
    return c;
}

// Link bookkeeping: a acknowledges that something it received from b was
// useful. Returns true when this acknowledgement forms the link.
inline bool acknowledge_useful(Processor& a, Processor& b, std::uint32_t link_threshold) {
    if (a.address == b.address)
        throw std::invalid_argument("acknowledge_useful: self-acknowledgement");
    LinkState& ab = a.links[b.address];
    LinkState& ba = b.links[a.address];
    ab.usefulness_count += 1;
    if (ab.formed) {
        ab.strength += 1;
        ba.strength = ab.strength;
        return false;
    }
    if (ab.usefulness_count >= link_threshold) {
        ab.formed = true;
        ba.formed = true;
        return true;
    }
    return false;
}

inline bool link_formed(const Processor& a, Address b) {
    auto it = a.links.find(b);
    return it != a.links.end() && it->second.formed;
}

// Reference convention for delayed evaluations: a broadcast whose payload
// contains "#ref=<tick>" is talking about the competition started then.
inline bool payload_ref_tick(const std::string& payload, Tick& out) {
    auto pos = payload.find("#ref=");
    if (pos == std::string::npos) return false;
    std::size_t i = pos + 5;
    if (i >= payload.size() || payload[i] < '0' || payload[i] > '9') return false;
    Tick v = 0;
    while (i < payload.size() && payload[i] >= '0' && payload[i] <= '9')
        v = v * 10 + static_cast<Tick>(payload[i++] - '0');
    out = v;
    return true;
}

// Sleeping-Experts feedback over a window of competitions, judged against a
// caller-supplied value estimate:
//   * lost at tick τ with a more valuable submission than the broadcast that
//     won → Embolden;
//   * won at tick τ but a later broadcast referencing τ carries more value →
//     Hush.
// `height` is the Up-Tree height: the broadcast for the competition started
// at τ arrives at τ + height + 1.
template <typename ValueFn>
std::vector<Feedback> generate_feedback(const Processor& p, Tick window_begin, Tick window_end,
                                        std::uint32_t height, const ValueFn& value) {
    std::vector<Feedback> out;
    const auto& recs = p.memory.records();
    for (const auto& sub : recs) {
        if (sub.kind != MemoryKind::submitted) continue;
        Tick tau = sub.tick;
        if (tau < window_begin || tau >= window_end) continue;
        // find the broadcast that decided competition tau
        const Chunk* won = nullptr;
        for (const auto& r : recs) {
            if (r.kind == MemoryKind::broadcast_received && r.chunk.t == tau &&
                r.tick == tau + height + 1) {
                won = &r.chunk;
                break;
            }
        }
        if (!won) continue;
        if (won->address != p.address) {
            if (value(sub.chunk) > value(*won))
                out.push_back({Verdict::embolden, tau, "lost-with-higher-value"});
            continue;
        }
        // we won; look for a later broadcast referencing tau with more value
        for (const auto& r : recs) {
            if (r.kind != MemoryKind::broadcast_received || r.tick <= tau + height + 1) continue;
            Tick ref = 0;
            if (!payload_ref_tick(r.chunk.gist.payload(), ref) || ref != tau) continue;
            if (value(r.chunk) > value(sub.chunk)) {
                out.push_back({Verdict::hush, tau, "higher-value-surfaced"});
                break;
            }
        }
    }
    return out;
}

} // namespace ctm
