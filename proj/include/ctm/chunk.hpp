#pragma once

// Chunks are the unit of conscious content: what processors submit, what the
// competition selects, what gets broadcast. Identity fields (address, t,
// gist, weight) never change after submission; intensity and mood are the
// only fields that evolve as a chunk climbs (they become subtree sums).

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gist.hpp"
#include "text.hpp"

namespace ctm {

using Address = std::uint32_t;
using Tick = std::uint64_t;

// Weight magnitudes are clamped here to keep intensity sums finite at any
// plausible N.
inline constexpr double kMaxWeight = 1e9;

struct Chunk {
    Address address = 0;
    Tick t = 0;
    Gist gist = Gist::nil();
    double weight = 0.0;
    double intensity = 0.0;
    double mood = 0.0;
};

inline Chunk make_chunk(Address address, Tick t, Gist gist, double weight) {
    if (!std::isfinite(weight)) throw std::invalid_argument("make_chunk: weight must be finite");
    if (weight > kMaxWeight) weight = kMaxWeight;
    if (weight < -kMaxWeight) weight = -kMaxWeight;
    Chunk c;
    c.address = address;
    c.t = t;
    c.gist = std::move(gist);
    c.weight = weight;
    c.intensity = std::fabs(weight);
    c.mood = weight;
    return c;
}

// Node-level merge: the winner's identity climbs, intensity and mood become
// the sums over all competing siblings. Works for any arity.
inline Chunk combine_children(const Chunk& winner, std::span<const Chunk> children) {
    if (children.empty()) throw std::invalid_argument("combine_children: no children");
    bool winner_present = false;
    double intensity = 0.0, mood = 0.0;
    for (const Chunk& c : children) {
        if (c.t != children.front().t)
            throw std::invalid_argument("combine_children: children from different ticks");
        if (c.address == winner.address && c.t == winner.t) winner_present = true;
        intensity += c.intensity;
        mood += c.mood;
    }
    if (winner.t != children.front().t)
        throw std::invalid_argument("combine_children: winner tick mismatch");
    if (!winner_present)
        throw std::invalid_argument("combine_children: winner is not among the children");
    Chunk out = winner;
    out.intensity = intensity;
    out.mood = mood;
    return out;
}

// Canonical text form, six ';'-separated fields in fixed order:
//   address;t;gist;weight;intensity;mood
// Reals carry exactly nine fractional digits. Used verbatim inside trace
// lines and by the CLI.
inline std::string encode_chunk(const Chunk& c) {
    std::string out = std::to_string(c.address);
    out += ';';
    out += std::to_string(c.t);
    out += ';';
    out += c.gist.encode();
    out += ';';
    out += format_real(c.weight);
    out += ';';
    out += format_real(c.intensity);
    out += ';';
    out += format_real(c.mood);
    return out;
}

inline Chunk parse_chunk(std::string_view text) {
    auto parts = split(text, ';');
    if (parts.size() != 6) throw ParseError("chunk: expected 6 fields");
    Chunk c;
    c.address = static_cast<Address>(parse_u64(parts[0], "chunk.address"));
    c.t = parse_u64(parts[1], "chunk.t");
    c.gist = Gist::decode(parts[2]);
    c.weight = parse_real(parts[3], "chunk.weight");
    c.intensity = parse_real(parts[4], "chunk.intensity");
    c.mood = parse_real(parts[5], "chunk.mood");
    if (c.intensity < 0.0) throw ParseError("chunk: negative intensity");
    return c;
}

} // namespace ctm
