#pragma once

// Competition functions score chunks during Up-Tree tournaments. The additive
// family intensity + c·mood (|c| ≤ 1) is the one the proportional-selection
// theorem holds for; |mood| and |weight| are deliberately non-additive
// counterexamples and are kept around to demonstrate that.

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "chunk.hpp"
#include "text.hpp"

namespace ctm {

enum class FKind { intensity_plus_c_mood, abs_mood, abs_weight };

class CompetitionFunction {
public:
    static CompetitionFunction intensity() { return {FKind::intensity_plus_c_mood, 0.0}; }
    static CompetitionFunction intensity_plus_c_mood(double c) {
        if (!(c >= -1.0 && c <= 1.0))
            throw std::invalid_argument("competition function: c must be in [-1, 1]");
        return {FKind::intensity_plus_c_mood, c};
    }
    static CompetitionFunction abs_mood() { return {FKind::abs_mood, 0.0}; }
    static CompetitionFunction abs_weight() { return {FKind::abs_weight, 0.0}; }

    FKind kind() const { return kind_; }
    double c() const { return c_; }

    // Additivity means f(combined node chunk) depends only on the summed
    // intensity/mood, never on which child won. True exactly for the
    // intensity + c·mood family.
    bool additive() const { return kind_ == FKind::intensity_plus_c_mood; }

    double operator()(const Chunk& chunk) const {
        switch (kind_) {
        case FKind::intensity_plus_c_mood: return chunk.intensity + c_ * chunk.mood;
        case FKind::abs_mood: return std::fabs(chunk.mood);
        case FKind::abs_weight: return std::fabs(chunk.weight);
        }
        return 0.0;
    }

    // Text forms accepted by configs and the CLI: "intensity",
    // "intensity+0.25*mood", "intensity-1*mood", "|mood|", "|weight|".
    std::string name() const {
        switch (kind_) {
        case FKind::abs_mood: return "|mood|";
        case FKind::abs_weight: return "|weight|";
        case FKind::intensity_plus_c_mood: break;
        }
        if (c_ == 0.0) return "intensity";
        std::string out = "intensity";
        out += c_ < 0.0 ? '-' : '+';
        double mag = std::fabs(c_);
        // shortest round-trip-safe form for typical c values
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.17g", mag);
        out += buf;
        out += "*mood";
        return out;
    }

    static CompetitionFunction parse(std::string_view text) {
        text = trim(text);
        if (text == "intensity") return intensity();
        if (text == "|mood|") return abs_mood();
        if (text == "|weight|") return abs_weight();
        constexpr std::string_view prefix = "intensity";
        constexpr std::string_view suffix = "*mood";
        if (text.size() > prefix.size() + suffix.size() &&
            text.substr(0, prefix.size()) == prefix &&
            text.substr(text.size() - suffix.size()) == suffix) {
            auto mid = text.substr(prefix.size(), text.size() - prefix.size() - suffix.size());
            if (!mid.empty() && (mid[0] == '+' || mid[0] == '-'))
                return intensity_plus_c_mood(parse_real(mid, "competition function c"));
        }
        throw ParseError("competition function: unrecognized '" + std::string(text) + "'");
    }

private:
    CompetitionFunction(FKind kind, double c) : kind_(kind), c_(c) {}
    FKind kind_;
    double c_;
};

} // namespace ctm
