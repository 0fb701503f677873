#pragma once

// Gists: the little multimodal payloads chunks carry. Represented as a tag
// bitmask + bounded text payload + salience flag bitmask, with a canonical
// "tags|payload|flags" text form used everywhere a gist appears in output.

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

#include "text.hpp"

namespace ctm {

enum class Tag : std::uint8_t { speech, vision, tactile, query, answer, command, nil };
enum class Flag : std::uint8_t { surprising, terrible, wonderful };

inline constexpr int kTagCount = 7;
inline constexpr int kFlagCount = 3;

inline const char* tag_name(Tag t) {
    switch (t) {
    case Tag::speech: return "speech";
    case Tag::vision: return "vision";
    case Tag::tactile: return "tactile";
    case Tag::query: return "query";
    case Tag::answer: return "answer";
    case Tag::command: return "command";
    case Tag::nil: return "nil";
    }
    return "?";
}

inline const char* flag_name(Flag f) {
    switch (f) {
    case Flag::surprising: return "surprising";
    case Flag::terrible: return "terrible";
    case Flag::wonderful: return "wonderful";
    }
    return "?";
}

class Gist {
public:
    // The NIL gist: empty payload, exactly the tag nil. Default state of STM.
    static Gist nil() {
        Gist g;
        g.tags_ = bit(Tag::nil);
        return g;
    }

    static Gist make(std::initializer_list<Tag> tags, std::string payload,
                     std::initializer_list<Flag> flags = {}) {
        Gist g;
        for (Tag t : tags) g.tags_ |= bit(t);
        for (Flag f : flags) g.flags_ |= bit(f);
        g.payload_ = std::move(payload);
        g.validate();
        return g;
    }

    bool has(Tag t) const { return tags_ & bit(t); }
    bool has(Flag f) const { return flags_ & bit(f); }
    bool salient() const { return flags_ != 0; }
    bool is_nil() const { return tags_ == bit(Tag::nil) && payload_.empty() && flags_ == 0; }
    const std::string& payload() const { return payload_; }

    // Canonical text: "+"-joined tags in enum order | escaped payload |
    // "+"-joined flags in enum order.
    std::string encode() const {
        std::string out;
        bool first = true;
        for (int i = 0; i < kTagCount; ++i) {
            if (tags_ & (1u << i)) {
                if (!first) out += '+';
                out += tag_name(static_cast<Tag>(i));
                first = false;
            }
        }
        out += '|';
        out += escape(payload_);
        out += '|';
        first = true;
        for (int i = 0; i < kFlagCount; ++i) {
            if (flags_ & (1u << i)) {
                if (!first) out += '+';
                out += flag_name(static_cast<Flag>(i));
                first = false;
            }
        }
        return out;
    }

    static Gist decode(std::string_view text) {
        auto parts = split(text, '|');
        if (parts.size() != 3) throw ParseError("gist: expected tags|payload|flags");
        Gist g;
        if (!parts[0].empty()) {
            for (auto name : split(parts[0], '+')) {
                bool found = false;
                for (int i = 0; i < kTagCount; ++i) {
                    if (name == tag_name(static_cast<Tag>(i))) {
                        g.tags_ |= (1u << i);
                        found = true;
                        break;
                    }
                }
                if (!found) throw ParseError("gist: unknown tag '" + std::string(name) + "'");
            }
        }
        g.payload_ = unescape(parts[1]);
        if (!parts[2].empty()) {
            for (auto name : split(parts[2], '+')) {
                bool found = false;
                for (int i = 0; i < kFlagCount; ++i) {
                    if (name == flag_name(static_cast<Flag>(i))) {
                        g.flags_ |= (1u << i);
                        found = true;
                        break;
                    }
                }
                if (!found) throw ParseError("gist: unknown flag '" + std::string(name) + "'");
            }
        }
        g.validate();
        return g;
    }

    bool operator==(const Gist& o) const {
        return tags_ == o.tags_ && flags_ == o.flags_ && payload_ == o.payload_;
    }

private:
    static constexpr std::uint8_t bit(Tag t) { return static_cast<std::uint8_t>(1u << static_cast<int>(t)); }
    static constexpr std::uint8_t bit(Flag f) { return static_cast<std::uint8_t>(1u << static_cast<int>(f)); }

    void validate() const {
        if (tags_ == 0) throw std::invalid_argument("gist: at least one tag required");
        if ((tags_ & bit(Tag::nil)) && (tags_ != bit(Tag::nil) || !payload_.empty() || flags_ != 0))
            throw std::invalid_argument("gist: nil tag only valid alone with empty payload");
        if (encode().size() > 128)
            throw std::invalid_argument("gist: serialized size exceeds 128 bytes");
    }

    std::uint8_t tags_ = 0;
    std::uint8_t flags_ = 0;
    std::string payload_;
};

} // namespace ctm
