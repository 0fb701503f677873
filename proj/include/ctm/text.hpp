#pragma once

// Shared text helpers for the canonical serialization formats (chunk text,
// gist text, trace lines). All formats are line-oriented ASCII; payload bytes
// that could collide with structural characters are percent-encoded.

#include <cstdio>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctm {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Canonical real formatting: fixed notation, exactly nine fractional digits,
// negative zero normalized. Shared by every format so equal values always
// print identically.
inline std::string format_real(double v) {
    if (v == 0.0) v = 0.0; // drop the sign of -0.0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

inline bool needs_escape(unsigned char c) {
    if (c <= 0x20 || c >= 0x7f) return true;
    switch (c) {
    case '%': case '|': case ';': case '=': case '+':
        return true;
    default:
        return false;
    }
}

// Percent-encode bytes that would collide with field separators ('|', ';',
// '='), tag joiners ('+'), whitespace, or non-printables.
inline std::string escape(std::string_view s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (needs_escape(c)) {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xf];
        } else {
            out += static_cast<char>(c);
        }
    }
    return out;
}

inline int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

inline std::string unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%') {
            if (i + 2 >= s.size()) throw ParseError("truncated percent escape");
            int hi = hex_val(s[i + 1]), lo = hex_val(s[i + 2]);
            if (hi < 0 || lo < 0) throw ParseError("bad percent escape");
            out += static_cast<char>(hi * 16 + lo);
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_real(std::string_view s, const char* what) {
    if (s.empty()) throw ParseError(std::string(what) + ": empty number");
    std::string tmp(s);
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size())
        throw ParseError(std::string(what) + ": bad number '" + tmp + "'");
    return v;
}

inline std::uint64_t parse_u64(std::string_view s, const char* what) {
    if (s.empty()) throw ParseError(std::string(what) + ": empty integer");
    std::uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9')
            throw ParseError(std::string(what) + ": bad integer '" + std::string(s) + "'");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

inline std::int64_t parse_i64(std::string_view s, const char* what) {
    bool neg = !s.empty() && s.front() == '-';
    if (neg) s.remove_prefix(1);
    auto mag = parse_u64(s, what);
    return neg ? -static_cast<std::int64_t>(mag) : static_cast<std::int64_t>(mag);
}

} // namespace ctm
