#pragma once

// Machine configuration: structured key/value text with [sections]. See
// docs/config-format.md for the schema. parse_config reads the text form;
// validate_config returns field-level diagnostics (empty when valid).

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chunk.hpp"
#include "competition.hpp"
#include "text.hpp"
#include "uptree.hpp"

namespace ctm {

// Desk-scale ceiling for a live machine (the trace logs every node win).
inline constexpr std::uint64_t kMaxMachineLeaves = std::uint64_t(1) << 16;

struct ProcessorSpec {
    Address address = 0;
    std::string specialty;
    std::string behavior = "idle";
    std::map<std::string, std::string> params;
};

struct InputMapSpec {
    std::string sensor;
    std::vector<Address> to;
};

struct OutputMapSpec {
    std::string actuator;
    std::vector<Address> from;
};

struct EnvSpec {
    std::string kind = "null";
    std::map<std::string, std::string> params;
};

struct CtmConfig {
    int schema_version = 1;
    std::uint64_t n_processors = 0;
    std::uint32_t arity = 2;
    double tick_ms = 100.0;
    Tick lifetime = 10000;
    std::uint64_t seed = 0;
    Mode mode = Mode::probabilistic;
    CompetitionFunction f = CompetitionFunction::intensity();
    std::uint32_t link_threshold = 3;
    double c_sea = 2.0;
    int g_clamp_exp = 20;
    Tick sea_cooldown = 30;
    std::vector<ProcessorSpec> roster;
    std::vector<InputMapSpec> inputs;
    std::vector<OutputMapSpec> outputs;
    EnvSpec env;
    std::vector<std::pair<Address, Address>> preformed_links;
};

struct ConfigError : std::runtime_error {
    std::vector<std::string> diagnostics;
    explicit ConfigError(std::vector<std::string> diags)
        : std::runtime_error(join(diags)), diagnostics(std::move(diags)) {}

private:
    static std::string join(const std::vector<std::string>& diags) {
        std::string out = "invalid configuration:";
        for (const auto& d : diags) {
            out += "\n  - ";
            out += d;
        }
        return out;
    }
};

namespace detail {

inline std::vector<Address> parse_address_list(std::string_view s, const char* what) {
    std::vector<Address> out;
    for (auto part : split(s, ',')) {
        part = trim(part);
        if (part.empty()) continue;
        out.push_back(static_cast<Address>(parse_u64(part, what)));
    }
    return out;
}

} // namespace detail

inline CtmConfig parse_config(std::string_view text) {
    CtmConfig cfg;
    std::string section;
    std::size_t lineno = 0;
    std::map<Address, ProcessorSpec> roster;
    std::map<std::string, InputMapSpec> inputs;
    std::map<std::string, OutputMapSpec> outputs;

    auto fail = [&](const std::string& msg) {
        throw ParseError("config line " + std::to_string(lineno) + ": " + msg);
    };

    for (auto raw : split(text, '\n')) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) fail("empty section name");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected key = value");
        auto key = std::string(trim(line.substr(0, eq)));
        auto value = std::string(trim(line.substr(eq + 1)));
        if (key.empty()) fail("empty key");

        try {
            if (section.empty()) {
                if (key == "schema_version")
                    cfg.schema_version = static_cast<int>(parse_u64(value, key.c_str()));
                else
                    fail("unknown top-level key '" + key + "'");
            } else if (section == "machine") {
                if (key == "n_processors") cfg.n_processors = parse_u64(value, key.c_str());
                else if (key == "arity") cfg.arity = static_cast<std::uint32_t>(parse_u64(value, key.c_str()));
                else if (key == "tick_ms") cfg.tick_ms = parse_real(value, key.c_str());
                else if (key == "lifetime") cfg.lifetime = parse_u64(value, key.c_str());
                else if (key == "seed") cfg.seed = parse_u64(value, key.c_str());
                else if (key == "mode") cfg.mode = parse_mode(value);
                else if (key == "f") cfg.f = CompetitionFunction::parse(value);
                else if (key == "link_threshold") cfg.link_threshold = static_cast<std::uint32_t>(parse_u64(value, key.c_str()));
                else if (key == "c_sea") cfg.c_sea = parse_real(value, key.c_str());
                else if (key == "g_clamp_exp") cfg.g_clamp_exp = static_cast<int>(parse_u64(value, key.c_str()));
                else if (key == "sea_cooldown") cfg.sea_cooldown = parse_u64(value, key.c_str());
                else fail("unknown machine key '" + key + "'");
            } else if (section.rfind("processor.", 0) == 0) {
                auto addr = static_cast<Address>(parse_u64(section.substr(10), "processor address"));
                auto& spec = roster[addr];
                spec.address = addr;
                if (key == "specialty") spec.specialty = value;
                else if (key == "behavior") spec.behavior = value;
                else spec.params[key] = value;
            } else if (section == "env") {
                if (key == "kind") cfg.env.kind = value;
                else cfg.env.params[key] = value;
            } else if (section.rfind("input.", 0) == 0) {
                auto sensor = section.substr(6);
                auto& m = inputs[sensor];
                m.sensor = sensor;
                if (key == "to") m.to = detail::parse_address_list(value, "input.to");
                else fail("unknown input key '" + key + "'");
            } else if (section.rfind("output.", 0) == 0) {
                auto actuator = section.substr(7);
                auto& m = outputs[actuator];
                m.actuator = actuator;
                if (key == "from") m.from = detail::parse_address_list(value, "output.from");
                else fail("unknown output key '" + key + "'");
            } else if (section == "links") {
                if (key == "preformed") {
                    for (auto pair : split(value, ',')) {
                        pair = trim(pair);
                        if (pair.empty()) continue;
                        auto dash = pair.find('-');
                        if (dash == std::string_view::npos) fail("preformed link needs a-b");
                        auto a = static_cast<Address>(parse_u64(trim(pair.substr(0, dash)), "link a"));
                        auto b = static_cast<Address>(parse_u64(trim(pair.substr(dash + 1)), "link b"));
                        cfg.preformed_links.emplace_back(a, b);
                    }
                } else {
                    fail("unknown links key '" + key + "'");
                }
            } else {
                fail("unknown section '" + section + "'");
            }
        } catch (const ParseError& e) {
            std::string what = e.what();
            if (what.rfind("config line", 0) == 0) throw;
            fail(what);
        }
    }

    for (auto& [addr, spec] : roster) cfg.roster.push_back(std::move(spec));
    for (auto& [name, m] : inputs) cfg.inputs.push_back(std::move(m));
    for (auto& [name, m] : outputs) cfg.outputs.push_back(std::move(m));
    return cfg;
}

// Canonical write-back; parse_config(encode_config(c)) reproduces c.
inline std::string encode_config(const CtmConfig& cfg) {
    std::string out = "schema_version = " + std::to_string(cfg.schema_version) + "\n\n[machine]\n";
    out += "n_processors = " + std::to_string(cfg.n_processors) + "\n";
    out += "arity = " + std::to_string(cfg.arity) + "\n";
    out += "tick_ms = " + format_real(cfg.tick_ms) + "\n";
    out += "lifetime = " + std::to_string(cfg.lifetime) + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += std::string("mode = ") + mode_name(cfg.mode) + "\n";
    out += "f = " + cfg.f.name() + "\n";
    out += "link_threshold = " + std::to_string(cfg.link_threshold) + "\n";
    out += "c_sea = " + format_real(cfg.c_sea) + "\n";
    out += "g_clamp_exp = " + std::to_string(cfg.g_clamp_exp) + "\n";
    out += "sea_cooldown = " + std::to_string(cfg.sea_cooldown) + "\n";
    for (const auto& p : cfg.roster) {
        out += "\n[processor." + std::to_string(p.address) + "]\n";
        if (!p.specialty.empty()) out += "specialty = " + p.specialty + "\n";
        out += "behavior = " + p.behavior + "\n";
        for (const auto& [k, v] : p.params) out += k + " = " + v + "\n";
    }
    if (cfg.env.kind != "null" || !cfg.env.params.empty()) {
        out += "\n[env]\nkind = " + cfg.env.kind + "\n";
        for (const auto& [k, v] : cfg.env.params) out += k + " = " + v + "\n";
    }
    for (const auto& m : cfg.inputs) {
        out += "\n[input." + m.sensor + "]\nto = ";
        for (std::size_t i = 0; i < m.to.size(); ++i)
            out += (i ? ", " : "") + std::to_string(m.to[i]);
        out += "\n";
    }
    for (const auto& m : cfg.outputs) {
        out += "\n[output." + m.actuator + "]\nfrom = ";
        for (std::size_t i = 0; i < m.from.size(); ++i)
            out += (i ? ", " : "") + std::to_string(m.from[i]);
        out += "\n";
    }
    if (!cfg.preformed_links.empty()) {
        out += "\n[links]\npreformed = ";
        for (std::size_t i = 0; i < cfg.preformed_links.size(); ++i) {
            if (i) out += ", ";
            out += std::to_string(cfg.preformed_links[i].first) + "-" +
                   std::to_string(cfg.preformed_links[i].second);
        }
        out += "\n";
    }
    return out;
}

// Structural validation; behavior-kind checks happen where the behavior
// registry lives (machine construction).
inline std::vector<std::string> validate_config(const CtmConfig& cfg) {
    std::vector<std::string> diags;
    auto known = [&](Address a) { return a < cfg.n_processors; };

    if (cfg.schema_version != 1)
        diags.push_back("schema_version: unsupported version " + std::to_string(cfg.schema_version));
    if (cfg.n_processors < 1) diags.push_back("machine.n_processors: must be at least 1");
    if (cfg.arity < 2) diags.push_back("machine.arity: must be at least 2");
    if (!(cfg.tick_ms > 0.0)) diags.push_back("machine.tick_ms: must be positive");
    if (!(cfg.c_sea > 1.0)) diags.push_back("machine.c_sea: must exceed 1");
    if (cfg.link_threshold < 1) diags.push_back("machine.link_threshold: must be at least 1");
    if (cfg.g_clamp_exp < 1) diags.push_back("machine.g_clamp_exp: must be at least 1");

    if (cfg.n_processors >= 1 && cfg.arity >= 2) {
        auto shape = tree_shape(cfg.n_processors, cfg.arity);
        if (cfg.lifetime < shape.height)
            diags.push_back("machine.lifetime: must be at least the tree height " +
                            std::to_string(shape.height));
        if (shape.leaf_count > kMaxMachineLeaves)
            diags.push_back("machine.n_processors: padded leaf count " +
                            std::to_string(shape.leaf_count) + " exceeds the desk-scale cap");
    }

    std::set<Address> seen;
    for (const auto& p : cfg.roster) {
        std::string where = "processor." + std::to_string(p.address);
        if (!known(p.address)) diags.push_back(where + ": address out of range");
        if (!seen.insert(p.address).second) diags.push_back(where + ": duplicate roster entry");
        if (p.behavior.empty()) diags.push_back(where + ".behavior: empty");
    }
    for (const auto& m : cfg.inputs) {
        if (m.to.empty()) diags.push_back("input." + m.sensor + ".to: empty destination list");
        for (Address a : m.to)
            if (!known(a))
                diags.push_back("input." + m.sensor + ".to: unknown address " + std::to_string(a));
    }
    for (const auto& m : cfg.outputs) {
        if (m.from.empty()) diags.push_back("output." + m.actuator + ".from: empty source list");
        for (Address a : m.from)
            if (!known(a))
                diags.push_back("output." + m.actuator + ".from: unknown address " +
                                std::to_string(a));
    }
    for (const auto& [a, b] : cfg.preformed_links) {
        if (!known(a) || !known(b))
            diags.push_back("links.preformed: unknown address in " + std::to_string(a) + "-" +
                            std::to_string(b));
        if (a == b) diags.push_back("links.preformed: self-link " + std::to_string(a));
    }
    return diags;
}

} // namespace ctm
