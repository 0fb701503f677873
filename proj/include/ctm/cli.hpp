#pragma once

// Command implementations behind the ctm binary. Each cmd_* takes parsed
// arguments plus output streams and returns the process exit code, so tests
// can drive them without spawning processes. Exit codes: 0 pass, 1 a
// verification or scenario assertion failed, 2 usage/config/parse error.
// Every command is a pure function of (arguments, files, seed): running it
// twice produces identical bytes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "latency.hpp"
#include "oracle.hpp"
#include "scenarios.hpp"

namespace ctm::cli {

namespace detail {

inline std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline bool read_file(const std::string& path, std::string& out, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "error: cannot open '" << path << "'\n";
        return false;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

inline bool write_file(const std::string& path, const std::string& content,
                       std::ostream& err) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err << "error: cannot write '" << path << "'\n";
        return false;
    }
    out << content;
    return out.good();
}

} // namespace detail

// --------------------------------------------------------------------------
// verify-theorem: exact oracle vs closed form vs Monte Carlo for one profile.

struct VerifyTheoremArgs {
    std::uint64_t n = 4;
    std::uint32_t arity = 2;
    std::string f = "intensity";
    std::string weights; // comma-separated; empty = 1..n
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    bool expect_theorem = false;
};

inline int cmd_verify_theorem(const VerifyTheoremArgs& args, std::ostream& out,
                              std::ostream& err) {
    if (args.n == 0 || args.n > kOracleMaxLeaves) {
        err << "error: n must be in 1.." << kOracleMaxLeaves << " (exact oracle range)\n";
        return 2;
    }
    if (args.arity < 2) {
        err << "error: arity must be at least 2\n";
        return 2;
    }
    CompetitionFunction f = CompetitionFunction::intensity();
    try {
        f = CompetitionFunction::parse(args.f);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    std::vector<double> weights;
    if (args.weights.empty()) {
        for (std::uint64_t i = 0; i < args.n; ++i) weights.push_back(static_cast<double>(i + 1));
    } else {
        try {
            for (auto part : split(args.weights, ','))
                if (!trim(part).empty()) weights.push_back(parse_real(trim(part), "weights"));
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return 2;
        }
        if (weights.size() != args.n) {
            err << "error: expected " << args.n << " weights, got " << weights.size() << "\n";
            return 2;
        }
    }

    std::vector<Chunk> level0;
    for (std::uint64_t i = 0; i < args.n; ++i)
        level0.push_back(make_chunk(static_cast<Address>(i), 0, Gist::nil(), weights[i]));

    out << "verify-theorem n=" << args.n << " arity=" << args.arity << " f=" << f.name()
        << " trials=" << args.trials << " seed=" << args.seed << "\n";

    if (!f.additive() && args.expect_theorem) {
        out << "additive = no\n";
        out << "verdict = FAIL\n";
        err << "error: f=" << f.name()
            << " is not additive: a parent's f-value is not the sum of its children's, so "
               "the proportional-selection theorem does not apply\n";
        return 1;
    }

    auto oracle = exact_win_probabilities(level0, f, args.arity, Mode::probabilistic);
    std::vector<double> closed, mc;
    if (f.additive()) closed = closed_form_additive(level0, f, args.arity);
    if (args.trials > 0)
        mc = monte_carlo_win_frequencies(level0, f, args.arity, Mode::probabilistic,
                                         args.trials, Rng(args.seed));

    out << "leaf,weight,f_value,oracle";
    if (f.additive()) out << ",closed_form";
    if (args.trials > 0) out << ",monte_carlo";
    out << "\n";
    for (std::uint64_t i = 0; i < args.n; ++i) {
        out << i << ',' << format_real(weights[i]) << ',' << format_real(f(level0[i])) << ','
            << format_real(oracle[i]);
        if (f.additive()) out << ',' << format_real(closed[i]);
        if (args.trials > 0) out << ',' << format_real(mc[i]);
        out << "\n";
    }

    bool pass = true;
    out << "additive = " << (f.additive() ? "yes" : "no") << "\n";
    if (f.additive()) {
        double dev = max_abs_deviation(oracle, closed);
        out << "max_oracle_vs_closed = " << detail::sci(dev) << " (tolerance 1.000e-12)\n";
        if (dev > 1e-12) pass = false;
    }
    if (args.trials > 0) {
        double worst = 0.0;
        bool mc_ok = true;
        for (std::uint64_t i = 0; i < args.n; ++i) {
            double dev = std::fabs(mc[i] - oracle[i]);
            double tol = four_sigma_tolerance(oracle[i], args.trials);
            worst = std::max(worst, dev);
            if (dev > tol) mc_ok = false;
        }
        out << "max_mc_vs_oracle = " << detail::sci(worst) << " (four-sigma per leaf)\n";
        if (!mc_ok) pass = false;
    }
    out << "verdict = " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

// --------------------------------------------------------------------------
// probabilities: exact win probabilities (and optional sampled frequencies)
// for a leaf profile read from a fixture file. Fixture lines: "address weight
// [payload]", '#' starts a comment.

struct ProbabilitiesArgs {
    std::string fixture;
    std::string f = "intensity";
    std::string mode = "probabilistic";
    std::uint32_t arity = 2;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

inline int cmd_probabilities(const ProbabilitiesArgs& args, std::ostream& out,
                             std::ostream& err) {
    CompetitionFunction f = CompetitionFunction::intensity();
    Mode mode;
    try {
        f = CompetitionFunction::parse(args.f);
        mode = parse_mode(args.mode);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (args.arity < 2) {
        err << "error: arity must be at least 2\n";
        return 2;
    }

    std::string text;
    if (!detail::read_file(args.fixture, text, err)) return 2;

    std::vector<Chunk> level0;
    std::size_t lineno = 0;
    try {
        for (auto raw : split(text, '\n')) {
            ++lineno;
            auto line = trim(raw);
            if (line.empty() || line.front() == '#') continue;
            std::vector<std::string_view> toks;
            for (auto tok : split(line, ' '))
                if (!trim(tok).empty()) toks.push_back(trim(tok));
            if (toks.size() < 2) throw ParseError("expected 'address weight [payload]'");
            auto addr = static_cast<Address>(parse_u64(toks[0], "address"));
            double weight = parse_real(toks[1], "weight");
            Gist gist = toks.size() > 2 ? Gist::make({Tag::vision}, std::string(toks[2]))
                                        : Gist::nil();
            for (const auto& c : level0)
                if (c.address == addr) throw ParseError("duplicate address");
            level0.push_back(make_chunk(addr, 0, gist, weight));
        }
    } catch (const std::exception& e) {
        err << "error: " << args.fixture << " line " << lineno << ": " << e.what() << "\n";
        return 2;
    }
    if (level0.empty()) {
        err << "error: fixture has no leaves\n";
        return 2;
    }
    if (level0.size() > kOracleMaxLeaves) {
        err << "error: fixture exceeds " << kOracleMaxLeaves << " leaves\n";
        return 2;
    }

    auto oracle = exact_win_probabilities(level0, f, args.arity, mode);
    std::vector<double> freq;
    if (args.trials > 0)
        freq = monte_carlo_win_frequencies(level0, f, args.arity, mode, args.trials,
                                           Rng(args.seed));

    out << (args.trials > 0 ? "leaf,probability,frequency" : "leaf,probability") << "\n";
    for (std::size_t i = 0; i < level0.size(); ++i) {
        out << level0[i].address << ',' << format_real(oracle[i]);
        if (args.trials > 0) out << ',' << format_real(freq[i]);
        out << "\n";
    }
    return 0;
}

// --------------------------------------------------------------------------
// run-scenario: run one named experiment, write trace/report/config files.

struct RunScenarioArgs {
    std::string name;
    std::uint64_t seed = 7;
    std::string out_dir = ".";
    std::string config_path; // empty = <out_dir>/<name>-config.txt
};

inline int cmd_run_scenario(const RunScenarioArgs& args, std::ostream& out,
                            std::ostream& err) {
    bool known = false;
    for (const auto& n : scenario_names()) known = known || n == args.name;
    if (!known) {
        err << "error: unknown scenario '" << args.name << "'; available:";
        for (const auto& n : scenario_names()) err << ' ' << n;
        err << "\n";
        return 2;
    }

    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);
    if (ec) {
        err << "error: cannot create '" << args.out_dir << "': " << ec.message() << "\n";
        return 2;
    }

    ScenarioResult res = run_scenario(args.name, args.seed);
    CtmConfig primary = scenario_primary_config(args.name, args.seed);

    auto in_dir = [&](const std::string& file) {
        return (std::filesystem::path(args.out_dir) / file).string();
    };
    std::string trace_path = in_dir(args.name + "-trace.txt");
    std::string report_path = in_dir(args.name + "-report.txt");
    std::string config_path =
        args.config_path.empty() ? in_dir(args.name + "-config.txt") : args.config_path;

    if (!detail::write_file(trace_path, res.trace.to_text(), err)) return 2;
    if (!detail::write_file(report_path, res.report(), err)) return 2;
    if (!detail::write_file(config_path, encode_config(primary), err)) return 2;

    out << res.report();
    out << "trace " << trace_path << "\n";
    out << "report " << report_path << "\n";
    out << "config " << config_path << "\n";
    return res.passed() ? 0 : 1;
}

// --------------------------------------------------------------------------
// latency: the time-to-consciousness arithmetic.

struct LatencyArgs {
    double tick_ms = 100.0;
    std::uint64_t n = 1;
    std::uint32_t arity = 2;
};

inline int cmd_latency(const LatencyArgs& args, std::ostream& out, std::ostream& err) {
    if (!(args.tick_ms > 0.0) || args.n == 0 || args.arity < 2) {
        err << "error: latency needs tick_ms > 0, n >= 1, arity >= 2\n";
        return 2;
    }
    out << format_latency(latency(args.tick_ms, args.n, args.arity));
    return 0;
}

// --------------------------------------------------------------------------
// replay: print a stored trace, filtered, or as the stream of consciousness.

struct ReplayArgs {
    std::string trace_path;
    bool stream = false;
    std::vector<std::string> filters; // "key=value"
};

inline int cmd_replay(const ReplayArgs& args, std::ostream& out, std::ostream& err) {
    std::string text;
    if (!detail::read_file(args.trace_path, text, err)) return 2;

    Trace trace;
    try {
        trace = Trace::from_text(text);
    } catch (const ParseError& e) {
        err << "error: " << args.trace_path << ": " << e.what() << "\n";
        return 2;
    }

    std::map<std::string, std::string> criteria;
    for (const auto& spec : args.filters) {
        auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) {
            err << "error: filter '" << spec << "' is not key=value\n";
            return 2;
        }
        criteria[spec.substr(0, eq)] = spec.substr(eq + 1);
    }

    if (args.stream) {
        if (!criteria.empty()) {
            err << "error: --stream and --filter are mutually exclusive\n";
            return 2;
        }
        for (const auto& [tick, gist] : stream_of_consciousness(trace))
            out << tick << ' ' << gist.encode() << "\n";
        return 0;
    }

    try {
        for (const auto& ev : filter_events(trace, criteria)) out << ev.to_line() << "\n";
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace ctm::cli
