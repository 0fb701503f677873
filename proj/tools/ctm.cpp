// ctm — run, verify, and inspect the conscious-machine simulator.

#include <iostream>

#include <CLI11.hpp>

#include "ctm/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"deterministic simulator of a broadcast-based conscious machine"};
    app.require_subcommand(1);

    ctm::cli::VerifyTheoremArgs vt;
    auto* verify = app.add_subcommand(
        "verify-theorem", "check proportional selection: exact oracle vs closed form vs "
                          "Monte Carlo for one leaf profile");
    verify->add_option("--n", vt.n, "number of competing processors (<= 4096)");
    verify->add_option("--arity", vt.arity, "tree arity (>= 2)");
    verify->add_option("--f", vt.f,
                       "competition function: intensity, intensity+c*mood, |mood|, |weight|");
    verify->add_option("--weights", vt.weights, "comma-separated leaf weights (default 1..n)");
    verify->add_option("--trials", vt.trials, "Monte Carlo trials (0 = oracle only)");
    verify->add_option("--seed", vt.seed, "random seed");
    verify->add_flag("--expect-theorem", vt.expect_theorem,
                     "fail loudly if f is not additive (the theorem's precondition)");

    ctm::cli::ProbabilitiesArgs pr;
    auto* probs = app.add_subcommand(
        "probabilities", "exact win probabilities for a leaf profile from a fixture file");
    probs->add_option("fixture", pr.fixture, "fixture file: 'address weight [payload]' lines")
        ->required();
    probs->add_option("--f", pr.f, "competition function");
    probs->add_option("--mode", pr.mode, "probabilistic or deterministic");
    probs->add_option("--arity", pr.arity, "tree arity (>= 2)");
    probs->add_option("--trials", pr.trials, "also sample frequencies over this many trials");
    probs->add_option("--seed", pr.seed, "random seed for sampling");

    ctm::cli::RunScenarioArgs rs;
    auto* scenario = app.add_subcommand(
        "run-scenario", "run a named experiment and write its trace, report, and config");
    scenario->add_option("name", rs.name, "scenario name (see error message for the list)")
        ->required();
    scenario->add_option("--seed", rs.seed, "random seed");
    scenario->add_option("--out", rs.out_dir, "output directory");
    scenario->add_option("--config", rs.config_path,
                         "where to write the primary arm's machine configuration");

    ctm::cli::LatencyArgs la;
    auto* lat = app.add_subcommand("latency", "time-to-consciousness arithmetic");
    lat->add_option("--tick-ms", la.tick_ms, "milliseconds per tick");
    lat->add_option("--n", la.n, "number of processors");
    lat->add_option("--arity", la.arity, "tree arity (>= 2)");

    ctm::cli::ReplayArgs rp;
    auto* replay = app.add_subcommand("replay", "print a stored trace, filtered or as the "
                                                "stream of consciousness");
    replay->add_option("trace", rp.trace_path, "trace file")->required();
    replay->add_flag("--stream", rp.stream, "print broadcast gists only, one per line");
    replay->add_option("--filter", rp.filters,
                       "key=value event filter (kind=, tick=, tick=a..b, addr=, or any field); "
                       "repeatable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*verify) return ctm::cli::cmd_verify_theorem(vt, std::cout, std::cerr);
        if (*probs) return ctm::cli::cmd_probabilities(pr, std::cout, std::cerr);
        if (*scenario) return ctm::cli::cmd_run_scenario(rs, std::cout, std::cerr);
        if (*lat) return ctm::cli::cmd_latency(la, std::cout, std::cerr);
        if (*replay) return ctm::cli::cmd_replay(rp, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
