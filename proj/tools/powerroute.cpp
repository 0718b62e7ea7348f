#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "powerroute/errors.hpp"
#include "powerroute/report.hpp"
#include "powerroute/scenario.hpp"
#include "powerroute/transaction_engine.hpp"

namespace {

constexpr int kExitSettled = 0;
constexpr int kExitDenied = 1;
constexpr int kExitInput = 2;
constexpr int kExitMismatch = 3;

int run(const std::string& path, bool trace, std::size_t max_sweeps, bool oracle_check) {
    using namespace powerroute;
    const Scenario scenario = load_scenario(path);
    EngineOptions options;
    options.max_sweeps = max_sweeps;
    options.oracle_check = oracle_check;
    const World world = make_world(scenario);
    const QueueResult result = process_queue(world, scenario.transactions, options);
    std::cout << render_report(result.settlements, world);
    if (trace) {
        std::ofstream out(path + ".trace", std::ios::binary);
        if (!out) throw Error("cannot write " + path + ".trace");
        out << render_trace(result.settlements);
    }
    for (const auto& s : result.settlements) {
        if (!s.settled) return kExitDenied;
    }
    return kExitSettled;
}

int validate(const std::string& path) {
    using namespace powerroute;
    const Scenario scenario = load_scenario(path);
    const World world = make_world(scenario);
    std::cout << "OK: " << world.agents.size() << " markets, " << scenario.ties.size() << " ties, "
              << scenario.transactions.size() << " transactions\n";
    return kExitSettled;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inter-market transaction routing over DC power-flow markets"};
    app.require_subcommand(1);

    std::string run_path;
    bool trace = false;
    std::size_t max_sweeps = 0;
    bool oracle_check = false;
    auto* run_cmd = app.add_subcommand("run", "Route and settle every transaction in a scenario");
    run_cmd->add_option("scenario", run_path, "Scenario file")->required();
    run_cmd->add_flag("--trace", trace, "Write the full relaxation trace to <scenario>.trace");
    run_cmd->add_option("--max-sweeps", max_sweeps, "Sweep budget per transaction (default 2|V|)");
    run_cmd->add_flag("--oracle-check", oracle_check, "Cross-check every route against exhaustive enumeration");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a scenario");
    validate_cmd->add_option("scenario", validate_path, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*run_cmd) return run(run_path, trace, max_sweeps, oracle_check);
        return validate(validate_path);
    } catch (const powerroute::InternalMismatch& e) {
        std::cerr << "oracle mismatch: " << e.what() << '\n';
        return kExitMismatch;
    } catch (const powerroute::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}
