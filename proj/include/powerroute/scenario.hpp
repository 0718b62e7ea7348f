#pragma once

// Line-oriented scenario files. '#' starts a comment; fields are whitespace separated.
//
//   market   <id> <transit_fee $/MWh>
//   bus      <market> <bus> <load MW>
//   gen      <market> <bus> <id> <pmin MW> <pmax MW> <c2> <c1> <c0>
//   branch   <market> <from_bus> <to_bus> <susceptance p.u.> <limit MW>
//   boundary <market> <neighbor_market> <bus>
//   tie      <market_a> <market_b> <limit MW> <fee $/MWh>
//   txn      <id> <seller_market> <seller_bus> <buyer_market> <buyer_bus> <p MW>
//
// Markets must be declared before records that mention them in their first field.
// Market declaration order is the relaxation order of the routing protocol.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "powerroute/grid_model.hpp"
#include "powerroute/market_agent.hpp"

namespace powerroute {

struct Scenario {
    double base_power = kDefaultBaseMva;
    std::vector<MarketNetwork> markets;
    std::vector<TieLine> ties;
    std::vector<Transaction> transactions;
};

/// Throws ParseError for malformed records and ValidationError for inconsistent ones,
/// both carrying the 1-based line of the offending record.
Scenario parse_scenario(std::string_view text);

/// Reads and parses a file. Throws Error if it cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

/// Builds the agents (solving every base dispatch).
World make_world(const Scenario& scenario);

}  // namespace powerroute
