#pragma once

#include <string>
#include <vector>

#include "powerroute/market_agent.hpp"
#include "powerroute/transaction_engine.hpp"

namespace powerroute {

/// Fixed two-decimal rendering, "INF" for infinity, never "-0.00".
std::string format_amount(double value);

/// Per transaction: iteration table, route or denial, itemized payments. Then generation
/// cost per market, initially and after each transaction.
std::string render_report(const std::vector<Settlement>& settlements, const World& world);

/// Every relaxation row, confirming sweeps included, with change flags.
std::string render_trace(const std::vector<Settlement>& settlements);

}  // namespace powerroute
