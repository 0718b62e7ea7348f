#include "powerroute/report.hpp"

#include <cmath>

#include <fmt/format.h>

namespace powerroute {

std::string format_amount(double value) {
    if (std::isinf(value)) return value > 0 ? "INF" : "-INF";
    if (std::isnan(value)) return "NAN";
    std::string s = fmt::format("{:.2f}", value);
    if (s == "-0.00") s = "0.00";
    return s;
}

namespace {

std::string join(const std::vector<MarketId>& path) {
    std::string out;
    for (const auto& m : path) out += (out.empty() ? "" : "-") + m;
    return out;
}

void header_line(std::string& out, const Settlement& s) {
    const auto& t = s.transaction;
    out += fmt::format("Transaction {}: {} bus {} -> {} bus {}, {} MW\n", t.id, t.seller_market, t.seller_bus,
                       t.buyer_market, t.buyer_bus, format_amount(t.p_tr));
}

}  // namespace

std::string render_report(const std::vector<Settlement>& settlements, const World& world) {
    std::string out;
    for (const auto& s : settlements) {
        header_line(out, s);
        const auto& trace = s.trace;
        out += fmt::format("{:<10}", "Iteration");
        for (const auto& m : trace.markets) {
            if (m != s.transaction.seller_market) out += fmt::format("{:>12}", m);
        }
        out += '\n';
        for (const auto& row : trace.rows) {
            if (row.iteration > 1 && !row.changed) continue;
            out += fmt::format("{:<10}", row.iteration);
            for (std::size_t i = 0; i < trace.markets.size(); ++i) {
                if (trace.markets[i] != s.transaction.seller_market) {
                    out += fmt::format("{:>12}", format_amount(row.distances[i]));
                }
            }
            out += '\n';
        }
        out += fmt::format("Sweeps: {} ({} improving)\n", trace.sweeps, trace.improving_sweeps());
        if (!s.settled) {
            out += fmt::format("DENIED: {}\n\n", s.denial ? to_string(*s.denial) : "unknown");
            continue;
        }
        out += fmt::format("Route: {}\n", join(s.route));
        out += fmt::format("Total cost: {} $/h\n", format_amount(s.total_cost));
        out += "Payments ($/h):\n";
        for (const auto& item : s.items) {
            out += fmt::format("  {:<8}{:<14}{:>12}", item.payee, to_string(item.kind), format_amount(item.amount));
            if (item.kind == PaymentKind::Congestion && item.amount < -0.005) out += "  (negative congestion fee)";
            out += '\n';
        }
        out += '\n';
    }

    out += "Generator cost by market ($/h)\n";
    out += fmt::format("{:<10}{:>12}", "Market", "Initial");
    for (const auto& s : settlements) out += fmt::format("{:>12}", fmt::format("After T{}", s.transaction_id));
    out += '\n';
    for (std::size_t i = 0; i < world.agents.size(); ++i) {
        out += fmt::format("{:<10}{:>12}", world.agents[i].id(), format_amount(world.initial_costs.at(i)));
        for (const auto& s : settlements) out += fmt::format("{:>12}", format_amount(s.market_costs.at(i)));
        out += '\n';
    }
    return out;
}

std::string render_trace(const std::vector<Settlement>& settlements) {
    std::string out;
    for (const auto& s : settlements) {
        header_line(out, s);
        out += fmt::format("{:<10}{:<9}", "Iteration", "Changed");
        for (const auto& m : s.trace.markets) out += fmt::format("{:>12}", m);
        out += '\n';
        for (const auto& row : s.trace.rows) {
            out += fmt::format("{:<10}{:<9}", row.iteration, row.changed ? "yes" : "no");
            for (double d : row.distances) out += fmt::format("{:>12}", format_amount(d));
            out += '\n';
        }
        out += '\n';
    }
    return out;
}

}  // namespace powerroute
