#include "powerroute/market_agent.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "powerroute/errors.hpp"

namespace powerroute {

MarketAgent::MarketAgent(MarketNetwork network, std::vector<TieLine> ties) : network_(std::move(network)) {
    for (auto& tie : ties) {
        if (!tie.touches(network_.id)) continue;
        const auto& other = tie.other(network_.id);
        if (!network_.boundary_map.contains(other)) {
            throw DanglingTie("market " + network_.id + " has no boundary bus toward " + other);
        }
        if (!neighbor_ties_.emplace(other, std::move(tie)).second) {
            throw InvalidModel("parallel ties between " + network_.id + " and " + other);
        }
    }
    for (const auto& [neighbor, bus] : network_.boundary_map) {
        if (!neighbor_ties_.contains(neighbor)) {
            throw InvalidModel("market " + network_.id + " has a boundary toward " + neighbor + " but no tie");
        }
    }
    base_ = solve_base_dispatch(network_);
    if (!base_.feasible) throw InvalidModel("market " + network_.id + " cannot serve its own load");
}

const TieLine& MarketAgent::tie_to(const MarketId& neighbor) const {
    const auto it = neighbor_ties_.find(neighbor);
    if (it == neighbor_ties_.end()) throw UnknownNeighbor(network_.id + " has no tie to " + neighbor);
    return it->second;
}

BusId MarketAgent::boundary_bus(const MarketId& neighbor) const {
    const auto it = network_.boundary_map.find(neighbor);
    if (it == network_.boundary_map.end()) throw UnknownNeighbor(network_.id + " has no boundary toward " + neighbor);
    return it->second;
}

EdgeQuote MarketAgent::priced(EdgeQuote quote) const {
    quote.settlement_seq = settlement_seq_;
    quote.dispatch = solve_with_transaction(network_, quote.modification);
    if (!quote.dispatch.feasible) {
        quote.blocked = BlockReason::Dispatch;
        quote.weight = kInfinity;
        return quote;
    }
    quote.delta = quote.dispatch.total_cost - base_.total_cost;
    quote.weight = quote.delta + quote.transit + quote.line;
    return quote;
}

EdgeQuote MarketAgent::quote_outbound(const std::optional<MarketId>& prev, const MarketId& next,
                                      const Transaction& txn) const {
    const TieLine& tie = tie_to(next);
    const BusId out = boundary_bus(next);
    EdgeQuote quote;
    if (prev) {
        if (*prev == next) throw InvalidModel("route would turn back from " + next + " at " + network_.id);
        quote.role = Role::Intermediate;
        quote.modification = BoundaryModification::intermediate(boundary_bus(*prev), out, txn.p_tr);
        quote.transit = transit_charge(network_, txn.p_tr);
    } else {
        quote.role = Role::Source;
        quote.modification = BoundaryModification::source(txn.seller_bus, out, txn.p_tr);
    }
    quote.line = line_charge(tie, txn.p_tr);
    quote = priced(std::move(quote));
    if (quote.finite() && tie.residual(network_.id) < txn.p_tr - kCapacityTolerance) {
        quote.blocked = BlockReason::TieCapacity;
        quote.weight = kInfinity;
    }
    return quote;
}

EdgeQuote MarketAgent::absorption_cost(const MarketId& prev, BusId buyer_bus, double p_tr) const {
    EdgeQuote quote;
    quote.role = Role::Target;
    quote.modification = BoundaryModification::target(boundary_bus(prev), buyer_bus, p_tr);
    return priced(std::move(quote));
}

EdgeQuote MarketAgent::internal_cost(BusId seller_bus, BusId buyer_bus, double p_tr) const {
    EdgeQuote quote;
    quote.role = Role::Internal;
    quote.modification = BoundaryModification::internal(seller_bus, buyer_bus, p_tr);
    return priced(std::move(quote));
}

MarketAgent MarketAgent::commit_settlement(const EdgeQuote& quote, std::span<const TieUpdate> tie_updates) const {
    if (quote.settlement_seq != settlement_seq_) {
        throw StaleState("quote for " + network_.id + " was priced at settlement " +
                         std::to_string(quote.settlement_seq) + ", agent is at " + std::to_string(settlement_seq_));
    }
    if (!quote.finite()) throw InvalidModel("cannot settle a blocked quote in " + network_.id);
    MarketAgent next = *this;
    next.network_ = apply_modification(network_, quote.modification);
    next.base_ = quote.dispatch;
    next.apply_tie_updates(tie_updates);
    ++next.settlement_seq_;
    return next;
}

void MarketAgent::apply_tie_updates(std::span<const TieUpdate> updates) {
    for (const auto& u : updates) {
        if (u.from != network_.id && u.to != network_.id) continue;
        const auto& other = u.from == network_.id ? u.to : u.from;
        auto it = neighbor_ties_.find(other);
        if (it == neighbor_ties_.end()) throw UnknownNeighbor(network_.id + " has no tie to " + other);
        TieLine& tie = it->second;
        tie.scheduled += tie.market_a == u.from ? u.p_tr : -u.p_tr;
        if (std::abs(tie.scheduled) > tie.limit + kCapacityTolerance) {
            throw InvalidModel("tie " + tie.name() + " scheduled beyond its limit");
        }
    }
}

void MarketAgent::set_tie(const TieLine& tie) {
    if (!tie.touches(network_.id)) return;
    const auto& other = tie.other(network_.id);
    network_.boundary_map[other] = tie.market_a == network_.id ? tie.bus_a : tie.bus_b;
    neighbor_ties_.insert_or_assign(other, tie);
}

void MarketAgent::remove_tie(const MarketId& neighbor) {
    neighbor_ties_.erase(neighbor);
    network_.boundary_map.erase(neighbor);
}

std::size_t World::index_of(const MarketId& id) const {
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].id() == id) return i;
    }
    throw InvalidModel("unknown market " + id);
}

bool World::has_market(const MarketId& id) const {
    return std::any_of(agents.begin(), agents.end(), [&](const MarketAgent& a) { return a.id() == id; });
}

std::vector<MarketId> World::market_ids() const {
    std::vector<MarketId> ids;
    for (const auto& a : agents) ids.push_back(a.id());
    return ids;
}

std::vector<double> World::generation_costs() const {
    std::vector<double> costs;
    for (const auto& a : agents) costs.push_back(a.base().total_cost);
    return costs;
}

World build_world(std::vector<MarketNetwork> markets, std::vector<TieLine> ties) {
    std::set<MarketId> ids;
    for (const auto& m : markets) {
        validate_network(m);
        if (!ids.insert(m.id).second) throw InvalidModel("duplicate market " + m.id);
    }
    for (const auto& t : ties) {
        if (!(t.limit > 0.0)) throw InvalidModel("tie " + t.name() + " needs a positive limit");
        if (!(t.fee >= 0.0)) throw InvalidModel("tie " + t.name() + " has a negative fee");
        if (std::abs(t.scheduled) > t.limit) throw InvalidModel("tie " + t.name() + " scheduled beyond its limit");
    }
    if (const auto check = validate_market_graph(markets, ties); std::holds_alternative<CyclesFound>(check)) {
        std::string list;
        for (const auto& c : std::get<CyclesFound>(check).cycles) {
            list += " [";
            for (std::size_t i = 0; i < c.size(); ++i) list += (i ? "," : "") + c[i];
            list += "]";
        }
        throw InvalidModel("market graph has loops:" + list);
    }
    World world;
    for (auto& m : markets) world.agents.emplace_back(std::move(m), ties);
    world.ties = std::move(ties);
    world.initial_costs = world.generation_costs();
    return world;
}

}  // namespace powerroute
