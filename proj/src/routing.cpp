#include "powerroute/routing.hpp"

#include <algorithm>
#include <cassert>
#include <set>

#include "powerroute/errors.hpp"

namespace powerroute {

bool is_loop_free(const std::vector<MarketId>& path) {
    std::set<MarketId> seen;
    for (const auto& m : path) {
        if (!seen.insert(m).second) return false;
    }
    return true;
}

const char* to_string(DenialReason reason) {
    switch (reason) {
        case DenialReason::SourceInfeasible: return "SourceInfeasible";
        case DenialReason::NoRoute: return "NoRoute";
        case DenialReason::TargetInfeasible: return "TargetInfeasible";
        case DenialReason::TieCapacity: return "TieCapacity";
    }
    return "?";
}

std::size_t ConvergenceTrace::improving_sweeps() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const TraceRow& r) { return r.iteration > 1 && r.changed; }));
}

AdvertOutcome evaluate_advert(const MarketId& receiver, const RouteEntry& current, const Advertisement& advert) {
    if (std::find(advert.path.begin(), advert.path.end(), receiver) != advert.path.end()) {
        return {AdvertVerdict::LoopGuard, current};
    }
    if (!(advert.offered_distance < current.distance - kImprovementThreshold)) {
        return {AdvertVerdict::NotCheaper, current};
    }
    RouteEntry next;
    next.source_market = advert.source_market;
    next.distance = advert.offered_distance;
    next.path = advert.path;
    next.path.push_back(receiver);
    return {AdvertVerdict::Accepted, std::move(next)};
}

const EdgeQuote& QuoteCache::outbound(const MarketAgent& agent, const std::optional<MarketId>& prev,
                                      const MarketId& next, const Transaction& txn) {
    auto key = std::make_tuple(agent.id(), prev, next);
    auto it = quotes_.find(key);
    if (it == quotes_.end()) it = quotes_.emplace(std::move(key), agent.quote_outbound(prev, next, txn)).first;
    return it->second;
}

namespace {

void require_loop_free(const World& world) {
    std::vector<MarketNetwork> networks;
    networks.reserve(world.agents.size());
    for (const auto& a : world.agents) networks.push_back(a.network());
    if (std::holds_alternative<CyclesFound>(validate_market_graph(networks, world.ties))) {
        throw InvalidModel("routing requires a loop-free market graph");
    }
}

void check_transaction(const World& world, const Transaction& txn) {
    if (!world.has_market(txn.seller_market)) throw InvalidModel("unknown seller market " + txn.seller_market);
    if (!world.has_market(txn.buyer_market)) throw InvalidModel("unknown buyer market " + txn.buyer_market);
    if (!world.agent(txn.seller_market).network().has_bus(txn.seller_bus)) {
        throw InvalidModel("seller bus " + std::to_string(txn.seller_bus) + " not in " + txn.seller_market);
    }
    if (!world.agent(txn.buyer_market).network().has_bus(txn.buyer_bus)) {
        throw InvalidModel("buyer bus " + std::to_string(txn.buyer_bus) + " not in " + txn.buyer_market);
    }
    if (!(txn.p_tr >= 0.0)) throw InvalidModel("negative transaction power");
}

void record_row(ProtocolState& state, bool changed) {
    TraceRow row;
    row.iteration = state.trace.rows.size() + 1;
    row.changed = changed;
    for (const auto& e : state.tables) row.distances.push_back(e.distance);
    state.trace.rows.push_back(std::move(row));
}

/// One market's turn: price every outbound hop and hand the adverts to the receivers.
bool advertise_from(const World& world, ProtocolState& state, std::size_t index) {
    const RouteEntry entry = state.tables[index];
    if (!entry.finite()) return false;
    const MarketAgent& agent = world.agents[index];
    std::optional<MarketId> prev;
    if (entry.path.size() >= 2) prev = entry.path[entry.path.size() - 2];

    bool changed = false;
    for (const auto& [neighbor, tie] : agent.neighbor_ties()) {
        if (std::find(entry.path.begin(), entry.path.end(), neighbor) != entry.path.end()) continue;
        const EdgeQuote& quote = state.cache.outbound(agent, prev, neighbor, state.transaction);
        if (!quote.finite()) {
            ++(quote.blocked == BlockReason::TieCapacity ? state.blocked_by_capacity : state.blocked_by_dispatch);
            continue;
        }
        Advertisement advert{agent.id(), neighbor, state.transaction.seller_market,
                             entry.distance + quote.weight, entry.path, state.transaction.id};
        ++state.adverts_sent;
        const std::size_t receiver = world.index_of(neighbor);
        AdvertOutcome outcome = evaluate_advert(neighbor, state.tables[receiver], advert);
        if (outcome.verdict == AdvertVerdict::Accepted) {
            assert(is_loop_free(outcome.entry.path));
            state.tables[receiver] = std::move(outcome.entry);
            changed = true;
        }
    }
    return changed;
}

/// A source is infeasible when it has ties but cannot re-dispatch for any of them.
bool source_cannot_export(const World& world, ProtocolState& state) {
    const MarketAgent& source = world.agent(state.transaction.seller_market);
    if (source.neighbor_ties().empty()) return false;
    return std::all_of(source.neighbor_ties().begin(), source.neighbor_ties().end(), [&](const auto& kv) {
        return state.cache.outbound(source, std::nullopt, kv.first, state.transaction).blocked == BlockReason::Dispatch;
    });
}

}  // namespace

ProtocolState init_tables(const World& world, const Transaction& txn) {
    require_loop_free(world);
    check_transaction(world, txn);

    ProtocolState state;
    state.transaction = txn;
    state.trace.markets = world.market_ids();
    state.tables.assign(world.agents.size(), RouteEntry{txn.seller_market, kInfinity, {}, false});
    const std::size_t source = world.index_of(txn.seller_market);
    state.tables[source].distance = 0.0;
    state.tables[source].path = {txn.seller_market};

    if (txn.seller_market != txn.buyer_market) {
        state.source_infeasible = source_cannot_export(world, state);
        if (!state.source_infeasible) advertise_from(world, state, source);
    }
    record_row(state, true);
    return state;
}

bool sweep(const World& world, ProtocolState& state) {
    bool changed = false;
    if (!state.source_infeasible) {
        for (std::size_t i = 0; i < world.agents.size(); ++i) changed = advertise_from(world, state, i) || changed;
    }
    ++state.trace.sweeps;
    record_row(state, changed);
    return changed;
}

void run_until_converged(const World& world, ProtocolState& state, std::size_t max_sweeps) {
    if (max_sweeps < world.agents.size()) {
        throw InvalidModel("sweep budget " + std::to_string(max_sweeps) + " is below the market count " +
                           std::to_string(world.agents.size()));
    }
    if (state.source_infeasible) return;
    for (std::size_t s = 0; s < max_sweeps; ++s) {
        if (!sweep(world, state)) return;
    }
    throw NonConvergence("no fixed point after " + std::to_string(max_sweeps) + " sweeps for transaction " +
                         std::to_string(state.transaction.id));
}

ProtocolState route_transaction(const World& world, const Transaction& txn, std::size_t max_sweeps) {
    ProtocolState state = init_tables(world, txn);
    run_until_converged(world, state, max_sweeps);
    return state;
}

RouteOutcome extract_route(const World& world, ProtocolState& state) {
    const Transaction& txn = state.transaction;
    const MarketAgent& target = world.agent(txn.buyer_market);
    state.terminal_quote.reset();

    if (txn.seller_market == txn.buyer_market) {
        EdgeQuote quote = target.internal_cost(txn.seller_bus, txn.buyer_bus, txn.p_tr);
        if (!quote.finite()) return Denied{DenialReason::SourceInfeasible};
        const double cost = quote.weight;
        state.terminal_quote = std::move(quote);
        return Route{{txn.seller_market}, cost};
    }
    if (state.source_infeasible) return Denied{DenialReason::SourceInfeasible};

    const RouteEntry& entry = state.tables[world.index_of(txn.buyer_market)];
    if (!entry.finite()) {
        const bool capacity_only = state.blocked_by_capacity > 0 && state.blocked_by_dispatch == 0;
        return Denied{capacity_only ? DenialReason::TieCapacity : DenialReason::NoRoute};
    }
    const MarketId& prev = entry.path[entry.path.size() - 2];
    EdgeQuote quote = target.absorption_cost(prev, txn.buyer_bus, txn.p_tr);
    if (!quote.finite()) return Denied{DenialReason::TargetInfeasible};
    const double cost = entry.distance + quote.weight;
    state.terminal_quote = std::move(quote);
    return Route{entry.path, cost};
}

namespace {

bool uses_tie(const std::vector<MarketId>& path, const MarketId& a, const MarketId& b) {
    for (std::size_t i = 1; i < path.size(); ++i) {
        if ((path[i - 1] == a && path[i] == b) || (path[i - 1] == b && path[i] == a)) return true;
    }
    return false;
}

void apply_change(World& world, const TieChange& change) {
    auto it = std::find_if(world.ties.begin(), world.ties.end(),
                           [&](const TieLine& t) { return t.connects(change.market_a, change.market_b); });
    switch (change.kind) {
        case TieChange::Kind::Remove:
            if (it == world.ties.end()) throw UnknownNeighbor("no tie " + change.market_a + "-" + change.market_b);
            world.ties.erase(it);
            world.agent(change.market_a).remove_tie(change.market_b);
            world.agent(change.market_b).remove_tie(change.market_a);
            break;
        case TieChange::Kind::Resize:
            if (it == world.ties.end()) throw UnknownNeighbor("no tie " + change.market_a + "-" + change.market_b);
            if (!(change.new_limit > 0.0) || std::abs(it->scheduled) > change.new_limit) {
                throw InvalidModel("tie " + it->name() + " cannot be resized below its schedule");
            }
            it->limit = change.new_limit;
            world.agent(change.market_a).set_tie(*it);
            world.agent(change.market_b).set_tie(*it);
            break;
        case TieChange::Kind::Restore: {
            if (!change.tie) throw InvalidModel("restore needs the tie definition");
            if (it != world.ties.end()) throw InvalidModel("tie " + it->name() + " already present");
            World candidate = world;
            candidate.ties.push_back(*change.tie);
            candidate.agent(change.tie->market_a).set_tie(*change.tie);
            candidate.agent(change.tie->market_b).set_tie(*change.tie);
            require_loop_free(candidate);
            world = std::move(candidate);
            break;
        }
    }
}

}  // namespace

ConvergenceTrace handle_tie_change(World& world, ProtocolState& state, const TieChange& change,
                                   std::size_t max_sweeps) {
    apply_change(world, change);
    for (auto& entry : state.tables) {
        if (entry.finite() && uses_tie(entry.path, change.market_a, change.market_b)) {
            entry.distance = kInfinity;
            entry.path.clear();
            entry.stale = true;
        }
    }
    state.cache.clear();
    state.blocked_by_capacity = 0;
    state.blocked_by_dispatch = 0;
    state.terminal_quote.reset();
    if (state.transaction.seller_market != state.transaction.buyer_market) {
        state.source_infeasible = source_cannot_export(world, state);
    }
    state.trace = ConvergenceTrace{};
    state.trace.markets = world.market_ids();
    record_row(state, true);
    run_until_converged(world, state, max_sweeps);
    return state.trace;
}

namespace {

struct PricedPath {
    std::vector<MarketId> path;
    double cost = kInfinity;
    bool capacity_blocked = false;
    bool source_blocked = false;
    bool target_blocked = false;
};

PricedPath price_path(const World& world, const Transaction& txn, const std::vector<MarketId>& path) {
    PricedPath out{path};
    const auto tie_between = [&](const MarketId& a, const MarketId& b) -> const TieLine& {
        return *std::find_if(world.ties.begin(), world.ties.end(), [&](const TieLine& t) { return t.connects(a, b); });
    };
    const auto boundary = [&](const MarketId& m, const MarketId& toward) {
        return world.agent(m).network().boundary_map.at(toward);
    };

    double cost = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const MarketAgent& agent = world.agent(path[k]);
        const TieLine& tie = tie_between(path[k], path[k + 1]);
        std::optional<double> delta;
        double transit = 0.0;
        if (k == 0) {
            delta = role_delta(agent.network(),
                               BoundaryModification::source(txn.seller_bus, boundary(path[0], path[1]), txn.p_tr),
                               agent.base());
            if (!delta) out.source_blocked = true;
        } else {
            delta = congestion_fee(agent.network(),
                                   BoundaryModification::intermediate(boundary(path[k], path[k - 1]),
                                                                      boundary(path[k], path[k + 1]), txn.p_tr),
                                   agent.base());
            transit = transit_charge(agent.network(), txn.p_tr);
        }
        if (!delta) return out;
        if (tie.residual(path[k]) < txn.p_tr - kCapacityTolerance) {
            out.capacity_blocked = true;
            return out;
        }
        cost = cost + (*delta + transit + line_charge(tie, txn.p_tr));
    }
    const MarketAgent& target = world.agent(path.back());
    const auto absorb = role_delta(
        target.network(),
        BoundaryModification::target(boundary(path.back(), path[path.size() - 2]), txn.buyer_bus, txn.p_tr),
        target.base());
    if (!absorb) {
        out.target_blocked = true;
        return out;
    }
    out.cost = cost + *absorb;
    return out;
}

bool better(const PricedPath& a, const PricedPath& b) {
    if (a.cost < b.cost - kImprovementThreshold) return true;
    if (b.cost < a.cost - kImprovementThreshold) return false;
    if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
    return a.path < b.path;
}

}  // namespace

RouteOutcome oracle_enumerate(const World& world, const Transaction& txn) {
    check_transaction(world, txn);
    if (txn.seller_market == txn.buyer_market) {
        const MarketAgent& agent = world.agent(txn.seller_market);
        const auto delta = role_delta(
            agent.network(), BoundaryModification::internal(txn.seller_bus, txn.buyer_bus, txn.p_tr), agent.base());
        if (!delta) return Denied{DenialReason::SourceInfeasible};
        return Route{{txn.seller_market}, *delta};
    }

    std::map<MarketId, std::vector<MarketId>> adjacency;
    for (const auto& t : world.ties) {
        adjacency[t.market_a].push_back(t.market_b);
        adjacency[t.market_b].push_back(t.market_a);
    }
    std::vector<std::vector<MarketId>> paths;
    std::vector<MarketId> current{txn.seller_market};
    const auto dfs = [&](auto&& self) -> void {
        if (current.back() == txn.buyer_market) {
            paths.push_back(current);
            return;
        }
        for (const auto& next : adjacency[current.back()]) {
            if (std::find(current.begin(), current.end(), next) != current.end()) continue;
            current.push_back(next);
            self(self);
            current.pop_back();
        }
    };
    dfs(dfs);

    std::optional<PricedPath> best;
    bool any_capacity = false, all_source = !paths.empty(), any_target = false, any_dispatch = false;
    for (const auto& p : paths) {
        PricedPath priced = price_path(world, txn, p);
        any_capacity = any_capacity || priced.capacity_blocked;
        any_target = any_target || priced.target_blocked;
        all_source = all_source && priced.source_blocked;
        const bool finite = priced.cost < kInfinity;
        any_dispatch = any_dispatch || (!finite && !priced.capacity_blocked);
        if (finite && (!best || better(priced, *best))) best = std::move(priced);
    }
    if (best) return Route{best->path, best->cost};
    if (all_source) return Denied{DenialReason::SourceInfeasible};
    if (any_target) return Denied{DenialReason::TargetInfeasible};
    if (any_capacity && !any_dispatch) return Denied{DenialReason::TieCapacity};
    return Denied{DenialReason::NoRoute};
}

}  // namespace powerroute
