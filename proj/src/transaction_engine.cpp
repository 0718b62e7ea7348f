#include "powerroute/transaction_engine.hpp"

#include <algorithm>
#include <cmath>

#include "powerroute/errors.hpp"

namespace powerroute {

const char* to_string(PaymentKind kind) {
    switch (kind) {
        case PaymentKind::Transit: return "transit";
        case PaymentKind::Line: return "line";
        case PaymentKind::Congestion: return "congestion";
        case PaymentKind::SourceDelta: return "source_delta";
        case PaymentKind::TargetDelta: return "target_delta";
    }
    return "?";
}

namespace {

void cross_check(const World& world, const Transaction& txn, const RouteOutcome& protocol) {
    const RouteOutcome oracle = oracle_enumerate(world, txn);
    const auto* p = std::get_if<Route>(&protocol);
    const auto* o = std::get_if<Route>(&oracle);
    if (!p && !o) return;
    if (p && o && p->path == o->path && std::abs(p->total_cost - o->total_cost) <= kPaymentTolerance) return;
    const auto describe = [](const RouteOutcome& r) {
        if (const auto* route = std::get_if<Route>(&r)) {
            std::string s;
            for (const auto& m : route->path) s += (s.empty() ? "" : "-") + m;
            return s + " @ " + std::to_string(route->total_cost);
        }
        return std::string("denied (") + to_string(std::get<Denied>(r).reason) + ")";
    };
    throw InternalMismatch("transaction " + std::to_string(txn.id) + ": protocol " + describe(protocol) +
                           " vs oracle " + describe(oracle));
}

const TieLine& tie_between(const World& world, const MarketId& a, const MarketId& b) {
    return world.agent(a).tie_to(b);
}

}  // namespace

Settlement settle_one(const Transaction& txn, World& world, const EngineOptions& options) {
    Settlement out;
    out.transaction_id = txn.id;
    out.transaction = txn;

    const std::size_t max_sweeps = options.max_sweeps ? options.max_sweeps : 2 * std::max<std::size_t>(world.agents.size(), 1);
    ProtocolState state = route_transaction(world, txn, max_sweeps);
    const RouteOutcome outcome = extract_route(world, state);
    out.trace = state.trace;
    if (options.oracle_check) cross_check(world, txn, outcome);

    if (const auto* denied = std::get_if<Denied>(&outcome)) {
        out.denial = denied->reason;
        out.market_costs = world.generation_costs();
        return out;
    }
    const Route& route = std::get<Route>(outcome);
    const auto& path = route.path;

    std::vector<TieUpdate> tie_updates;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) tie_updates.push_back({path[k], path[k + 1], txn.p_tr});

    // Quotes come from the pricing round itself, so items are exactly what was routed on.
    std::vector<EdgeQuote> quotes;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const MarketAgent& agent = world.agent(path[k]);
        std::optional<MarketId> prev;
        if (k > 0) prev = path[k - 1];
        const EdgeQuote& quote = state.cache.outbound(agent, prev, path[k + 1], txn);
        const std::string tie = tie_between(world, path[k], path[k + 1]).name();
        if (k == 0) {
            out.items.push_back({path[k], PaymentKind::SourceDelta, quote.delta});
        } else {
            out.items.push_back({path[k], PaymentKind::Transit, quote.transit});
            out.items.push_back({path[k], PaymentKind::Congestion, quote.delta});
        }
        out.items.push_back({tie, PaymentKind::Line, quote.line});
        quotes.push_back(quote);
    }
    quotes.push_back(*state.terminal_quote);
    out.items.push_back({path.back(), path.size() == 1 ? PaymentKind::SourceDelta : PaymentKind::TargetDelta,
                         state.terminal_quote->delta});

    double sum = 0.0;
    for (const auto& item : out.items) sum += item.amount;
    if (std::abs(sum - route.total_cost) > kPaymentTolerance) {
        throw InternalMismatch("transaction " + std::to_string(txn.id) + ": payments sum to " + std::to_string(sum) +
                               " but route costs " + std::to_string(route.total_cost));
    }

    World next = world;
    for (std::size_t k = 0; k < path.size(); ++k) {
        MarketAgent& agent = next.agent(path[k]);
        agent = agent.commit_settlement(quotes[k], tie_updates);
    }
    for (const auto& u : tie_updates) {
        auto it = std::find_if(next.ties.begin(), next.ties.end(), [&](const TieLine& t) { return t.connects(u.from, u.to); });
        it->scheduled += it->market_a == u.from ? u.p_tr : -u.p_tr;
    }
    world = std::move(next);

    out.settled = true;
    out.route = path;
    out.total_cost = route.total_cost;
    out.market_costs = world.generation_costs();
    return out;
}

QueueResult process_queue(World world, std::vector<Transaction> transactions, const EngineOptions& options) {
    std::stable_sort(transactions.begin(), transactions.end(),
                     [](const Transaction& a, const Transaction& b) { return a.id < b.id; });
    QueueResult result;
    for (const auto& txn : transactions) result.settlements.push_back(settle_one(txn, world, options));
    result.world = std::move(world);
    return result;
}

}  // namespace powerroute
