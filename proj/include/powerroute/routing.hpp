#pragma once

// Path-vector Bellman-Ford over market agents.
//
// Each market keeps one RouteEntry per transaction: the cheapest known cost of delivering
// the transaction INTO that market (its own traversal not yet charged) and the market path
// that achieves it. Relaxation sweeps visit markets in declaration order; a market with a
// finite entry prices every outbound hop with its own agent and sends the result to the
// neighbor as an Advertisement. Receivers relax immediately, so improvements propagate
// within a sweep. Paths are carried in full, so an advertisement whose path already holds
// the receiver is refused; this is what prevents count-to-infinity after a tie disappears.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <variant>
#include <vector>

#include "powerroute/market_agent.hpp"

namespace powerroute {

/// An advert must beat the incumbent by more than this to replace it ($/h).
inline constexpr double kImprovementThreshold = 1e-9;

struct RouteEntry {
    MarketId source_market;
    double distance = kInfinity;
    std::vector<MarketId> path;  // source ... owner, empty while the distance is infinite
    bool stale = false;

    bool finite() const { return distance < kInfinity; }

    friend bool operator==(const RouteEntry&, const RouteEntry&) = default;
};

struct Advertisement {
    MarketId from_market;
    MarketId to_market;
    MarketId source_market;
    double offered_distance = 0.0;  // delivered into to_market
    std::vector<MarketId> path;     // ends at from_market
    std::uint64_t transaction_id = 0;
};

enum class AdvertVerdict { Accepted, LoopGuard, NotCheaper };

struct AdvertOutcome {
    AdvertVerdict verdict = AdvertVerdict::NotCheaper;
    RouteEntry entry;  // the receiver's entry after the advert was handled
};

AdvertOutcome evaluate_advert(const MarketId& receiver, const RouteEntry& current, const Advertisement& advert);

struct TraceRow {
    std::size_t iteration = 0;      // 1 is the initialization
    std::vector<double> distances;  // one per market, declaration order
    bool changed = false;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct ConvergenceTrace {
    std::vector<MarketId> markets;
    std::vector<TraceRow> rows;
    std::size_t sweeps = 0;  // relaxation sweeps run, the final confirming one included

    /// Sweeps that changed at least one entry.
    std::size_t improving_sweeps() const;

    friend bool operator==(const ConvergenceTrace&, const ConvergenceTrace&) = default;
};

/// Memoized hop quotes for one pricing round. Keyed by (market, previous hop, next hop).
class QuoteCache {
public:
    const EdgeQuote& outbound(const MarketAgent& agent, const std::optional<MarketId>& prev,
                              const MarketId& next, const Transaction& txn);
    void clear() { quotes_.clear(); }
    std::size_t size() const { return quotes_.size(); }

private:
    std::map<std::tuple<MarketId, std::optional<MarketId>, MarketId>, EdgeQuote> quotes_;
};

/// Routing state of one transaction.
struct ProtocolState {
    Transaction transaction;
    std::vector<RouteEntry> tables;  // indexed like World::agents
    ConvergenceTrace trace;
    QuoteCache cache;
    bool source_infeasible = false;
    std::size_t blocked_by_capacity = 0;
    std::size_t blocked_by_dispatch = 0;
    std::size_t adverts_sent = 0;
    /// Target absorption (or internal trade) quote computed by extract_route.
    std::optional<EdgeQuote> terminal_quote;
};

/// Step 1 of the protocol: the source prices each outbound tie, its neighbors receive
/// finite distances, every other market starts at infinity. Requires a loop-free world.
ProtocolState init_tables(const World& world, const Transaction& txn);

/// One relaxation pass in declaration order. Appends a trace row; returns whether any
/// entry changed.
bool sweep(const World& world, ProtocolState& state);

/// Sweeps until one reports no change. Throws InvalidModel if max_sweeps < |V| and
/// NonConvergence if the budget runs out.
void run_until_converged(const World& world, ProtocolState& state, std::size_t max_sweeps);

ProtocolState route_transaction(const World& world, const Transaction& txn, std::size_t max_sweeps);

struct Route {
    std::vector<MarketId> path;
    double total_cost = 0.0;

    friend bool operator==(const Route&, const Route&) = default;
};

enum class DenialReason { SourceInfeasible, NoRoute, TargetInfeasible, TieCapacity };

const char* to_string(DenialReason reason);

struct Denied {
    DenialReason reason = DenialReason::NoRoute;

    friend bool operator==(const Denied&, const Denied&) = default;
};

using RouteOutcome = std::variant<Route, Denied>;

/// Step 4: the target's distance plus its own absorption cost.
RouteOutcome extract_route(const World& world, ProtocolState& state);

struct TieChange {
    enum class Kind { Remove, Resize, Restore };
    Kind kind = Kind::Remove;
    MarketId market_a;
    MarketId market_b;
    double new_limit = 0.0;     // Resize
    std::optional<TieLine> tie; // Restore

    static TieChange remove(MarketId a, MarketId b) { return {Kind::Remove, std::move(a), std::move(b), 0.0, {}}; }
    static TieChange resize(MarketId a, MarketId b, double limit) { return {Kind::Resize, std::move(a), std::move(b), limit, {}}; }
    static TieChange restore(TieLine t) { return {Kind::Restore, t.market_a, t.market_b, 0.0, std::move(t)}; }
};

/// Applies a topology change to `world`, resets every entry whose path crosses the tie and
/// re-converges. Returns the trace of the re-convergence only.
ConvergenceTrace handle_tie_change(World& world, ProtocolState& state, const TieChange& change,
                                   std::size_t max_sweeps);

/// Prices every simple market path directly with the dispatch and fee operations (no
/// agent or protocol code involved) and returns the cheapest. Ties go to fewer hops, then
/// lexicographically smaller paths. Exponential in the number of markets; meant for
/// cross-checking small scenarios.
RouteOutcome oracle_enumerate(const World& world, const Transaction& txn);

/// True for paths without a repeated market.
bool is_loop_free(const std::vector<MarketId>& path);

}  // namespace powerroute
