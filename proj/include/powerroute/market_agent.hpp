#pragma once

// A market's energy management system acting as a routing agent. An agent answers price
// queries from its own network and base dispatch only; it learns about other markets
// exclusively through advertisements handled by the routing protocol.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "powerroute/dc_opf.hpp"
#include "powerroute/grid_model.hpp"

namespace powerroute {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
/// Slack allowed when comparing transaction power against tie residual capacity (MW).
inline constexpr double kCapacityTolerance = 1e-9;

struct Transaction {
    std::uint64_t id = 0;
    MarketId seller_market;
    BusId seller_bus = 0;
    MarketId buyer_market;
    BusId buyer_bus = 0;
    double p_tr = 0.0;  // MW

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

enum class BlockReason { None, TieCapacity, Dispatch };

/// Price of one hop as seen by the market quoting it, with everything needed to settle it.
struct EdgeQuote {
    double weight = kInfinity;  // $/h, +inf when blocked
    BlockReason blocked = BlockReason::None;
    Role role = Role::Intermediate;
    double delta = 0.0;    // source/target/internal re-dispatch delta or congestion fee
    double transit = 0.0;  // pass-through fee (intermediates only)
    double line = 0.0;     // fee of the outbound tie (zero for target and internal quotes)
    BoundaryModification modification;
    DispatchResult dispatch;  // with-transaction dispatch; empty when blocked
    std::uint64_t settlement_seq = 0;

    bool finite() const { return blocked == BlockReason::None; }
};

struct TieUpdate {
    MarketId from;
    MarketId to;
    double p_tr = 0.0;
};

class MarketAgent {
public:
    /// Solves the base dispatch; throws InvalidModel if the market cannot serve its own load.
    MarketAgent(MarketNetwork network, std::vector<TieLine> ties);

    const MarketId& id() const { return network_.id; }
    const MarketNetwork& network() const { return network_; }
    const DispatchResult& base() const { return base_; }
    std::uint64_t settlement_seq() const { return settlement_seq_; }
    const std::map<MarketId, TieLine>& neighbor_ties() const { return neighbor_ties_; }
    bool is_neighbor(const MarketId& m) const { return neighbor_ties_.contains(m); }

    const TieLine& tie_to(const MarketId& neighbor) const;
    BusId boundary_bus(const MarketId& neighbor) const;

    /// Cost of moving the transaction out of this market toward `next`. `prev` is empty
    /// iff this market hosts the seller.
    EdgeQuote quote_outbound(const std::optional<MarketId>& prev, const MarketId& next,
                             const Transaction& txn) const;
    double outbound_weight(const std::optional<MarketId>& prev, const MarketId& next,
                           const Transaction& txn) const {
        return quote_outbound(prev, next, txn).weight;
    }

    /// Target-side re-dispatch cost of taking the power in from `prev` and delivering it
    /// to `buyer_bus`.
    EdgeQuote absorption_cost(const MarketId& prev, BusId buyer_bus, double p_tr) const;

    /// Seller and buyer both inside this market.
    EdgeQuote internal_cost(BusId seller_bus, BusId buyer_bus, double p_tr) const;

    /// Makes a priced transaction permanent: the quote's dispatch becomes the new base and
    /// its boundary edits stay in the network. StaleState if the quote predates the
    /// agent's latest settlement.
    MarketAgent commit_settlement(const EdgeQuote& quote, std::span<const TieUpdate> tie_updates) const;

    void apply_tie_updates(std::span<const TieUpdate> updates);
    void set_tie(const TieLine& tie);
    void remove_tie(const MarketId& neighbor);

    friend bool operator==(const MarketAgent&, const MarketAgent&) = default;

private:
    EdgeQuote priced(EdgeQuote quote) const;

    MarketNetwork network_;
    DispatchResult base_;
    std::map<MarketId, TieLine> neighbor_ties_;
    std::uint64_t settlement_seq_ = 0;
};

/// All agents plus the shared tie list. Agent order is the scenario declaration order.
struct World {
    std::vector<MarketAgent> agents;
    std::vector<TieLine> ties;
    std::vector<double> initial_costs;

    std::size_t index_of(const MarketId& id) const;
    const MarketAgent& agent(const MarketId& id) const { return agents[index_of(id)]; }
    MarketAgent& agent(const MarketId& id) { return agents[index_of(id)]; }
    bool has_market(const MarketId& id) const;
    std::vector<MarketId> market_ids() const;
    std::vector<double> generation_costs() const;

    friend bool operator==(const World&, const World&) = default;
};

/// Validates every network and the tie graph (loop-free required), then solves each base
/// dispatch.
World build_world(std::vector<MarketNetwork> markets, std::vector<TieLine> ties);

}  // namespace powerroute
