#pragma once

// Economic dispatch of one market and the prices a market charges for a transaction.
//
// A transaction edits the market's boundary loads depending on the market's role:
//   Source        seller-bus output >= p_tr,   out_bus load += p_tr
//   Intermediate  in_bus load -= p_tr,         out_bus load += p_tr
//   Target        in_bus load -= p_tr,         buyer_bus load += p_tr
//   Internal      seller-bus output >= p_tr,   buyer_bus load += p_tr  (seller and buyer share a market)
// and the market's price for it is the change in its minimum generation cost.

#include <cstddef>
#include <optional>
#include <vector>

#include "powerroute/grid_model.hpp"

namespace powerroute {

enum class Role { Source, Intermediate, Target, Internal };

const char* to_string(Role role);

struct BoundaryModification {
    Role role = Role::Intermediate;
    double p_tr = 0.0;
    std::optional<BusId> in_bus;
    std::optional<BusId> out_bus;
    std::optional<BusId> seller_bus;
    std::optional<BusId> buyer_bus;

    static BoundaryModification source(BusId seller, BusId out, double p_tr);
    static BoundaryModification intermediate(BusId in, BusId out, double p_tr);
    static BoundaryModification target(BusId in, BusId buyer, double p_tr);
    static BoundaryModification internal(BusId seller, BusId buyer, double p_tr);

    friend bool operator==(const BoundaryModification&, const BoundaryModification&) = default;
};

/// Throws InvalidModel if the fields do not match the role or name unknown buses.
void validate_modification(const MarketNetwork& network, const BoundaryModification& mod);

/// The market as it looks once the transaction is in place: edited loads plus the
/// seller's output commitment.
MarketNetwork apply_modification(const MarketNetwork& network, const BoundaryModification& mod);

struct DispatchResult {
    bool feasible = false;
    std::vector<double> outputs;  // MW per generator, declaration order
    double total_cost = 0.0;      // $/h, meaningful only when feasible
    DcFlowSolution flow_solution;
    std::vector<std::size_t> binding_branches;  // branch indices at their limit

    friend bool operator==(const DispatchResult&, const DispatchResult&) = default;
};

/// Least-cost dispatch for the loads and output commitments currently in `network`.
DispatchResult solve_base_dispatch(const MarketNetwork& network);

DispatchResult solve_with_transaction(const MarketNetwork& network, const BoundaryModification& mod);

/// Net injection per bus (generation minus load) implied by a dispatch.
std::vector<double> dispatch_injections(const MarketNetwork& network, const DispatchResult& result);

/// Extra generation cost a pass-through transaction causes. nullopt when the market cannot
/// carry it. May be negative when the transit relieves an already congested base case.
std::optional<double> congestion_fee(const MarketNetwork& network, const BoundaryModification& mod,
                                     const DispatchResult& base);

/// Re-dispatch cost of exporting (Source), absorbing (Target) or trading internally.
std::optional<double> role_delta(const MarketNetwork& network, const BoundaryModification& mod,
                                 const DispatchResult& base);

inline double transit_charge(const MarketNetwork& network, double p_tr) { return network.transit_fee * p_tr; }
inline double line_charge(const TieLine& tie, double p_tr) { return tie.fee * p_tr; }

}  // namespace powerroute
