#pragma once

// DC network model of a single regional market plus the inter-market tie graph.
//
// Every market is a lossless DC grid: branch flow = b * (theta_from - theta_to) * base_mva,
// with the lowest-numbered bus as angle reference. Tie lines are not part of any
// market's flow equations; they only carry power scheduled by settled transactions.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace powerroute {

using BusId = int;
using MarketId = std::string;

/// Flow above limit by more than this is an overload (MW).
inline constexpr double kOverloadTolerance = 1e-6;
/// Admissible nodal balance mismatch (MW).
inline constexpr double kBalanceTolerance = 1e-6;
inline constexpr double kDefaultBaseMva = 100.0;

struct Bus {
    BusId id = 0;
    double load = 0.0;  // MW

    friend bool operator==(const Bus&, const Bus&) = default;
};

struct Generator {
    std::string id;
    BusId bus = 0;
    double p_min = 0.0;
    double p_max = 0.0;
    double cost_c2 = 0.0;  // $/MW^2h
    double cost_c1 = 0.0;  // $/MWh
    double cost_c0 = 0.0;  // $/h

    double cost(double output) const { return (cost_c2 * output + cost_c1) * output + cost_c0; }

    friend bool operator==(const Generator&, const Generator&) = default;
};

struct Branch {
    BusId from_bus = 0;
    BusId to_bus = 0;
    double susceptance = 0.0;  // p.u.
    double limit = 0.0;        // MW

    friend bool operator==(const Branch&, const Branch&) = default;
};

struct MarketNetwork {
    MarketId id;
    double transit_fee = 0.0;  // $/MWh charged for power passing through
    double base_mva = kDefaultBaseMva;
    std::vector<Bus> buses;
    std::vector<Generator> generators;
    std::vector<Branch> branches;
    /// Neighbor market -> internal bus where the tie to that neighbor lands.
    std::map<MarketId, BusId> boundary_map;
    /// Minimum generator output per bus owed to buyers of settled sales (MW).
    std::map<BusId, double> committed_output;

    bool has_bus(BusId id) const;
    /// Position of a bus in `buses`. Throws InvalidModel for unknown ids.
    std::size_t bus_index(BusId id) const;
    BusId reference_bus() const;
    double total_load() const;
    double total_capacity() const;
    std::vector<double> loads() const;
    Bus& bus(BusId id);
    const Bus& bus(BusId id) const;

    friend bool operator==(const MarketNetwork&, const MarketNetwork&) = default;
};

/// Checks the per-type invariants of a market. Throws InvalidModel or DisconnectedGrid.
void validate_network(const MarketNetwork& network);

struct TieLine {
    MarketId market_a;
    BusId bus_a = 0;
    MarketId market_b;
    BusId bus_b = 0;
    double limit = 0.0;      // MW
    double fee = 0.0;        // $/MWh
    double scheduled = 0.0;  // MW committed, positive in the a -> b direction

    bool connects(const MarketId& x, const MarketId& y) const {
        return (market_a == x && market_b == y) || (market_a == y && market_b == x);
    }
    bool touches(const MarketId& m) const { return market_a == m || market_b == m; }
    const MarketId& other(const MarketId& m) const { return m == market_a ? market_b : market_a; }
    /// Capacity still available for power flowing out of `from` across this tie.
    double residual(const MarketId& from) const {
        return from == market_a ? limit - scheduled : limit + scheduled;
    }
    std::string name() const { return market_a + "-" + market_b; }

    friend bool operator==(const TieLine&, const TieLine&) = default;
};

struct DcFlowSolution {
    std::vector<double> angles;        // radians, one per bus in declaration order
    std::vector<double> branch_flows;  // MW, one per branch, positive from -> to

    friend bool operator==(const DcFlowSolution&, const DcFlowSolution&) = default;
};

/// Nodal susceptance matrix with the reference bus row and column removed.
/// Remaining rows follow bus declaration order.
Eigen::MatrixXd build_reduced_susceptance(const MarketNetwork& network);

/// Injections are MW per bus in declaration order and must sum to zero.
DcFlowSolution solve_dc_flow(const MarketNetwork& network, std::span<const double> injections);

/// Sensitivity of every branch flow to 1 MW injected at each bus and withdrawn at the
/// reference bus (branches x buses, MW/MW).
Eigen::MatrixXd injection_shift_factors(const MarketNetwork& network);

/// Largest |injection - net outflow| over all buses.
double nodal_balance_residual(const MarketNetwork& network, std::span<const double> injections,
                              const DcFlowSolution& solution);

struct LimitViolation {
    std::size_t branch = 0;  // index into network.branches
    double overload = 0.0;   // MW above limit

    friend bool operator==(const LimitViolation&, const LimitViolation&) = default;
};

std::vector<LimitViolation> check_limit_violations(const DcFlowSolution& solution,
                                                   const MarketNetwork& network);

struct LoopFree {};
struct CyclesFound {
    std::vector<std::vector<MarketId>> cycles;
};
using GraphCheck = std::variant<LoopFree, CyclesFound>;

/// Cycle check of the market-level graph. One cycle is reported per independent loop.
/// Throws DanglingTie when a tie names an unknown market or boundary bus.
GraphCheck validate_market_graph(const std::vector<MarketNetwork>& markets,
                                 const std::vector<TieLine>& ties);

}  // namespace powerroute
