#pragma once

// First-in-first-serve settlement. Each transaction is routed against the world left by
// every earlier settlement; a denial leaves the world exactly as it was.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "powerroute/market_agent.hpp"
#include "powerroute/routing.hpp"

namespace powerroute {

/// Tolerance for the payment-sum audit ($/h).
inline constexpr double kPaymentTolerance = 1e-6;

enum class PaymentKind { Transit, Line, Congestion, SourceDelta, TargetDelta };

const char* to_string(PaymentKind kind);

struct PaymentItem {
    std::string payee;  // market id, or "A-B" for a tie
    PaymentKind kind = PaymentKind::Transit;
    double amount = 0.0;  // $/h

    friend bool operator==(const PaymentItem&, const PaymentItem&) = default;
};

struct Settlement {
    std::uint64_t transaction_id = 0;
    Transaction transaction;
    bool settled = false;
    std::optional<DenialReason> denial;
    std::vector<MarketId> route;
    double total_cost = 0.0;
    std::vector<PaymentItem> items;
    ConvergenceTrace trace;
    std::vector<double> market_costs;  // generation cost per market once this one is processed

    friend bool operator==(const Settlement&, const Settlement&) = default;
};

struct EngineOptions {
    /// 0 picks 2|V|, always enough for a loop-free graph.
    std::size_t max_sweeps = 0;
    /// Cross-check every route against oracle_enumerate; InternalMismatch on disagreement.
    bool oracle_check = false;
};

/// Routes and, when a route exists, commits one transaction. `world` is updated in place
/// only when the transaction settles.
Settlement settle_one(const Transaction& txn, World& world, const EngineOptions& options = {});

struct QueueResult {
    std::vector<Settlement> settlements;
    World world;
};

/// Processes transactions in ascending id order.
QueueResult process_queue(World world, std::vector<Transaction> transactions, const EngineOptions& options = {});

}  // namespace powerroute
