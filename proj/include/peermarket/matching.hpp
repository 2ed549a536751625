#pragma once

// Coalition-level market clearing: aggregate each final coalition into one
// order, match seller against buyer coalitions greedily by price, allocate
// transaction quantities pro rata to members, and settle against delivered
// energy. All arithmetic is exact fixed-point / integer.

#include <map>
#include <string>
#include <vector>

#include "peermarket/domain.hpp"

namespace peermarket {

struct MatchReport {
    int hour{0};
    std::vector<Transaction> transactions;
    Energy total_supply;
    Energy total_demand;
    Energy total_matched;
    Energy residual_supply;  // supply - matched
    Energy residual_demand;  // demand - matched
    Energy imbalance;        // |residual_supply - residual_demand|
};

/// Eq-20 style aggregation: total quantity is the member sum, price the
/// arithmetic mean of member limit prices. Coalition must be non-empty and
/// duplicate-free.
CoalitionOrder aggregate_coalition_order(const Coalition& c, const Session& session,
                                         std::size_t coalition_index);

/// Greedy double auction over coalition orders: buys sorted descending and
/// sells ascending by average price (ties by coalition index), matched while
/// buy >= sell at the half-up midpoint price, partial fills carried forward.
/// Also fills per-member allocations of every transaction.
MatchReport match_coalitions(const std::vector<CoalitionOrder>& sells,
                             const std::vector<CoalitionOrder>& buys, int hour);

/// Pro-rata split of `quantity` over the coalition's members by their order
/// quantities, largest-remainder rounded to milli-kWh; earlier members win
/// remainder ties. Sums exactly to `quantity`.
std::vector<std::pair<OrderRef, Energy>>
allocate_to_members(Energy quantity, const CoalitionOrder& coalition);

/// Settles the seller side of each transaction: a member's delivered budget
/// is consumed by its allocations in transaction order, tokens accrue as
/// unit_price x min(allocated, delivered share) rounded half-up per member.
/// The map is authoritative; a committed order absent from it delivered
/// nothing. Keys must be valid session orders.
std::vector<SettlementRecord> settle(const std::vector<Transaction>& txs,
                                     const std::map<OrderRef, Energy>& delivered,
                                     const Session& session);

/// delivered == committed map for the given transactions (per seller order,
/// summed across its allocations).
std::map<OrderRef, Energy> committed_delivery(const std::vector<Transaction>& txs);

/// One line per transaction: hour, seller members, buyer members, kWh, price.
std::string serialize_match_report(const MatchReport& report, const Session& session);

} // namespace peermarket
