#include "peermarket/matching.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace peermarket {

CoalitionOrder aggregate_coalition_order(const Coalition& c, const Session& session,
                                         std::size_t coalition_index) {
    if (c.empty())
        throw SimError(ErrorCode::InvalidSpec, "cannot aggregate an empty coalition");
    CoalitionOrder out;
    out.side = c.side;
    out.coalition_index = coalition_index;
    std::int64_t price_sum = 0;
    for (OrderRef m : c.members) {
        const Order& o = session.order(m);
        out.total_quantity += o.quantity;
        price_sum += o.limit_price;
        out.member_breakdown.emplace_back(m, o.quantity);
    }
    out.avg_price = PriceRatio(price_sum, static_cast<std::int64_t>(c.members.size()));
    return out;
}

std::vector<std::pair<OrderRef, Energy>>
allocate_to_members(Energy quantity, const CoalitionOrder& coalition) {
    const auto& members = coalition.member_breakdown;
    std::vector<std::pair<OrderRef, Energy>> out;
    out.reserve(members.size());
    if (members.size() == 1) {
        out.emplace_back(members[0].first, quantity);
        return out;
    }
    const __int128 total = coalition.total_quantity.milli;
    std::vector<std::int64_t> base(members.size());
    std::vector<__int128> remainder(members.size());
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const __int128 numer = static_cast<__int128>(quantity.milli) * members[i].second.milli;
        base[i] = static_cast<std::int64_t>(numer / total);
        remainder[i] = numer % total;
        assigned += base[i];
    }
    std::int64_t leftover = quantity.milli - assigned;
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&remainder](std::size_t a, std::size_t b) {
        return remainder[a] > remainder[b];
    });
    for (std::size_t k = 0; leftover > 0; ++k, --leftover)
        ++base[order[k]];
    for (std::size_t i = 0; i < members.size(); ++i)
        out.emplace_back(members[i].first, Energy::from_milli(base[i]));
    return out;
}

MatchReport match_coalitions(const std::vector<CoalitionOrder>& sells,
                             const std::vector<CoalitionOrder>& buys, int hour) {
    MatchReport report;
    report.hour = hour;
    for (const auto& s : sells)
        report.total_supply += s.total_quantity;
    for (const auto& b : buys)
        report.total_demand += b.total_quantity;

    // price-only priority, coalition index breaks ties
    std::vector<std::size_t> sell_order(sells.size());
    std::vector<std::size_t> buy_order(buys.size());
    std::iota(sell_order.begin(), sell_order.end(), 0);
    std::iota(buy_order.begin(), buy_order.end(), 0);
    std::stable_sort(sell_order.begin(), sell_order.end(), [&sells](std::size_t a, std::size_t b) {
        return sells[a].avg_price < sells[b].avg_price;
    });
    std::stable_sort(buy_order.begin(), buy_order.end(), [&buys](std::size_t a, std::size_t b) {
        return buys[b].avg_price < buys[a].avg_price;
    });

    std::vector<Energy> sell_left(sells.size());
    std::vector<Energy> buy_left(buys.size());
    for (std::size_t i = 0; i < sells.size(); ++i)
        sell_left[i] = sells[i].total_quantity;
    for (std::size_t i = 0; i < buys.size(); ++i)
        buy_left[i] = buys[i].total_quantity;

    std::size_t si = 0;
    std::size_t bi = 0;
    while (si < sell_order.size() && bi < buy_order.size()) {
        const std::size_t s = sell_order[si];
        const std::size_t b = buy_order[bi];
        if (sell_left[s].is_zero()) {
            ++si;
            continue;
        }
        if (buy_left[b].is_zero()) {
            ++bi;
            continue;
        }
        if (buys[b].avg_price < sells[s].avg_price)
            break; // best remaining pair is incompatible; nothing later can cross
        const Energy qty = min(sell_left[s], buy_left[b]);
        Transaction tx;
        tx.hour = hour;
        tx.sell_coalition = sells[s].coalition_index;
        tx.buy_coalition = buys[b].coalition_index;
        tx.quantity = qty;
        tx.unit_price = midpoint_price(sells[s].avg_price, buys[b].avg_price);
        tx.seller_allocations = allocate_to_members(qty, sells[s]);
        tx.buyer_allocations = allocate_to_members(qty, buys[b]);
        report.transactions.push_back(std::move(tx));
        report.total_matched += qty;
        sell_left[s] -= qty;
        buy_left[b] -= qty;
    }

    report.residual_supply = report.total_supply - report.total_matched;
    report.residual_demand = report.total_demand - report.total_matched;
    report.imbalance = Energy::from_milli(
        std::abs(report.residual_supply.milli - report.residual_demand.milli));
    return report;
}

std::map<OrderRef, Energy> committed_delivery(const std::vector<Transaction>& txs) {
    std::map<OrderRef, Energy> out;
    for (const Transaction& tx : txs)
        for (const auto& [ref, qty] : tx.seller_allocations)
            out[ref] += qty;
    return out;
}

std::vector<SettlementRecord> settle(const std::vector<Transaction>& txs,
                                     const std::map<OrderRef, Energy>& delivered,
                                     const Session& session) {
    for (const auto& [ref, qty] : delivered) {
        if (ref >= session.orders().size())
            throw SimError(ErrorCode::UnknownOrderInDelivery,
                           "delivery for unknown order ref " + std::to_string(ref));
        if (qty.milli < 0)
            throw SimError(ErrorCode::UnknownOrderInDelivery,
                           "negative delivery for order ref " + std::to_string(ref));
    }

    std::map<OrderRef, Energy> budget = delivered;
    std::vector<SettlementRecord> records;
    records.reserve(txs.size());
    for (std::size_t t = 0; t < txs.size(); ++t) {
        const Transaction& tx = txs[t];
        SettlementRecord rec;
        rec.transaction_index = t;
        rec.committed = tx.quantity;
        for (const auto& [ref, alloc] : tx.seller_allocations) {
            auto it = budget.find(ref);
            const Energy avail = it == budget.end() ? Energy{} : it->second;
            const Energy share = min(alloc, avail);
            if (it != budget.end())
                it->second -= share;
            rec.token_amount += tokens_for(tx.unit_price, share);
            rec.members.push_back({ref, alloc, share, share < alloc});
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::string serialize_match_report(const MatchReport& report, const Session& session) {
    (void)session;
    std::string out;
    out += "hour: " + std::to_string(report.hour) + "\n";
    out += "supply: " + format_energy(report.total_supply) + "\n";
    out += "demand: " + format_energy(report.total_demand) + "\n";
    out += "matched: " + format_energy(report.total_matched) + "\n";
    out += "residual_supply: " + format_energy(report.residual_supply) + "\n";
    out += "residual_demand: " + format_energy(report.residual_demand) + "\n";
    out += "imbalance: " + format_energy(report.imbalance) + "\n";
    for (const Transaction& tx : report.transactions) {
        std::string sellers;
        for (const auto& [ref, qty] : tx.seller_allocations) {
            if (!sellers.empty())
                sellers += ",";
            sellers += format_prosumer(session.order(ref).owner);
        }
        std::string buyers;
        for (const auto& [ref, qty] : tx.buyer_allocations) {
            if (!buyers.empty())
                buyers += ",";
            buyers += format_prosumer(session.order(ref).owner);
        }
        out += "tx: hour=" + std::to_string(tx.hour) + " sell=" + sellers + " buy=" + buyers +
               " kwh=" + format_energy(tx.quantity) + " price=" + std::to_string(tx.unit_price) +
               "\n";
    }
    return out;
}

} // namespace peermarket
