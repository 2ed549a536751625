#pragma once

// Canonical text payloads stored in ledger blocks. Formatting is fixed
// (3-decimal kWh, integer Gwei, documented line order) so equal payloads
// hash identically and serialize(parse(x)) == x byte for byte.

#include <string>
#include <vector>

#include "peermarket/domain.hpp"
#include "peermarket/matching.hpp"

namespace peermarket {

struct SessionOpenPayload {
    std::uint64_t seed{0};
    std::vector<int> hours;
    std::size_t n_buyers{0};
    std::size_t n_sellers{0};
    Energy gamma;
    std::size_t pop_size{0};
    std::size_t iterations{0};
    double m{1.0};
    WeightScheme weight_scheme{WeightScheme::Uniform};
};

struct OrdersPayload {
    int hour{0};
    std::vector<std::pair<OrderRef, Order>> orders; // ascending ref
};

struct CoalitionsPayload {
    int hour{0};
    struct Entry {
        Side side{Side::Seller};
        std::size_t index{0};              // within its side
        std::vector<OrderRef> members;     // ascending
    };
    std::vector<Entry> coalitions; // sellers first, then buyers, index order
};

struct TransactionsPayload {
    int hour{0};
    std::vector<Transaction> transactions;
};

struct SettlementPayload {
    int hour{0};
    std::vector<SettlementRecord> records;
};

std::string serialize_payload(const SessionOpenPayload& p);
std::string serialize_payload(const OrdersPayload& p);
std::string serialize_payload(const CoalitionsPayload& p);
std::string serialize_payload(const TransactionsPayload& p);
std::string serialize_payload(const SettlementPayload& p);

SessionOpenPayload parse_session_open_payload(const std::string& text);
OrdersPayload parse_orders_payload(const std::string& text);
CoalitionsPayload parse_coalitions_payload(const std::string& text);
TransactionsPayload parse_transactions_payload(const std::string& text);
SettlementPayload parse_settlement_payload(const std::string& text);

const char* weight_scheme_name(WeightScheme s);
std::optional<WeightScheme> parse_weight_scheme(const std::string& name);

} // namespace peermarket
