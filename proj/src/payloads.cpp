#include "peermarket/payloads.hpp"

#include <cstdio>
#include <sstream>

namespace peermarket {

const char* weight_scheme_name(WeightScheme s) {
    return s == WeightScheme::Uniform ? "uniform" : "promoted";
}

std::optional<WeightScheme> parse_weight_scheme(const std::string& name) {
    if (name == "uniform")
        return WeightScheme::Uniform;
    if (name == "promoted")
        return WeightScheme::RelationPromoted;
    return std::nullopt;
}

namespace {

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

[[noreturn]] void bad_payload(const std::string& why) {
    throw SimError(ErrorCode::MalformedInput, "payload: " + why);
}

/// Splits "key: rest" lines; blank lines are not produced by serializers and
/// are rejected.
std::vector<std::pair<std::string, std::string>> payload_lines(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(": ");
        if (colon == std::string::npos)
            bad_payload("line without key: '" + line + "'");
        out.emplace_back(line.substr(0, colon), line.substr(colon + 2));
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

} // namespace

std::string serialize_payload(const SessionOpenPayload& p) {
    std::string out;
    out += "gamma: " + format_energy(p.gamma) + "\n";
    std::string hours;
    for (int h : p.hours)
        hours += (hours.empty() ? "" : " ") + std::to_string(h);
    out += "hours: " + hours + "\n";
    out += "iterations: " + std::to_string(p.iterations) + "\n";
    out += "m: " + format_double(p.m) + "\n";
    out += "n_buyers: " + std::to_string(p.n_buyers) + "\n";
    out += "n_sellers: " + std::to_string(p.n_sellers) + "\n";
    out += "pop_size: " + std::to_string(p.pop_size) + "\n";
    out += "seed: " + std::to_string(p.seed) + "\n";
    out += "weight_scheme: " + std::string(weight_scheme_name(p.weight_scheme)) + "\n";
    return out;
}

std::string serialize_payload(const OrdersPayload& p) {
    std::string out = "hour: " + std::to_string(p.hour) + "\n";
    for (const auto& [ref, o] : p.orders) {
        out += "order: " + std::to_string(ref) + " " + format_prosumer(o.owner) + " " +
               format_energy(o.quantity) + " " + std::to_string(o.limit_price) + " " +
               std::to_string(o.delta_price) + "\n";
    }
    return out;
}

std::string serialize_payload(const CoalitionsPayload& p) {
    std::string out = "hour: " + std::to_string(p.hour) + "\n";
    for (const auto& e : p.coalitions) {
        out += "coalition: ";
        out += e.side == Side::Seller ? 'S' : 'B';
        out += " " + std::to_string(e.index);
        for (OrderRef m : e.members)
            out += " " + std::to_string(m);
        out += "\n";
    }
    return out;
}

std::string serialize_payload(const TransactionsPayload& p) {
    std::string out = "hour: " + std::to_string(p.hour) + "\n";
    for (std::size_t t = 0; t < p.transactions.size(); ++t) {
        const Transaction& tx = p.transactions[t];
        out += "tx: " + std::to_string(t) + " " + std::to_string(tx.sell_coalition) + " " +
               std::to_string(tx.buy_coalition) + " " + format_energy(tx.quantity) + " " +
               std::to_string(tx.unit_price) + "\n";
        for (const auto& [ref, qty] : tx.seller_allocations)
            out += "alloc: " + std::to_string(t) + " S " + std::to_string(ref) + " " +
                   format_energy(qty) + "\n";
        for (const auto& [ref, qty] : tx.buyer_allocations)
            out += "alloc: " + std::to_string(t) + " B " + std::to_string(ref) + " " +
                   format_energy(qty) + "\n";
    }
    return out;
}

std::string serialize_payload(const SettlementPayload& p) {
    std::string out = "hour: " + std::to_string(p.hour) + "\n";
    for (const SettlementRecord& r : p.records) {
        out += "settle: " + std::to_string(r.transaction_index) + " " +
               format_energy(r.committed) + " " + std::to_string(r.token_amount) + "\n";
        for (const auto& m : r.members) {
            out += "member: " + std::to_string(r.transaction_index) + " " +
                   std::to_string(m.order) + " " + format_energy(m.allocated) + " " +
                   format_energy(m.delivered) + " " + (m.under_delivered ? "1" : "0") + "\n";
        }
    }
    return out;
}

namespace {

int parse_hour_line(const std::pair<std::string, std::string>& kv) {
    if (kv.first != "hour")
        bad_payload("expected hour line first");
    return std::stoi(kv.second);
}

Energy parse_energy_or_die(const std::string& s) {
    const auto e = parse_energy(s);
    if (!e)
        bad_payload("bad energy value '" + s + "'");
    return *e;
}

} // namespace

SessionOpenPayload parse_session_open_payload(const std::string& text) {
    SessionOpenPayload p;
    for (const auto& [key, value] : payload_lines(text)) {
        if (key == "gamma")
            p.gamma = parse_energy_or_die(value);
        else if (key == "hours") {
            for (const auto& tok : split_ws(value))
                p.hours.push_back(std::stoi(tok));
        } else if (key == "iterations")
            p.iterations = std::stoull(value);
        else if (key == "m")
            p.m = std::stod(value);
        else if (key == "n_buyers")
            p.n_buyers = std::stoull(value);
        else if (key == "n_sellers")
            p.n_sellers = std::stoull(value);
        else if (key == "pop_size")
            p.pop_size = std::stoull(value);
        else if (key == "seed")
            p.seed = std::stoull(value);
        else if (key == "weight_scheme") {
            const auto s = parse_weight_scheme(value);
            if (!s)
                bad_payload("bad weight scheme '" + value + "'");
            p.weight_scheme = *s;
        } else
            bad_payload("unknown key '" + key + "'");
    }
    return p;
}

OrdersPayload parse_orders_payload(const std::string& text) {
    OrdersPayload p;
    const auto lines = payload_lines(text);
    if (lines.empty())
        bad_payload("empty orders payload");
    p.hour = parse_hour_line(lines[0]);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].first != "order")
            bad_payload("unexpected key '" + lines[i].first + "'");
        const auto toks = split_ws(lines[i].second);
        if (toks.size() != 5)
            bad_payload("order line needs 5 fields");
        const auto owner = parse_prosumer(toks[1]);
        if (!owner)
            bad_payload("bad owner '" + toks[1] + "'");
        Order o;
        o.owner = *owner;
        o.hour = p.hour;
        o.quantity = parse_energy_or_die(toks[2]);
        o.limit_price = std::stoll(toks[3]);
        o.delta_price = std::stoll(toks[4]);
        p.orders.emplace_back(static_cast<OrderRef>(std::stoul(toks[0])), o);
    }
    return p;
}

CoalitionsPayload parse_coalitions_payload(const std::string& text) {
    CoalitionsPayload p;
    const auto lines = payload_lines(text);
    if (lines.empty())
        bad_payload("empty coalitions payload");
    p.hour = parse_hour_line(lines[0]);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].first != "coalition")
            bad_payload("unexpected key '" + lines[i].first + "'");
        const auto toks = split_ws(lines[i].second);
        if (toks.size() < 3)
            bad_payload("coalition line needs side, index and members");
        CoalitionsPayload::Entry e;
        if (toks[0] == "S")
            e.side = Side::Seller;
        else if (toks[0] == "B")
            e.side = Side::Buyer;
        else
            bad_payload("bad coalition side '" + toks[0] + "'");
        e.index = std::stoull(toks[1]);
        for (std::size_t t = 2; t < toks.size(); ++t)
            e.members.push_back(static_cast<OrderRef>(std::stoul(toks[t])));
        p.coalitions.push_back(std::move(e));
    }
    return p;
}

TransactionsPayload parse_transactions_payload(const std::string& text) {
    TransactionsPayload p;
    const auto lines = payload_lines(text);
    if (lines.empty())
        bad_payload("empty transactions payload");
    p.hour = parse_hour_line(lines[0]);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto toks = split_ws(lines[i].second);
        if (lines[i].first == "tx") {
            if (toks.size() != 5)
                bad_payload("tx line needs 5 fields");
            if (std::stoull(toks[0]) != p.transactions.size())
                bad_payload("tx index out of order");
            Transaction tx;
            tx.hour = p.hour;
            tx.sell_coalition = std::stoull(toks[1]);
            tx.buy_coalition = std::stoull(toks[2]);
            tx.quantity = parse_energy_or_die(toks[3]);
            tx.unit_price = std::stoll(toks[4]);
            p.transactions.push_back(std::move(tx));
        } else if (lines[i].first == "alloc") {
            if (toks.size() != 4)
                bad_payload("alloc line needs 4 fields");
            const std::size_t t = std::stoull(toks[0]);
            if (t >= p.transactions.size())
                bad_payload("alloc for unknown tx");
            auto& tx = p.transactions[t];
            const OrderRef ref = static_cast<OrderRef>(std::stoul(toks[2]));
            const Energy qty = parse_energy_or_die(toks[3]);
            if (toks[1] == "S")
                tx.seller_allocations.emplace_back(ref, qty);
            else if (toks[1] == "B")
                tx.buyer_allocations.emplace_back(ref, qty);
            else
                bad_payload("bad alloc side '" + toks[1] + "'");
        } else {
            bad_payload("unexpected key '" + lines[i].first + "'");
        }
    }
    return p;
}

SettlementPayload parse_settlement_payload(const std::string& text) {
    SettlementPayload p;
    const auto lines = payload_lines(text);
    if (lines.empty())
        bad_payload("empty settlement payload");
    p.hour = parse_hour_line(lines[0]);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto toks = split_ws(lines[i].second);
        if (lines[i].first == "settle") {
            if (toks.size() != 3)
                bad_payload("settle line needs 3 fields");
            SettlementRecord r;
            r.transaction_index = std::stoull(toks[0]);
            r.committed = parse_energy_or_die(toks[1]);
            r.token_amount = std::stoll(toks[2]);
            p.records.push_back(std::move(r));
        } else if (lines[i].first == "member") {
            if (toks.size() != 5)
                bad_payload("member line needs 5 fields");
            if (p.records.empty() || std::stoull(toks[0]) != p.records.back().transaction_index)
                bad_payload("member line outside its settle record");
            SettlementRecord::MemberDelivery m;
            m.order = static_cast<OrderRef>(std::stoul(toks[1]));
            m.allocated = parse_energy_or_die(toks[2]);
            m.delivered = parse_energy_or_die(toks[3]);
            m.under_delivered = toks[4] == "1";
            p.records.back().members.push_back(m);
        } else {
            bad_payload("unexpected key '" + lines[i].first + "'");
        }
    }
    return p;
}

} // namespace peermarket
