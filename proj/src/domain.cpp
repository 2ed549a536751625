#include "peermarket/domain.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace peermarket {

std::string format_prosumer(ProsumerId id) {
    return (id.side == Side::Buyer ? "B" : "S") + std::to_string(id.index);
}

std::optional<ProsumerId> parse_prosumer(const std::string& token) {
    if (token.size() < 2)
        return std::nullopt;
    Side side;
    if (token[0] == 'B')
        side = Side::Buyer;
    else if (token[0] == 'S')
        side = Side::Seller;
    else
        return std::nullopt;
    std::uint32_t index = 0;
    for (std::size_t i = 1; i < token.size(); ++i) {
        if (token[i] < '0' || token[i] > '9')
            return std::nullopt;
        index = index * 10 + static_cast<std::uint32_t>(token[i] - '0');
    }
    return ProsumerId{side, index};
}

const char* relation_name(Relation r) {
    switch (r) {
    case Relation::Friendship:
        return "friend";
    case Relation::Neutral:
        return "neutral";
    case Relation::Enemy:
        return "enemy";
    }
    return "?";
}

std::optional<Relation> parse_relation(const std::string& token) {
    if (token == "friend")
        return Relation::Friendship;
    if (token == "neutral")
        return Relation::Neutral;
    if (token == "enemy")
        return Relation::Enemy;
    return std::nullopt;
}

RelationGraph::RelationGraph(std::vector<ProsumerId> prosumers) : prosumers_(std::move(prosumers)) {
    std::sort(prosumers_.begin(), prosumers_.end());
    prosumers_.erase(std::unique(prosumers_.begin(), prosumers_.end()), prosumers_.end());
    for (std::size_t i = 0; i < prosumers_.size(); ++i)
        index_of_[prosumers_[i]] = i;
    const std::size_t n = prosumers_.size();
    cells_.assign(n * (n - 1) / 2, Relation::Neutral);
}

bool RelationGraph::contains(ProsumerId id) const { return index_of_.count(id) > 0; }

std::size_t RelationGraph::dense_index(ProsumerId id) const {
    auto it = index_of_.find(id);
    if (it == index_of_.end())
        throw SimError(ErrorCode::MemberNotInGraph,
                       "prosumer " + format_prosumer(id) + " not in relation graph");
    return it->second;
}

namespace {
std::size_t triangle_cell(std::size_t i, std::size_t j, std::size_t n) {
    // i < j; cell index within the flattened upper triangle
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}
} // namespace

void RelationGraph::set_relation(ProsumerId a, ProsumerId b, Relation r) {
    if (a == b)
        throw SimError(ErrorCode::SelfRelation,
                       "self relation for " + format_prosumer(a));
    std::size_t i = dense_index(a);
    std::size_t j = dense_index(b);
    if (i > j)
        std::swap(i, j);
    cells_[triangle_cell(i, j, prosumers_.size())] = r;
}

Relation RelationGraph::relation(ProsumerId a, ProsumerId b) const {
    if (a == b)
        throw SimError(ErrorCode::SelfRelation,
                       "relation(" + format_prosumer(a) + ", " + format_prosumer(a) +
                           ") is undefined");
    std::size_t i = dense_index(a);
    std::size_t j = dense_index(b);
    if (i > j)
        std::swap(i, j);
    return cells_[triangle_cell(i, j, prosumers_.size())];
}

std::vector<std::tuple<ProsumerId, ProsumerId, Relation>> RelationGraph::non_neutral_pairs() const {
    std::vector<std::tuple<ProsumerId, ProsumerId, Relation>> out;
    const std::size_t n = prosumers_.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Relation r = cells_[triangle_cell(i, j, n)];
            if (r != Relation::Neutral)
                out.emplace_back(prosumers_[i], prosumers_[j], r);
        }
    }
    return out;
}

std::vector<OrderRef> Coalition::distinct_members() const {
    std::vector<OrderRef> out;
    out.reserve(members.size());
    for (OrderRef m : members) {
        if (std::find(out.begin(), out.end(), m) == out.end())
            out.push_back(m);
    }
    return out;
}

std::vector<OrderRef> Coalition::sorted_members() const {
    std::vector<OrderRef> out = members;
    std::sort(out.begin(), out.end());
    return out;
}

namespace {
std::vector<std::vector<OrderRef>> canonical_side(const std::vector<Coalition>& side) {
    std::vector<std::vector<OrderRef>> out;
    out.reserve(side.size());
    for (const Coalition& c : side)
        out.push_back(c.sorted_members());
    std::sort(out.begin(), out.end());
    return out;
}
} // namespace

bool Individual::same_partition(const Individual& other) const {
    return canonical_side(sell_coalitions) == canonical_side(other.sell_coalitions) &&
           canonical_side(buy_coalitions) == canonical_side(other.buy_coalitions);
}

void GaConfig::check() const {
    if (pop_size < 2)
        throw SimError(ErrorCode::InvalidSpec, "pop_size must be >= 2");
    if (tournament_k < 2)
        throw SimError(ErrorCode::InvalidSpec, "tournament_k must be >= 2");
    if (iterations < 1)
        throw SimError(ErrorCode::InvalidSpec, "iterations must be >= 1");
    if (m < 1.0)
        throw SimError(ErrorCode::InvalidSpec, "m must be >= 1");
    if (lambda_dup < 0.0 || lambda_miss < 0.0)
        throw SimError(ErrorCode::InvalidSpec, "penalty coefficients must be non-negative");
    if (gamma.milli < 0)
        throw SimError(ErrorCode::InvalidSpec, "gamma must be non-negative");
}

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error([&issues] {
          std::string msg = "session validation failed:";
          for (const auto& i : issues)
              msg += "\n  " + i.detail;
          return msg;
      }()),
      issues_(std::move(issues)) {}

bool ValidationError::has(Violation v) const {
    for (const auto& i : issues_)
        if (i.kind == v)
            return true;
    return false;
}

Session::Session(std::vector<Order> orders, RelationGraph graph)
    : orders_(std::move(orders)), graph_(std::move(graph)) {}

std::vector<int> Session::active_hours() const {
    std::set<int> hours;
    for (const Order& o : orders_)
        hours.insert(o.hour);
    return {hours.begin(), hours.end()};
}

std::vector<OrderRef> Session::orders_for_hour(int hour) const {
    std::vector<OrderRef> refs;
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        if (orders_[i].hour == hour)
            refs.push_back(static_cast<OrderRef>(i));
    }
    return refs;
}

Session validate_session(std::vector<Order> orders, std::vector<ProsumerId> prosumers,
                         const std::vector<RelationEntry>& relations) {
    for (const Order& o : orders) {
        if (o.hour < 0 || o.hour > 23)
            throw SimError(ErrorCode::MalformedInput,
                           "order hour out of range: " + std::to_string(o.hour));
        if (o.limit_price < 0 || o.delta_price < 0 || o.quantity.milli < 0)
            throw SimError(ErrorCode::MalformedInput,
                           "negative price or quantity for " + format_prosumer(o.owner));
    }

    std::vector<ValidationIssue> issues;

    for (const Order& o : orders)
        prosumers.push_back(o.owner);
    RelationGraph graph(std::move(prosumers));

    std::map<std::pair<ProsumerId, ProsumerId>, Relation> stated;
    for (const RelationEntry& e : relations) {
        if (e.a == e.b) {
            issues.push_back({Violation::SelfRelation,
                              "self relation for " + format_prosumer(e.a)});
            continue;
        }
        auto key = std::minmax(e.a, e.b);
        auto [it, inserted] = stated.insert({{key.first, key.second}, e.rel});
        if (!inserted && it->second != e.rel) {
            issues.push_back({Violation::AsymmetricRelation,
                              "conflicting relation for " + format_prosumer(key.first) + " " +
                                  format_prosumer(key.second)});
        }
    }

    if (orders.empty())
        issues.push_back({Violation::ZeroQuantity, "session has no orders"});
    std::set<std::pair<ProsumerId, int>> seen;
    for (const Order& o : orders) {
        const std::string tag = format_prosumer(o.owner) + "@h" + std::to_string(o.hour);
        if (o.quantity.milli == 0)
            issues.push_back({Violation::ZeroQuantity, "order " + tag + " has zero quantity"});
        if (!seen.insert({o.owner, o.hour}).second)
            issues.push_back({Violation::DuplicateOrder, "duplicate order " + tag});
    }

    if (!issues.empty())
        throw ValidationError(std::move(issues));

    for (const auto& [pair, rel] : stated)
        graph.set_relation(pair.first, pair.second, rel); // unknown ids throw MemberNotInGraph
    return Session(std::move(orders), std::move(graph));
}

std::size_t duplicate_count(const Individual& ind) {
    std::map<OrderRef, std::size_t> counts;
    auto tally = [&counts](const std::vector<Coalition>& side) {
        for (const Coalition& c : side)
            for (OrderRef m : c.members)
                ++counts[m];
    };
    tally(ind.sell_coalitions);
    tally(ind.buy_coalitions);
    std::size_t dup = 0;
    for (const auto& [ref, n] : counts)
        dup += n - 1;
    return dup;
}

std::size_t missing_count(const Individual& ind, const std::vector<OrderRef>& hour_orders) {
    std::set<OrderRef> present;
    auto collect = [&present](const std::vector<Coalition>& side) {
        for (const Coalition& c : side)
            present.insert(c.members.begin(), c.members.end());
    };
    collect(ind.sell_coalitions);
    collect(ind.buy_coalitions);
    std::size_t miss = 0;
    for (OrderRef ref : hour_orders)
        if (!present.count(ref))
            ++miss;
    return miss;
}

bool is_well_formed(const Individual& ind, const std::vector<OrderRef>& hour_orders) {
    for (const Coalition& c : ind.sell_coalitions)
        if (c.empty())
            return false;
    for (const Coalition& c : ind.buy_coalitions)
        if (c.empty())
            return false;
    return duplicate_count(ind) == 0 && missing_count(ind, hour_orders) == 0;
}

} // namespace peermarket
