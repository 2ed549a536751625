#pragma once

// Shared domain types for the coalition market: prosumers, pairwise social
// relations, per-hour orders, coalitions and the GA individual built from
// them. Everything is immutable after construction and safe to share across
// threads. No algorithms live here beyond construction and validation.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peermarket/fixed.hpp"

namespace peermarket {

enum class Side : std::uint8_t { Buyer, Seller };

inline const char* side_name(Side s) { return s == Side::Buyer ? "buyer" : "seller"; }

/// Market participant handle. Buyer and seller index spaces are independent
/// namespaces: B4 and S4 are different prosumers.
struct ProsumerId {
    Side side{Side::Buyer};
    std::uint32_t index{0};

    constexpr auto operator<=>(const ProsumerId&) const = default;
};

/// "B3" / "S12"
std::string format_prosumer(ProsumerId id);
std::optional<ProsumerId> parse_prosumer(const std::string& token);

enum class Relation : std::uint8_t { Enemy = 0, Neutral = 1, Friendship = 2 };

// Total order Friendship > Neutral > Enemy falls out of the enum values.
inline bool operator<(Relation a, Relation b) {
    return static_cast<std::uint8_t>(a) < static_cast<std::uint8_t>(b);
}

const char* relation_name(Relation r);
std::optional<Relation> parse_relation(const std::string& token);

/// Symmetric friend/neutral/enemy relations over the scenario's prosumers.
/// Unlisted pairs default to Neutral; self relations are undefined.
class RelationGraph {
  public:
    RelationGraph() = default;
    explicit RelationGraph(std::vector<ProsumerId> prosumers);

    std::size_t prosumer_count() const { return prosumers_.size(); }
    const std::vector<ProsumerId>& prosumers() const { return prosumers_; }

    bool contains(ProsumerId id) const;

    /// Sets both orientations at once; construction-time only.
    void set_relation(ProsumerId a, ProsumerId b, Relation r);

    /// Throws SimError{SelfRelation} when a == b, MemberNotInGraph when
    /// either id is unknown.
    Relation relation(ProsumerId a, ProsumerId b) const;

    /// Unordered pairs with a non-neutral relation, canonically sorted.
    std::vector<std::tuple<ProsumerId, ProsumerId, Relation>> non_neutral_pairs() const;

  private:
    std::size_t dense_index(ProsumerId id) const;

    std::vector<ProsumerId> prosumers_;
    std::map<ProsumerId, std::size_t> index_of_;
    std::vector<Relation> cells_; // upper triangle, row-major
};

/// One per-hour energy bid (buyer) or offer (seller).
struct Order {
    ProsumerId owner;
    int hour{0};          // 0-23
    Energy quantity;      // > 0 once validated
    Price limit_price{0}; // Gwei per kWh
    Price delta_price{0}; // tolerance the owner accepts around its price

    bool is_offer() const { return owner.side == Side::Seller; }
    bool is_bid() const { return owner.side == Side::Buyer; }
};

/// Index into a session's order list.
using OrderRef = std::uint32_t;

/// Homogeneous group of same-side orders. Members keep insertion order;
/// duplicates can appear transiently inside GA offspring.
struct Coalition {
    Side side{Side::Buyer};
    std::vector<OrderRef> members;

    bool empty() const { return members.empty(); }
    std::size_t size() const { return members.size(); }

    /// Members with duplicates removed, first occurrence kept.
    std::vector<OrderRef> distinct_members() const;

    /// Sorted member multiset, used for canonical comparison.
    std::vector<OrderRef> sorted_members() const;
};

/// One candidate partition of an hour's orders into coalitions.
struct Individual {
    std::vector<Coalition> sell_coalitions;
    std::vector<Coalition> buy_coalitions;

    std::size_t coalition_count() const { return sell_coalitions.size() + buy_coalitions.size(); }

    /// Coalition by flat index: sell coalitions first, then buy.
    const Coalition& coalition(std::size_t flat) const {
        return flat < sell_coalitions.size() ? sell_coalitions[flat]
                                             : buy_coalitions[flat - sell_coalitions.size()];
    }

    /// Set-equality of coalitions per side, ignoring coalition order and
    /// member order.
    bool same_partition(const Individual& other) const;
};

enum class WeightScheme : std::uint8_t { Uniform, RelationPromoted };

/// Knobs for the coalition search.
struct GaConfig {
    Energy gamma{Energy::from_whole_kwh(10)}; // quantity threshold seeding coalitions
    std::size_t pop_size{30};
    std::size_t iterations{200};
    std::size_t tournament_k{3};
    double m{1.0}; // distance exponent, >= 1
    WeightScheme weight_scheme{WeightScheme::Uniform};
    double lambda_dup{1.0};
    double lambda_miss{1.0};
    std::uint64_t seed{0};

    void check() const;
};

/// Aggregated market order a coalition trades as.
struct CoalitionOrder {
    Side side{Side::Buyer};
    std::size_t coalition_index{0}; // position within the final individual's side
    Energy total_quantity;
    PriceRatio avg_price;
    std::vector<std::pair<OrderRef, Energy>> member_breakdown;
};

/// Matched coalition-to-coalition energy commitment.
struct Transaction {
    int hour{0};
    std::size_t sell_coalition{0};
    std::size_t buy_coalition{0};
    Energy quantity;
    Price unit_price{0};
    std::vector<std::pair<OrderRef, Energy>> seller_allocations;
    std::vector<std::pair<OrderRef, Energy>> buyer_allocations;
};

/// Post-delivery comparison of committed versus delivered energy.
struct SettlementRecord {
    std::size_t transaction_index{0};
    Energy committed;
    std::int64_t token_amount{0}; // Gwei
    struct MemberDelivery {
        OrderRef order{0};
        Energy allocated;
        Energy delivered;
        bool under_delivered{false};
    };
    std::vector<MemberDelivery> members; // seller side
};

// ---------------------------------------------------------------------------
// Errors

enum class ErrorCode {
    MemberNotInGraph,
    SelfRelation,
    EmptySide,
    PopulationTooSmall,
    WeightsDoNotSumToOne,
    UnknownOrderInDelivery,
    InvalidSpec,
    StorageFailure,
    MalformedInput,
};

class SimError : public std::runtime_error {
  public:
    SimError(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

enum class Violation { DuplicateOrder, ZeroQuantity, AsymmetricRelation, SelfRelation };

struct ValidationIssue {
    Violation kind;
    std::string detail;
};

/// Carries every violation found during session intake.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(std::vector<ValidationIssue> issues);
    const std::vector<ValidationIssue>& issues() const { return issues_; }
    bool has(Violation v) const;

  private:
    std::vector<ValidationIssue> issues_;
};

// ---------------------------------------------------------------------------
// Session

/// One unordered-pair relation statement, as it appears in a scenario file.
/// The same pair may be stated twice (in either orientation) as long as the
/// values agree.
struct RelationEntry {
    ProsumerId a;
    ProsumerId b;
    Relation rel{Relation::Neutral};
};

/// Validated market session: orders vetted against the domain invariants and
/// a total symmetric relation graph.
class Session {
  public:
    Session(std::vector<Order> orders, RelationGraph graph);

    const std::vector<Order>& orders() const { return orders_; }
    const Order& order(OrderRef ref) const { return orders_.at(ref); }
    const RelationGraph& graph() const { return graph_; }

    /// Hours that carry at least one order, ascending.
    std::vector<int> active_hours() const;

    /// Refs of this hour's orders, sellers and buyers mixed, ascending ref.
    std::vector<OrderRef> orders_for_hour(int hour) const;

  private:
    std::vector<Order> orders_;
    RelationGraph graph_;
};

/// Builds a Session iff every invariant holds; throws ValidationError listing
/// each violation otherwise: ZeroQuantity, DuplicateOrder per (owner, hour),
/// SelfRelation for pair entries with a == b, AsymmetricRelation when the
/// same unordered pair is stated with conflicting values. The graph covers
/// `prosumers` plus every order owner; unstated pairs are Neutral.
Session validate_session(std::vector<Order> orders, std::vector<ProsumerId> prosumers,
                         const std::vector<RelationEntry>& relations);

/// Occurrences beyond the first of any order ref, summed.
std::size_t duplicate_count(const Individual& ind);

/// Orders from `hour_orders` that appear nowhere in the individual.
std::size_t missing_count(const Individual& ind, const std::vector<OrderRef>& hour_orders);

/// dup == 0 and miss == 0 and every coalition non-empty.
bool is_well_formed(const Individual& ind, const std::vector<OrderRef>& hour_orders);

} // namespace peermarket
