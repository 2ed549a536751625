#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "peermarket/rng.hpp"
#include "peermarket/scenario_io.hpp"

using namespace peermarket;

namespace {

Order make_order(ProsumerId owner, int hour, std::int64_t kwh_milli, Price price,
                 Price delta = 0) {
    return Order{owner, hour, Energy::from_milli(kwh_milli), price, delta};
}

constexpr ProsumerId B1{Side::Buyer, 1};
constexpr ProsumerId B2{Side::Buyer, 2};
constexpr ProsumerId S1{Side::Seller, 1};
constexpr ProsumerId S2{Side::Seller, 2};

} // namespace

TEST_CASE("two valid orders with a symmetric graph make a session") {
    const auto session = validate_session({make_order(S1, 10, 5000, 7), make_order(B1, 10, 3000, 9)},
                                          {S1, B1}, {{S1, B1, Relation::Friendship}});
    CHECK(session.orders().size() == 2);
    CHECK(session.graph().relation(S1, B1) == Relation::Friendship);
    CHECK(session.graph().relation(B1, S1) == Relation::Friendship);
    CHECK(session.active_hours() == std::vector<int>{10});
}

TEST_CASE("zero-quantity orders are rejected at intake") {
    CHECK_THROWS_WITH_AS(validate_session({make_order(S1, 10, 0, 7)}, {S1}, {}),
                         doctest::Contains("zero quantity"), ValidationError);
    try {
        validate_session({make_order(S1, 10, 0, 7)}, {S1}, {});
    } catch (const ValidationError& e) {
        CHECK(e.has(Violation::ZeroQuantity));
    }
}

TEST_CASE("conflicting pair statements are asymmetric") {
    try {
        validate_session({make_order(S1, 10, 1000, 5), make_order(B1, 10, 1000, 6)}, {S1, B1},
                         {{S1, B1, Relation::Friendship}, {B1, S1, Relation::Enemy}});
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.has(Violation::AsymmetricRelation));
    }
}

TEST_CASE("restating a pair with the same value is fine") {
    const auto session =
        validate_session({make_order(S1, 10, 1000, 5), make_order(B1, 10, 1000, 6)}, {S1, B1},
                         {{S1, B1, Relation::Enemy}, {B1, S1, Relation::Enemy}});
    CHECK(session.graph().relation(S1, B1) == Relation::Enemy);
}

TEST_CASE("self relations and duplicate orders are collected together") {
    try {
        validate_session({make_order(S1, 10, 1000, 5), make_order(S1, 10, 2000, 6)}, {S1, B1},
                         {{S1, S1, Relation::Friendship}});
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.has(Violation::SelfRelation));
        CHECK(e.has(Violation::DuplicateOrder));
        CHECK(e.issues().size() == 2);
    }
}

TEST_CASE("same owner may order in different hours") {
    const auto session = validate_session(
        {make_order(S1, 10, 1000, 5), make_order(S1, 11, 1000, 5), make_order(B1, 10, 500, 9)},
        {S1, B1}, {});
    CHECK(session.active_hours() == std::vector<int>{10, 11});
    CHECK(session.orders_for_hour(10).size() == 2);
}

TEST_CASE("buyer and seller index spaces are disjoint") {
    const ProsumerId b4{Side::Buyer, 4};
    const ProsumerId s4{Side::Seller, 4};
    CHECK(b4 != s4);
    const auto session = validate_session(
        {make_order(b4, 10, 1000, 5), make_order(s4, 10, 1000, 5)}, {b4, s4},
        {{b4, s4, Relation::Enemy}});
    CHECK(session.graph().relation(b4, s4) == Relation::Enemy);
}

TEST_CASE("relation graph rejects self queries and unknown members") {
    RelationGraph g({S1, S2});
    CHECK_THROWS_AS(g.relation(S1, S1), SimError);
    CHECK_THROWS_AS(g.relation(S1, B1), SimError);
    CHECK(g.relation(S1, S2) == Relation::Neutral); // unlisted pairs default
}

TEST_CASE("relation graph symmetry holds for random graphs") {
    std::vector<ProsumerId> ids;
    for (std::uint32_t i = 0; i < 6; ++i)
        ids.push_back({Side::Buyer, i});
    for (std::uint32_t i = 0; i < 6; ++i)
        ids.push_back({Side::Seller, i});
    Rng rng(17);
    RelationGraph g(ids);
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
            g.set_relation(ids[i], ids[j],
                           static_cast<Relation>(rng.below(3)));
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = 0; j < ids.size(); ++j)
            if (i != j)
                CHECK(g.relation(ids[i], ids[j]) == g.relation(ids[j], ids[i]));
}

TEST_CASE("relation total order is friendship > neutral > enemy") {
    CHECK(Relation::Enemy < Relation::Neutral);
    CHECK(Relation::Neutral < Relation::Friendship);
}

TEST_CASE("dup and miss counts are zero exactly for well-formed individuals") {
    const std::vector<OrderRef> hour{0, 1, 2, 3};
    Individual ind;
    ind.sell_coalitions = {{Side::Seller, {0, 1}}};
    ind.buy_coalitions = {{Side::Buyer, {2, 3}}};
    CHECK(duplicate_count(ind) == 0);
    CHECK(missing_count(ind, hour) == 0);
    CHECK(is_well_formed(ind, hour));

    Individual dup = ind;
    dup.sell_coalitions[0].members.push_back(2);
    CHECK(duplicate_count(dup) == 1);
    CHECK(missing_count(dup, hour) == 0);
    CHECK(!is_well_formed(dup, hour));

    Individual missing = ind;
    missing.buy_coalitions[0].members = {2};
    CHECK(duplicate_count(missing) == 0);
    CHECK(missing_count(missing, hour) == 1);
    CHECK(!is_well_formed(missing, hour));

    Individual empty_coalition = ind;
    empty_coalition.sell_coalitions.push_back({Side::Seller, {}});
    CHECK(!is_well_formed(empty_coalition, hour));
}

TEST_CASE("same_partition ignores coalition and member order") {
    Individual a;
    a.sell_coalitions = {{Side::Seller, {0, 1}}, {Side::Seller, {2}}};
    a.buy_coalitions = {{Side::Buyer, {3}}};
    Individual b;
    b.sell_coalitions = {{Side::Seller, {2}}, {Side::Seller, {1, 0}}};
    b.buy_coalitions = {{Side::Buyer, {3}}};
    CHECK(a.same_partition(b));
    b.sell_coalitions[0].members.push_back(1);
    CHECK(!a.same_partition(b));
}

TEST_CASE("scenario round-trips losslessly") {
    Scenario s;
    s.prosumers = {B1, B2, S1, S2};
    s.relations = {{B1, S1, Relation::Friendship}, {S2, B2, Relation::Enemy}};
    s.orders = {make_order(B1, 10, 3250, 12, 1), make_order(S1, 10, 5000, 7),
                make_order(S2, 11, 1500, 9, 2)};
    const std::string text = serialize_scenario(s);
    const Scenario parsed = parse_scenario(text);
    CHECK(serialize_scenario(parsed) == text);

    const auto session = parsed.validate();
    CHECK(session.orders().size() == 3);
    CHECK(session.graph().relation(B1, S1) == Relation::Friendship);
    CHECK(session.graph().relation(B2, S2) == Relation::Enemy);
    CHECK(session.graph().relation(B1, B2) == Relation::Neutral);
}

TEST_CASE("scenario parser flags malformed lines with their number") {
    const std::string text = "peermarket scenario v1\nprosumer: B1\norder: B1 25 1.000 5 0\n";
    CHECK_THROWS_WITH_AS(parse_scenario(text), doctest::Contains("line 3"), SimError);
    CHECK_THROWS_AS(parse_scenario("nonsense\n"), SimError);
    CHECK_THROWS_AS(parse_scenario(""), SimError);
    CHECK_THROWS_AS(
        parse_scenario("peermarket scenario v1\norder: B1 10 1.2345 5 0\n"), SimError);
}

TEST_CASE("scenario parser accepts comments and blank lines") {
    const std::string text = "peermarket scenario v1\n\n# community\nprosumer: B1\nprosumer: S1\n"
                             "relation: S1 B1 friend # stated backwards\n"
                             "order: B1 10 1.000 5 0\norder: S1 10 1.000 4 0\n";
    const Scenario s = parse_scenario(text);
    CHECK(s.prosumers.size() == 2);
    CHECK(s.relations.size() == 1);
    const auto session = s.validate();
    CHECK(session.graph().relation(B1, S1) == Relation::Friendship);
}
