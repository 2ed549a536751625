#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "peermarket/rng.hpp"
#include "peermarket/scoring.hpp"
#include "test_support.hpp"

using namespace peermarket;
using namespace peermarket::testing;

TEST_CASE("relation values") {
    CHECK(relation_value(Relation::Friendship) == 1);
    CHECK(relation_value(Relation::Enemy) == -1);
    CHECK(relation_value(Relation::Neutral) == 0);
    // odd under the friendship/enemy swap
    CHECK(relation_value(Relation::Friendship) == -relation_value(Relation::Enemy));
}

TEST_CASE("coalition relation score sums each unordered pair once") {
    // sellers named after the hour-10 audit row <7,12,4>: all three pairs friends
    const auto session = make_session(
        {order_of(seller(7), 10, 5, 8), order_of(seller(12), 10, 4, 9),
         order_of(seller(4), 10, 3, 7), order_of(buyer(1), 10, 2, 10)},
        {{seller(7), seller(12), Relation::Friendship},
         {seller(7), seller(4), Relation::Friendship},
         {seller(12), seller(4), Relation::Friendship}});

    const Coalition trio{Side::Seller, {0, 1, 2}};
    CHECK(coalition_relation_score(trio, session) == 3);

    // pair-enumeration oracle over the same members
    int oracle = 0;
    for (std::size_t i = 0; i < trio.members.size(); ++i)
        for (std::size_t j = i + 1; j < trio.members.size(); ++j)
            oracle += relation_value(session.graph().relation(
                session.order(trio.members[i]).owner, session.order(trio.members[j]).owner));
    CHECK(oracle == 3);

    const Coalition singleton{Side::Seller, {0}};
    CHECK(coalition_relation_score(singleton, session) == 0);
}

TEST_CASE("coalition relation score with mixed relations") {
    // the hour-12 audit row <5,6,7>: two friendships, one enemy pair
    const auto session = make_session({order_of(seller(5), 12, 5, 8), order_of(seller(6), 12, 4, 9),
                                       order_of(seller(7), 12, 3, 7)},
                                      {{seller(5), seller(6), Relation::Friendship},
                                       {seller(6), seller(7), Relation::Friendship},
                                       {seller(5), seller(7), Relation::Enemy}});
    CHECK(coalition_relation_score({Side::Seller, {0, 1, 2}}, session) == 1);
}

TEST_CASE("duplicated members do not duplicate relationships") {
    const auto session =
        make_session({order_of(seller(1), 10, 5, 8), order_of(seller(2), 10, 4, 9)},
                     {{seller(1), seller(2), Relation::Enemy}});
    const Coalition dup{Side::Seller, {0, 1, 0}};
    CHECK(coalition_relation_score(dup, session) == -1);
}

TEST_CASE("relation score errors for members outside the graph") {
    // session constructed directly with a graph that misses one order owner
    Session session({order_of(seller(1), 10, 5, 8), order_of(seller(9), 10, 4, 7)},
                    RelationGraph({seller(1), seller(2)}));
    Coalition bad{Side::Seller, {0, 1}};
    try {
        coalition_relation_score(bad, session);
        FAIL("expected SimError");
    } catch (const SimError& e) {
        CHECK(e.code() == ErrorCode::MemberNotInGraph);
    }
}

TEST_CASE("seller price preference cases") {
    CHECK(seller_price_pref(8, 1, PriceRatio(10, 1)) == 1);
    CHECK(seller_price_pref(8, 1, PriceRatio(15, 2)) == 0);  // 7.5
    CHECK(seller_price_pref(8, 1, PriceRatio(6, 1)) == -1);
    // boundary: avg exactly at the offer price sits in the tolerance band
    CHECK(seller_price_pref(8, 1, PriceRatio(8, 1)) == 0);
    // delta 0 collapses the band
    CHECK(seller_price_pref(8, 0, PriceRatio(8, 1)) == -1);
}

TEST_CASE("buyer price preference cases") {
    CHECK(buyer_price_pref(8, 1, PriceRatio(6, 1)) == 1);
    CHECK(buyer_price_pref(8, 1, PriceRatio(17, 2)) == 0);  // 8.5
    CHECK(buyer_price_pref(8, 1, PriceRatio(10, 1)) == -1);
    CHECK(buyer_price_pref(8, 1, PriceRatio(8, 1)) == 0);
    CHECK(buyer_price_pref(8, 0, PriceRatio(8, 1)) == -1);
}

TEST_CASE("coalition price score: singleton seller at its own average") {
    const auto session = make_session({order_of(seller(1), 10, 5, 8, 1)});
    CHECK(coalition_price_score({Side::Seller, {0}}, session) == 0);
}

TEST_CASE("coalition price score: equal sellers with zero tolerance") {
    const auto session = make_session(
        {order_of(seller(1), 10, 5, 5, 0), order_of(seller(2), 10, 4, 5, 0)});
    CHECK(coalition_price_score({Side::Seller, {0, 1}}, session) == -2);
}

TEST_CASE("coalition price score: buyers around the average cancel out") {
    const auto session = make_session(
        {order_of(buyer(1), 10, 5, 10, 0), order_of(buyer(2), 10, 4, 6, 0)});
    CHECK(coalition_price_score({Side::Buyer, {0, 1}}, session) == 0);
}

TEST_CASE("coalition pref score fills every field consistently") {
    // singleton: f_pref reduces to the price vote, ideal = 1
    const auto single = make_session({order_of(seller(1), 10, 5, 8, 1)});
    const CoalitionScore s1 = coalition_pref_score({Side::Seller, {0}}, single);
    CHECK(s1.v_rel == 0);
    CHECK(s1.f_pref == s1.v_price);
    CHECK(s1.ideal == 1);
    CHECK(s1.shortfall == s1.ideal - s1.f_pref);

    // all-friend trio: relation side of the score reaches its bound
    const auto trio_session = make_session(
        {order_of(seller(1), 10, 5, 3, 1), order_of(seller(2), 10, 4, 5, 1),
         order_of(seller(3), 10, 3, 7, 1)},
        {{seller(1), seller(2), Relation::Friendship},
         {seller(2), seller(3), Relation::Friendship},
         {seller(1), seller(3), Relation::Friendship}});
    const CoalitionScore s3 = coalition_pref_score({Side::Seller, {0, 1, 2}}, trio_session);
    CHECK(s3.v_rel == 3);
    CHECK(s3.ideal == 6); // pairs + size for the trio
    CHECK(s3.f_pref == s3.v_rel + s3.v_price);
    CHECK(s3.shortfall == s3.ideal - s3.f_pref);

    // all-enemy pair, both price-dissatisfied
    const auto pair_session = make_session(
        {order_of(seller(1), 10, 5, 5, 0), order_of(seller(2), 10, 4, 5, 0)},
        {{seller(1), seller(2), Relation::Enemy}});
    const CoalitionScore s2 = coalition_pref_score({Side::Seller, {0, 1}}, pair_session);
    CHECK(s2.v_rel == -1);
    CHECK(s2.v_price == -2);
    CHECK(s2.f_pref == -3);
    CHECK(s2.ideal == 3);
    CHECK(s2.shortfall == 6);
}

TEST_CASE("individual fitness matches the m=1 ideal-point distance") {
    // coalition shortfalls 2 (lonely zero-tolerance seller) and 4 (friendly
    // pair, both price-dissatisfied)
    const auto session = make_session(
        {order_of(seller(1), 10, 5, 8, 0), order_of(seller(2), 10, 4, 5, 0),
         order_of(seller(3), 10, 3, 5, 0)},
        {{seller(2), seller(3), Relation::Friendship}});
    const std::vector<OrderRef> hour{0, 1, 2};

    Individual ind;
    ind.sell_coalitions = {{Side::Seller, {0}}, {Side::Seller, {1, 2}}};

    CHECK(coalition_pref_score(ind.sell_coalitions[0], session).shortfall == 2);
    CHECK(coalition_pref_score(ind.sell_coalitions[1], session).shortfall == 4);

    GaConfig cfg;
    cfg.m = 1.0;
    CHECK(individual_fitness(ind, session, cfg, hour) == -3.0);

    // one duplicated order adds exactly lambda_dup
    Individual dup = ind;
    dup.sell_coalitions[0].members = {0, 0};
    CHECK(individual_fitness(dup, session, cfg, hour) == -4.0);

    // a missing order adds lambda_miss and removes its price vote
    Individual missing = ind;
    missing.sell_coalitions[1].members = {1};
    const double f = individual_fitness(missing, session, cfg, hour);
    CHECK(f == doctest::Approx(-(0.5 * 2 + 0.5 * 2) - 1.0));
}

TEST_CASE("weights: uniform splits evenly") {
    const auto session = make_session(
        {order_of(seller(1), 10, 5, 8), order_of(seller(2), 10, 4, 9),
         order_of(buyer(1), 10, 5, 8), order_of(buyer(2), 10, 4, 9)});
    Individual ind;
    ind.sell_coalitions = {{Side::Seller, {0}}, {Side::Seller, {1}}};
    ind.buy_coalitions = {{Side::Buyer, {2}}, {Side::Buyer, {3}}};
    const auto w = coalition_weights(ind, session, WeightScheme::Uniform);
    REQUIRE(w.size() == 4);
    for (double wi : w)
        CHECK(wi == doctest::Approx(0.25));
}

TEST_CASE("weights: relation promotion splits 0.6/0.2/0.2 inside groups") {
    const auto session = make_session(
        {order_of(seller(1), 10, 5, 8), order_of(seller(2), 10, 4, 9),
         order_of(seller(3), 10, 5, 8), order_of(seller(4), 10, 4, 9),
         order_of(seller(5), 10, 3, 7), order_of(seller(6), 10, 5, 8),
         order_of(seller(7), 10, 4, 9), order_of(buyer(1), 10, 2, 10)},
        {{seller(1), seller(2), Relation::Friendship},
         {seller(3), seller(4), Relation::Friendship},
         {seller(6), seller(7), Relation::Enemy}});
    Individual ind;
    ind.sell_coalitions = {{Side::Seller, {0, 1}},  // positive
                           {Side::Seller, {2, 3}},  // positive
                           {Side::Seller, {4}},     // zero
                           {Side::Seller, {5, 6}}}; // negative
    SUBCASE("one group per sign") {
        const auto w = coalition_weights(ind, session, WeightScheme::RelationPromoted);
        REQUIRE(w.size() == 4);
        CHECK(w[0] == doctest::Approx(0.3));
        CHECK(w[1] == doctest::Approx(0.3));
        CHECK(w[2] == doctest::Approx(0.2));
        CHECK(w[3] == doctest::Approx(0.2));
    }
    SUBCASE("empty groups redistribute proportionally") {
        // three positive coalitions, no zero or negative group
        ind.sell_coalitions = {{Side::Seller, {0, 1}},
                               {Side::Seller, {2, 3}},
                               {Side::Seller, {3, 2}}};
        const auto w = coalition_weights(ind, session, WeightScheme::RelationPromoted);
        REQUIRE(w.size() == 3);
        for (double wi : w)
            CHECK(wi == doctest::Approx(1.0 / 3.0));
    }
}

TEST_CASE("weight vectors always sum to one without negatives") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Scenario scenario = random_scenario(seed, 5, 6);
        const Session session = scenario.validate();
        const auto hour = session.orders_for_hour(12);
        GaConfig cfg;
        cfg.gamma = Energy::from_whole_kwh(6);
        Rng rng(seed);
        const Population pop = generate_initial_population(session, hour, cfg, rng);
        for (const Individual& ind : pop.individuals) {
            for (WeightScheme scheme : {WeightScheme::Uniform, WeightScheme::RelationPromoted}) {
                const auto w = coalition_weights(ind, session, scheme);
                double sum = 0.0;
                for (double wi : w) {
                    CHECK(wi >= 0.0);
                    sum += wi;
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("relation score is permutation invariant and bounded") {
    const Scenario scenario = random_scenario(3, 4, 5);
    const Session session = scenario.validate();
    Rng rng(21);
    const auto hour = session.orders_for_hour(12);
    std::vector<OrderRef> sellers;
    for (OrderRef r : hour)
        if (session.order(r).is_offer())
            sellers.push_back(r);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<OrderRef> members = sellers;
        rng.shuffle(members);
        const std::size_t take = 1 + rng.below(members.size());
        members.resize(take);
        Coalition c{Side::Seller, members};
        const int score = coalition_relation_score(c, session);
        const int pairs = static_cast<int>(take * (take - 1) / 2);
        CHECK(score <= pairs);
        CHECK(score >= -pairs);
        rng.shuffle(c.members);
        CHECK(coalition_relation_score(c, session) == score);
    }
}

TEST_CASE("price score and preference bounds hold on random coalitions") {
    const Scenario scenario = random_scenario(8, 6, 6);
    const Session session = scenario.validate();
    const auto hour = session.orders_for_hour(12);
    GaConfig cfg;
    cfg.gamma = Energy::from_whole_kwh(8);
    Rng rng(5);
    const Population pop = generate_initial_population(session, hour, cfg, rng);
    for (const Individual& ind : pop.individuals) {
        for (std::size_t i = 0; i < ind.coalition_count(); ++i) {
            const Coalition& c = ind.coalition(i);
            const CoalitionScore s = coalition_pref_score(c, session);
            const int size = static_cast<int>(c.distinct_members().size());
            CHECK(std::abs(s.v_price) <= size);
            CHECK(s.f_pref <= s.ideal);
            CHECK(s.shortfall >= 0);
        }
    }
}

TEST_CASE("fitness of a well-formed individual is exactly minus the distance") {
    const Scenario scenario = random_scenario(4, 5, 5);
    const Session session = scenario.validate();
    const auto hour = session.orders_for_hour(12);
    GaConfig cfg;
    cfg.gamma = Energy::from_whole_kwh(7);
    Rng rng(9);
    const Population pop = generate_initial_population(session, hour, cfg, rng);
    for (const Individual& ind : pop.individuals) {
        REQUIRE(is_well_formed(ind, hour));
        const auto w = coalition_weights(ind, session, cfg.weight_scheme);
        double expected = 0.0;
        for (std::size_t i = 0; i < ind.coalition_count(); ++i)
            expected -= w[i] * coalition_pref_score(ind.coalition(i), session).shortfall;
        CHECK(individual_fitness(ind, session, cfg, hour) == doctest::Approx(expected));
    }
}

TEST_CASE("turning an enemy pair friendly never lowers fitness") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Scenario scenario = random_scenario(seed, 4, 4, RelationMix{0.2, 0.2, 0.6});
        const Session session = scenario.validate();
        const auto hour = session.orders_for_hour(12);
        GaConfig cfg;
        cfg.gamma = Energy::from_whole_kwh(6);
        Rng rng(seed);
        const Population pop = generate_initial_population(session, hour, cfg, rng);
        const Individual& ind = pop.individuals[0];

        // find an enemy pair inside some coalition and flip it
        for (std::size_t ci = 0; ci < ind.coalition_count(); ++ci) {
            const auto members = ind.coalition(ci).distinct_members();
            for (std::size_t i = 0; i < members.size(); ++i) {
                for (std::size_t j = i + 1; j < members.size(); ++j) {
                    const ProsumerId a = session.order(members[i]).owner;
                    const ProsumerId b = session.order(members[j]).owner;
                    if (session.graph().relation(a, b) != Relation::Enemy)
                        continue;
                    Scenario flipped = scenario;
                    for (auto& e : flipped.relations) {
                        const bool same = (e.a == a && e.b == b) || (e.a == b && e.b == a);
                        if (same)
                            e.rel = Relation::Friendship;
                    }
                    const Session flipped_session = flipped.validate();
                    CHECK(individual_fitness(ind, flipped_session, cfg, hour) >=
                          individual_fitness(ind, session, cfg, hour));
                }
            }
        }
    }
}
