#include "peermarket/scoring.hpp"

#include <cmath>
#include <cstdlib>

namespace peermarket {

int relation_value(Relation r) {
    switch (r) {
    case Relation::Friendship:
        return 1;
    case Relation::Enemy:
        return -1;
    case Relation::Neutral:
        return 0;
    }
    return 0;
}

int coalition_relation_score(const Coalition& c, const Session& session) {
    const auto members = c.distinct_members();
    int score = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const ProsumerId pi = session.order(members[i]).owner;
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const ProsumerId pj = session.order(members[j]).owner;
            score += relation_value(session.graph().relation(pi, pj));
        }
    }
    return score;
}

int seller_price_pref(Price offer_price, Price delta, const PriceRatio& coalition_avg) {
    if (coalition_avg > offer_price)
        return 1;
    if (coalition_avg > offer_price - delta)
        return 0;
    return -1;
}

int buyer_price_pref(Price bid_price, Price delta, const PriceRatio& coalition_avg) {
    if (coalition_avg < bid_price)
        return 1;
    if (coalition_avg < bid_price + delta)
        return 0;
    return -1;
}

PriceRatio coalition_avg_price(const Coalition& c, const Session& session) {
    const auto members = c.distinct_members();
    if (members.empty())
        throw SimError(ErrorCode::InvalidSpec, "average price of an empty coalition");
    std::int64_t sum = 0;
    for (OrderRef m : members)
        sum += session.order(m).limit_price;
    return PriceRatio(sum, static_cast<std::int64_t>(members.size()));
}

int coalition_price_score(const Coalition& c, const Session& session) {
    const auto members = c.distinct_members();
    if (members.empty())
        return 0;
    const PriceRatio avg = coalition_avg_price(c, session);
    int score = 0;
    for (OrderRef m : members) {
        const Order& o = session.order(m);
        score += o.is_offer() ? seller_price_pref(o.limit_price, o.delta_price, avg)
                              : buyer_price_pref(o.limit_price, o.delta_price, avg);
    }
    return score;
}

CoalitionScore coalition_pref_score(const Coalition& c, const Session& session) {
    CoalitionScore s;
    const auto members = c.distinct_members();
    if (members.empty())
        return s;
    const int size = static_cast<int>(members.size());
    const int pairs = size * (size - 1) / 2;
    s.v_rel = coalition_relation_score(c, session);
    s.v_price = coalition_price_score(c, session);
    s.f_pref = s.v_rel + s.v_price;
    s.ideal = pairs + size;
    s.shortfall = s.ideal - s.f_pref;
    return s;
}

std::vector<double> coalition_weights(const Individual& ind, const Session& session,
                                      WeightScheme scheme) {
    const std::size_t n = ind.coalition_count();
    if (n == 0)
        throw SimError(ErrorCode::InvalidSpec, "weights of an individual without coalitions");

    std::vector<double> weights(n, 0.0);
    if (scheme == WeightScheme::Uniform) {
        for (double& w : weights)
            w = 1.0 / static_cast<double>(n);
        return weights;
    }

    // RelationPromoted: group masses 0.6 / 0.2 / 0.2 by the sign of v_rel.
    std::vector<int> group(n); // 0 positive, 1 zero, 2 negative
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const int v = coalition_relation_score(ind.coalition(i), session);
        group[i] = v > 0 ? 0 : v == 0 ? 1 : 2;
        ++counts[group[i]];
    }
    const double masses[3] = {0.6, 0.2, 0.2};
    double live_mass = 0.0;
    for (int g = 0; g < 3; ++g)
        if (counts[g] > 0)
            live_mass += masses[g];
    for (std::size_t i = 0; i < n; ++i) {
        const double group_share = masses[group[i]] / live_mass;
        weights[i] = group_share / static_cast<double>(counts[group[i]]);
    }
    return weights;
}

double individual_fitness(const Individual& ind, const Session& session, const GaConfig& cfg,
                          const std::vector<OrderRef>& hour_orders) {
    const std::size_t n = ind.coalition_count();
    if (n == 0)
        throw SimError(ErrorCode::InvalidSpec, "fitness of an individual without coalitions");

    const auto weights = coalition_weights(ind, session, cfg.weight_scheme);
    double sum_w = 0.0;
    for (double w : weights)
        sum_w += w;
    if (std::abs(sum_w - 1.0) > 1e-9)
        throw SimError(ErrorCode::WeightsDoNotSumToOne,
                       "coalition weights sum to " + std::to_string(sum_w));

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const CoalitionScore s = coalition_pref_score(ind.coalition(i), session);
        const double gap = static_cast<double>(s.shortfall);
        acc += weights[i] * (cfg.m == 1.0 ? gap : std::pow(gap, cfg.m));
    }
    const double distance = cfg.m == 1.0 ? acc : std::pow(acc, 1.0 / cfg.m);

    const double dup = static_cast<double>(duplicate_count(ind));
    const double miss = static_cast<double>(missing_count(ind, hour_orders));
    return -distance - cfg.lambda_dup * dup - cfg.lambda_miss * miss;
}

} // namespace peermarket
