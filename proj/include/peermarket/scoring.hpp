#pragma once

// Hedonic scoring: pairwise relation values, price preferences, coalition
// preference scores and the weighted ideal-point fitness of an individual.
// Pure functions of immutable inputs; callable concurrently.
//
// Scores are computed over a coalition's distinct members: duplicated orders
// (possible inside transient GA offspring) neither add pairwise relations nor
// extra price votes. Duplication is penalized at the individual level
// instead.

#include <vector>

#include "peermarket/domain.hpp"

namespace peermarket {

/// Per-coalition preference summary against its ideal.
struct CoalitionScore {
    int v_rel{0};       // sum of pairwise relation values
    int v_price{0};     // sum of member price preferences
    int f_pref{0};      // v_rel + v_price
    int ideal{0};       // pairs + size: all friends, everyone price-satisfied
    int shortfall{0};   // ideal - f_pref, >= 0
};

/// Friendship -> +1, Neutral -> 0, Enemy -> -1.
int relation_value(Relation r);

/// Sum of relation values over unordered distinct member pairs.
int coalition_relation_score(const Coalition& c, const Session& session);

/// Seller keeps profit: +1 above its offer, 0 inside the tolerance band,
/// -1 at or below offer - delta. Ordered first-match.
int seller_price_pref(Price offer_price, Price delta, const PriceRatio& coalition_avg);

/// Buyer keeps cost down: +1 below its bid, 0 inside the band, -1 at or
/// above bid + delta.
int buyer_price_pref(Price bid_price, Price delta, const PriceRatio& coalition_avg);

/// Mean of distinct members' limit prices. Coalition must be non-empty.
PriceRatio coalition_avg_price(const Coalition& c, const Session& session);

/// Sum of side-appropriate price preferences against the coalition average.
int coalition_price_score(const Coalition& c, const Session& session);

/// All CoalitionScore fields. Empty coalitions score zero everywhere.
CoalitionScore coalition_pref_score(const Coalition& c, const Session& session);

/// Weight per coalition, flat-indexed sells first then buys, summing to 1.
/// Uniform: 1/n each. RelationPromoted: coalitions grouped by the sign of
/// v_rel get group masses 0.6 (positive) / 0.2 (zero) / 0.2 (negative),
/// split equally inside a group; masses of empty groups are redistributed
/// proportionally across the non-empty ones.
std::vector<double> coalition_weights(const Individual& ind, const Session& session,
                                      WeightScheme scheme);

/// Fitness of an individual: minus the weighted L_m ideal-point distance of
/// its coalition scores, minus duplication and missing-order penalties.
/// Larger is better; a well-formed individual at every coalition's ideal
/// scores exactly 0.
double individual_fitness(const Individual& ind, const Session& session, const GaConfig& cfg,
                          const std::vector<OrderRef>& hour_orders);

} // namespace peermarket
