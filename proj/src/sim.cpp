#include "peermarket/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "peermarket/ledger.hpp"
#include "peermarket/payloads.hpp"

namespace peermarket {

void ScenarioSpec::check() const {
    if (profiles.empty())
        throw SimError(ErrorCode::InvalidSpec, "spec has no prosumer profiles");
    const double sum = relation_mix.p_friend + relation_mix.p_neutral + relation_mix.p_enemy;
    if (relation_mix.p_friend < 0 || relation_mix.p_neutral < 0 || relation_mix.p_enemy < 0 ||
        std::abs(sum - 1.0) > 1e-9)
        throw SimError(ErrorCode::InvalidSpec, "relation mix must be non-negative and sum to 1");
    if (price_min < 0 || price_min > price_max)
        throw SimError(ErrorCode::InvalidSpec, "bad price range");
    if (delta_min < 0 || delta_min > delta_max)
        throw SimError(ErrorCode::InvalidSpec, "bad delta range");
    if (hours.empty())
        throw SimError(ErrorCode::InvalidSpec, "spec lists no hours");
    for (int h : hours)
        if (h < 0 || h > 23)
            throw SimError(ErrorCode::InvalidSpec, "hour out of range");
    std::vector<ProsumerId> ids;
    for (const auto& p : profiles) {
        if (p.min_kwh.milli < 0 || p.min_kwh > p.max_kwh)
            throw SimError(ErrorCode::InvalidSpec,
                           "bad energy interval for " + format_prosumer(p.id));
        ids.push_back(p.id);
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw SimError(ErrorCode::InvalidSpec, "duplicate prosumer profile");
}

std::vector<ProsumerProfile> table1_profiles() {
    auto buyer = [](std::uint32_t idx, std::int64_t lo, std::int64_t hi) {
        return ProsumerProfile{{Side::Buyer, idx}, Energy::from_whole_kwh(lo),
                               Energy::from_whole_kwh(hi)};
    };
    auto seller = [](std::uint32_t idx, std::int64_t lo, std::int64_t hi) {
        return ProsumerProfile{{Side::Seller, idx}, Energy::from_whole_kwh(lo),
                               Energy::from_whole_kwh(hi)};
    };
    return {
        buyer(1, 1, 14), buyer(2, 1, 4),   buyer(3, 1, 20),  buyer(4, 2, 15),
        seller(4, 0, 9), seller(5, 0, 11), seller(6, 0, 11), seller(7, 0, 12),
        seller(8, 0, 14), seller(9, 0, 16), seller(10, 0, 17), seller(11, 1, 23),
        seller(12, 1, 19), seller(13, 1, 20),
    };
}

std::vector<ProsumerProfile> synthetic_profiles(std::size_t n_buyers, std::size_t n_sellers,
                                                std::uint64_t seed) {
    Rng rng(derive_seed(seed, 3));
    std::vector<ProsumerProfile> out;
    out.reserve(n_buyers + n_sellers);
    auto draw = [&rng](ProsumerId id) {
        const std::int64_t lo = rng.range(0, 2);
        const std::int64_t hi = rng.range(4, 23);
        return ProsumerProfile{id, Energy::from_whole_kwh(lo), Energy::from_whole_kwh(hi)};
    };
    for (std::size_t i = 0; i < n_buyers; ++i)
        out.push_back(draw({Side::Buyer, static_cast<std::uint32_t>(i + 1)}));
    for (std::size_t i = 0; i < n_sellers; ++i)
        out.push_back(draw({Side::Seller, static_cast<std::uint32_t>(i + 1)}));
    return out;
}

Scenario generate_scenario(const ScenarioSpec& spec) {
    spec.check();
    Scenario s;
    std::vector<ProsumerProfile> profiles = spec.profiles;
    std::sort(profiles.begin(), profiles.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& p : profiles)
        s.prosumers.push_back(p.id);

    // relations: independent stream, pairs in canonical id order
    Rng rel_rng(derive_seed(spec.seed, 1));
    for (std::size_t i = 0; i < s.prosumers.size(); ++i) {
        for (std::size_t j = i + 1; j < s.prosumers.size(); ++j) {
            const double u = rel_rng.unit();
            Relation r;
            if (u < spec.relation_mix.p_friend)
                r = Relation::Friendship;
            else if (u < spec.relation_mix.p_friend + spec.relation_mix.p_neutral)
                r = Relation::Neutral;
            else
                r = Relation::Enemy;
            if (r != Relation::Neutral)
                s.relations.push_back({s.prosumers[i], s.prosumers[j], r});
        }
    }

    // orders: per hour ascending, per prosumer ascending
    std::vector<int> hours = spec.hours;
    std::sort(hours.begin(), hours.end());
    hours.erase(std::unique(hours.begin(), hours.end()), hours.end());
    Rng ord_rng(derive_seed(spec.seed, 2));
    for (int hour : hours) {
        for (const auto& p : profiles) {
            const std::int64_t qty = ord_rng.range(p.min_kwh.milli, p.max_kwh.milli);
            const Price price = ord_rng.range(spec.price_min, spec.price_max);
            const Price delta = ord_rng.range(spec.delta_min, spec.delta_max);
            if (qty == 0)
                continue; // sat out this hour; draws already consumed
            s.orders.push_back({p.id, hour, Energy::from_milli(qty), price, delta});
        }
    }
    canonicalize(s);
    return s;
}

namespace {

std::vector<CoalitionAudit> audit_individual(const Individual& ind, const Session& session) {
    std::vector<CoalitionAudit> audits;
    auto audit_side = [&](const std::vector<Coalition>& side) {
        for (const Coalition& c : side) {
            CoalitionAudit a;
            a.side = c.side;
            const auto members = c.distinct_members();
            for (OrderRef m : members)
                a.members.push_back(session.order(m).owner);
            for (std::size_t i = 0; i < members.size(); ++i) {
                for (std::size_t j = i + 1; j < members.size(); ++j) {
                    const Relation r = session.graph().relation(
                        session.order(members[i]).owner, session.order(members[j]).owner);
                    if (r == Relation::Friendship)
                        ++a.friendship;
                    else if (r == Relation::Neutral)
                        ++a.neutral;
                    else
                        ++a.enemy;
                }
            }
            audits.push_back(std::move(a));
        }
    };
    audit_side(ind.sell_coalitions);
    audit_side(ind.buy_coalitions);
    return audits;
}

void fill_price_stats(HourMetrics& m, const std::vector<Transaction>& txs) {
    m.transaction_count = txs.size();
    if (txs.empty())
        return;
    double sum = 0.0;
    m.price_min = txs[0].unit_price;
    m.price_max = txs[0].unit_price;
    for (const Transaction& tx : txs) {
        sum += static_cast<double>(tx.unit_price);
        m.price_min = std::min(m.price_min, tx.unit_price);
        m.price_max = std::max(m.price_max, tx.unit_price);
    }
    m.price_mean = sum / static_cast<double>(txs.size());
    double var = 0.0;
    for (const Transaction& tx : txs) {
        const double d = static_cast<double>(tx.unit_price) - m.price_mean;
        var += d * d;
    }
    m.price_std = std::sqrt(var / static_cast<double>(txs.size()));
}

void fill_report(HourMetrics& m, const MatchReport& report) {
    m.energy_transacted = report.total_matched;
    m.supply = report.total_supply;
    m.demand = report.total_demand;
    m.residual_supply = report.residual_supply;
    m.residual_demand = report.residual_demand;
    m.imbalance = report.imbalance;
    fill_price_stats(m, report.transactions);
}

CoalitionsPayload coalitions_payload(int hour, const Individual& ind) {
    CoalitionsPayload p;
    p.hour = hour;
    for (std::size_t i = 0; i < ind.sell_coalitions.size(); ++i)
        p.coalitions.push_back({Side::Seller, i, ind.sell_coalitions[i].sorted_members()});
    for (std::size_t i = 0; i < ind.buy_coalitions.size(); ++i)
        p.coalitions.push_back({Side::Buyer, i, ind.buy_coalitions[i].sorted_members()});
    return p;
}

OrdersPayload orders_payload(int hour, const Session& session,
                             const std::vector<OrderRef>& refs) {
    OrdersPayload p;
    p.hour = hour;
    for (OrderRef ref : refs)
        p.orders.emplace_back(ref, session.order(ref));
    return p;
}

} // namespace

HourMetrics run_hour_with_individual(const Session& session, int hour, const Individual& final_ind,
                                     const std::vector<OrderRef>& hour_orders) {
    HourMetrics m;
    m.hour = hour;
    for (OrderRef ref : hour_orders) {
        if (session.order(ref).is_offer())
            ++m.orders_sell;
        else
            ++m.orders_buy;
    }
    m.coalitions_sell = final_ind.sell_coalitions.size();
    m.coalitions_buy = final_ind.buy_coalitions.size();
    m.audits = audit_individual(final_ind, session);
    for (const CoalitionAudit& a : m.audits)
        m.social_index += a.friendship - a.enemy;

    std::vector<CoalitionOrder> sells;
    std::vector<CoalitionOrder> buys;
    for (std::size_t i = 0; i < final_ind.sell_coalitions.size(); ++i)
        sells.push_back(aggregate_coalition_order(final_ind.sell_coalitions[i], session, i));
    for (std::size_t i = 0; i < final_ind.buy_coalitions.size(); ++i)
        buys.push_back(aggregate_coalition_order(final_ind.buy_coalitions[i], session, i));
    fill_report(m, match_coalitions(sells, buys, hour));
    return m;
}

SessionResult run_session(const Scenario& scenario, const GaConfig& cfg,
                          const SessionOptions& options) {
    cfg.check();
    const Session session = scenario.validate();
    const std::vector<int> hours = session.active_hours();

    std::unique_ptr<LedgerWriter> ledger;
    if (!options.ledger_path.empty())
        ledger = std::make_unique<LedgerWriter>(options.ledger_path);

    if (ledger) {
        SessionOpenPayload open;
        open.seed = cfg.seed;
        open.hours = hours;
        for (ProsumerId id : session.graph().prosumers()) {
            if (id.side == Side::Buyer)
                ++open.n_buyers;
            else
                ++open.n_sellers;
        }
        open.gamma = cfg.gamma;
        open.pop_size = cfg.pop_size;
        open.iterations = cfg.iterations;
        open.m = cfg.m;
        open.weight_scheme = cfg.weight_scheme;
        ledger->append(PayloadKind::SessionOpen, serialize_payload(open));
    }

    SessionResult result;
    for (int hour : hours) {
        const auto hour_orders = session.orders_for_hour(hour);
        bool has_sell = false;
        bool has_buy = false;
        for (OrderRef ref : hour_orders) {
            (session.order(ref).is_offer() ? has_sell : has_buy) = true;
        }

        Individual final_ind;
        if (has_sell && has_buy) {
            GaConfig hour_cfg = cfg;
            hour_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(hour));
            RunTrace trace = run(session, hour_orders, hour_cfg);
            final_ind = trace.best;
            if (options.keep_traces)
                result.traces.push_back(serialize_trace(trace));
        } else {
            // one-sided hour: nothing to match, report orders as singletons
            for (OrderRef ref : hour_orders) {
                Coalition c{session.order(ref).owner.side, {ref}};
                (c.side == Side::Seller ? final_ind.sell_coalitions : final_ind.buy_coalitions)
                    .push_back(std::move(c));
            }
            if (options.keep_traces)
                result.traces.push_back("");
        }

        HourMetrics m = run_hour_with_individual(session, hour, final_ind, hour_orders);

        // rebuild the transactions for settlement and the ledger
        std::vector<CoalitionOrder> sells;
        std::vector<CoalitionOrder> buys;
        for (std::size_t i = 0; i < final_ind.sell_coalitions.size(); ++i)
            sells.push_back(aggregate_coalition_order(final_ind.sell_coalitions[i], session, i));
        for (std::size_t i = 0; i < final_ind.buy_coalitions.size(); ++i)
            buys.push_back(aggregate_coalition_order(final_ind.buy_coalitions[i], session, i));
        const MatchReport report = match_coalitions(sells, buys, hour);

        std::map<OrderRef, Energy> delivered = committed_delivery(report.transactions);
        if (options.delivery_shortfall > 0.0) {
            Rng noise(derive_seed(cfg.seed, 0x1000 + static_cast<std::uint64_t>(hour)));
            for (auto& [ref, qty] : delivered) {
                const double cut = options.delivery_shortfall * noise.unit();
                qty = Energy::from_milli(
                    qty.milli - static_cast<std::int64_t>(std::floor(qty.milli * cut)));
            }
        }
        const auto settlement = settle(report.transactions, delivered, session);

        if (ledger) {
            ledger->append(PayloadKind::Orders,
                           serialize_payload(orders_payload(hour, session, hour_orders)));
            ledger->append(PayloadKind::Coalitions,
                           serialize_payload(coalitions_payload(hour, final_ind)));
            TransactionsPayload txp;
            txp.hour = hour;
            txp.transactions = report.transactions;
            ledger->append(PayloadKind::Transactions, serialize_payload(txp));
            SettlementPayload sp;
            sp.hour = hour;
            sp.records = settlement;
            ledger->append(PayloadKind::Settlement, serialize_payload(sp));
        }

        result.hours.push_back(std::move(m));
    }
    return result;
}

SessionResult run_baseline(const Scenario& scenario) {
    const Session session = scenario.validate();
    SessionResult result;
    for (int hour : session.active_hours()) {
        const auto hour_orders = session.orders_for_hour(hour);
        HourMetrics m;
        m.hour = hour;

        // order-level greedy double auction at midpoint prices
        std::vector<OrderRef> offers;
        std::vector<OrderRef> bids;
        for (OrderRef ref : hour_orders) {
            if (session.order(ref).is_offer()) {
                ++m.orders_sell;
                offers.push_back(ref);
                m.supply += session.order(ref).quantity;
            } else {
                ++m.orders_buy;
                bids.push_back(ref);
                m.demand += session.order(ref).quantity;
            }
        }
        std::stable_sort(offers.begin(), offers.end(), [&session](OrderRef a, OrderRef b) {
            return session.order(a).limit_price < session.order(b).limit_price;
        });
        std::stable_sort(bids.begin(), bids.end(), [&session](OrderRef a, OrderRef b) {
            return session.order(b).limit_price < session.order(a).limit_price;
        });

        std::vector<Transaction> txs;
        std::map<OrderRef, Energy> left;
        for (OrderRef r : hour_orders)
            left[r] = session.order(r).quantity;
        std::size_t si = 0;
        std::size_t bi = 0;
        while (si < offers.size() && bi < bids.size()) {
            const OrderRef s = offers[si];
            const OrderRef b = bids[bi];
            if (left[s].is_zero()) {
                ++si;
                continue;
            }
            if (left[b].is_zero()) {
                ++bi;
                continue;
            }
            const Price sp = session.order(s).limit_price;
            const Price bp = session.order(b).limit_price;
            if (bp < sp)
                break;
            const Energy qty = min(left[s], left[b]);
            Transaction tx;
            tx.hour = hour;
            tx.quantity = qty;
            tx.unit_price = midpoint_price(PriceRatio(sp, 1), PriceRatio(bp, 1));
            tx.seller_allocations = {{s, qty}};
            tx.buyer_allocations = {{b, qty}};
            txs.push_back(std::move(tx));
            m.energy_transacted += qty;
            left[s] -= qty;
            left[b] -= qty;
        }

        m.residual_supply = m.supply - m.energy_transacted;
        m.residual_demand = m.demand - m.energy_transacted;
        m.imbalance =
            Energy::from_milli(std::abs(m.residual_supply.milli - m.residual_demand.milli));
        fill_price_stats(m, txs);
        result.hours.push_back(std::move(m));
    }
    return result;
}

std::string metrics_csv_header() {
    return "hour,seed,orders_sell,orders_buy,coalitions_sell,coalitions_buy,transactions,"
           "energy_kwh,price_mean,price_min,price_max,price_std,supply_kwh,demand_kwh,"
           "residual_supply_kwh,residual_demand_kwh,imbalance_kwh,social_index";
}

std::string metrics_csv_row(const HourMetrics& m, std::uint64_t seed) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%d,%llu,%zu,%zu,%zu,%zu,%zu,%s,%.6f,%lld,%lld,%.6f,%s,%s,%s,%s,%s,%d",
                  m.hour, static_cast<unsigned long long>(seed), m.orders_sell, m.orders_buy,
                  m.coalitions_sell, m.coalitions_buy, m.transaction_count,
                  format_energy(m.energy_transacted).c_str(), m.price_mean,
                  static_cast<long long>(m.price_min), static_cast<long long>(m.price_max),
                  m.price_std, format_energy(m.supply).c_str(), format_energy(m.demand).c_str(),
                  format_energy(m.residual_supply).c_str(),
                  format_energy(m.residual_demand).c_str(), format_energy(m.imbalance).c_str(),
                  m.social_index);
    return buf;
}

} // namespace peermarket
