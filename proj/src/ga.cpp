#include "peermarket/ga.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <set>

namespace peermarket {

std::size_t Population::best_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < fitnesses.size(); ++i)
        if (fitnesses[i] > fitnesses[best])
            best = i;
    return best;
}

std::size_t Population::worst_index() const {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < fitnesses.size(); ++i)
        if (fitnesses[i] < fitnesses[worst])
            worst = i;
    return worst;
}

double Population::mean_fitness() const {
    double sum = 0.0;
    for (double f : fitnesses)
        sum += f;
    return fitnesses.empty() ? 0.0 : sum / static_cast<double>(fitnesses.size());
}

std::pair<std::size_t, std::size_t>
compute_coalition_number(const Session& session, const std::vector<OrderRef>& hour_orders,
                         Energy gamma) {
    std::size_t n_sell = 0;
    std::size_t n_buy = 0;
    std::size_t sell_orders = 0;
    std::size_t buy_orders = 0;
    for (OrderRef ref : hour_orders) {
        const Order& o = session.order(ref);
        if (o.is_offer()) {
            ++sell_orders;
            if (o.quantity > gamma)
                ++n_sell;
        } else {
            ++buy_orders;
            if (o.quantity > gamma)
                ++n_buy;
        }
    }
    if (n_sell == 0 && sell_orders > 0)
        n_sell = 1;
    if (n_buy == 0 && buy_orders > 0)
        n_buy = 1;
    return {n_sell, n_buy};
}

namespace {

std::vector<OrderRef> side_refs(const Session& session, const std::vector<OrderRef>& hour_orders,
                                Side side) {
    std::vector<OrderRef> out;
    for (OrderRef ref : hour_orders)
        if (session.order(ref).owner.side == side)
            out.push_back(ref);
    return out;
}

/// Seeds from >gamma orders, remaining orders dealt round-robin after a
/// shuffle.
std::vector<Coalition> build_side(const Session& session, const std::vector<OrderRef>& refs,
                                  Side side, Energy gamma, Rng& rng) {
    std::vector<OrderRef> seeds;
    std::vector<OrderRef> rest;
    for (OrderRef ref : refs) {
        if (session.order(ref).quantity > gamma)
            seeds.push_back(ref);
        else
            rest.push_back(ref);
    }
    std::vector<Coalition> coalitions;
    if (seeds.empty()) {
        coalitions.push_back(Coalition{side, {}});
    } else {
        for (OrderRef s : seeds)
            coalitions.push_back(Coalition{side, {s}});
    }
    rng.shuffle(rest);
    for (std::size_t i = 0; i < rest.size(); ++i)
        coalitions[i % coalitions.size()].members.push_back(rest[i]);
    return coalitions;
}

void refresh_distance_row(Population& pop, std::size_t k) {
    const std::size_t n = pop.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double d = j == k ? 0.0 : individual_distance(pop.individuals[k], pop.individuals[j]);
        pop.distances[k * n + j] = d;
        pop.distances[j * n + k] = d;
    }
}

} // namespace

Population generate_initial_population(const Session& session,
                                       const std::vector<OrderRef>& hour_orders,
                                       const GaConfig& cfg, Rng& rng) {
    const auto sells = side_refs(session, hour_orders, Side::Seller);
    const auto buys = side_refs(session, hour_orders, Side::Buyer);
    if (sells.empty())
        throw SimError(ErrorCode::EmptySide, "no sell orders in this hour");
    if (buys.empty())
        throw SimError(ErrorCode::EmptySide, "no buy orders in this hour");

    Population pop;
    pop.individuals.reserve(cfg.pop_size);
    for (std::size_t i = 0; i < cfg.pop_size; ++i) {
        Individual ind;
        ind.sell_coalitions = build_side(session, sells, Side::Seller, cfg.gamma, rng);
        ind.buy_coalitions = build_side(session, buys, Side::Buyer, cfg.gamma, rng);
        pop.individuals.push_back(std::move(ind));
    }
    pop.fitnesses.reserve(cfg.pop_size);
    for (const Individual& ind : pop.individuals)
        pop.fitnesses.push_back(individual_fitness(ind, session, cfg, hour_orders));
    const std::size_t n = pop.size();
    pop.distances.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = individual_distance(pop.individuals[i], pop.individuals[j]);
            pop.distances[i * n + j] = d;
            pop.distances[j * n + i] = d;
        }
    }
    return pop;
}

std::size_t tournament_select(const Population& pop, std::size_t k, Rng& rng) {
    const auto drawn = rng.sample_without_replacement(pop.size(), std::min(k, pop.size()));
    std::size_t winner = drawn[0];
    for (std::size_t idx : drawn) {
        if (pop.fitnesses[idx] > pop.fitnesses[winner] ||
            (pop.fitnesses[idx] == pop.fitnesses[winner] && idx < winner))
            winner = idx;
    }
    return winner;
}

namespace {

/// Distinct members whose enemy relations to distinct co-members outnumber
/// their friendship plus neutral ones, in first-occurrence order.
std::vector<OrderRef> enemy_dominated_members(const Coalition& c, const Session& session) {
    const auto members = c.distinct_members();
    std::vector<OrderRef> out;
    for (OrderRef m : members) {
        const ProsumerId pm = session.order(m).owner;
        int enemies = 0;
        int others = 0;
        for (OrderRef other : members) {
            if (other == m)
                continue;
            const Relation r = session.graph().relation(pm, session.order(other).owner);
            if (r == Relation::Enemy)
                ++enemies;
            else
                ++others;
        }
        if (enemies > others)
            out.push_back(m);
    }
    return out;
}

/// Distinct members with at least one enemy among distinct co-members, in
/// first-occurrence order.
std::vector<OrderRef> enemy_involved_members(const Coalition& c, const Session& session) {
    const auto members = c.distinct_members();
    std::vector<OrderRef> out;
    for (OrderRef m : members) {
        const ProsumerId pm = session.order(m).owner;
        for (OrderRef other : members) {
            if (other == m)
                continue;
            if (session.graph().relation(pm, session.order(other).owner) == Relation::Enemy) {
                out.push_back(m);
                break;
            }
        }
    }
    return out;
}

void erase_all(std::vector<OrderRef>& v, OrderRef ref) {
    v.erase(std::remove(v.begin(), v.end(), ref), v.end());
}

void erase_first(std::vector<OrderRef>& v, OrderRef ref) {
    auto it = std::find(v.begin(), v.end(), ref);
    if (it != v.end())
        v.erase(it);
}

void crossover_side(std::vector<Coalition>& side1, std::vector<Coalition>& side2,
                    const std::vector<Coalition>& parent1, const std::vector<Coalition>& parent2,
                    const Session& session, Rng& rng) {
    if (parent1.empty())
        return;
    const std::size_t idx = rng.below(parent1.size());
    const auto moved1 = enemy_dominated_members(parent1[idx], session);
    const auto moved2 = enemy_dominated_members(parent2[idx], session);
    for (OrderRef m : moved1)
        erase_all(side1[idx].members, m);
    for (OrderRef m : moved2)
        erase_all(side2[idx].members, m);
    for (OrderRef m : moved2)
        side1[idx].members.push_back(m);
    for (OrderRef m : moved1)
        side2[idx].members.push_back(m);
}

void mutate_side(std::vector<Coalition>& side, const Session& session, Rng& rng) {
    if (side.size() < 2)
        return;
    // two lowest relation scores, ties by index
    std::vector<std::pair<int, std::size_t>> scored;
    scored.reserve(side.size());
    for (std::size_t i = 0; i < side.size(); ++i)
        scored.emplace_back(coalition_relation_score(side[i], session), i);
    std::sort(scored.begin(), scored.end());
    Coalition& first = side[scored[0].second];
    Coalition& second = side[scored[1].second];

    const auto cand_first = enemy_involved_members(first, session);
    const auto cand_second = enemy_involved_members(second, session);
    if (cand_first.empty() || cand_second.empty())
        return;
    const OrderRef x = cand_first[rng.below(cand_first.size())];
    const OrderRef y = cand_second[rng.below(cand_second.size())];
    erase_first(first.members, x);
    first.members.push_back(y);
    erase_first(second.members, y);
    second.members.push_back(x);
}

} // namespace

std::pair<Individual, Individual> crossover(const Individual& p1, const Individual& p2,
                                            const Session& session, Rng& rng) {
    Individual off1 = p1;
    Individual off2 = p2;
    crossover_side(off1.sell_coalitions, off2.sell_coalitions, p1.sell_coalitions,
                   p2.sell_coalitions, session, rng);
    crossover_side(off1.buy_coalitions, off2.buy_coalitions, p1.buy_coalitions, p2.buy_coalitions,
                   session, rng);
    return {std::move(off1), std::move(off2)};
}

Individual mutate(const Individual& ind, const Session& session, Rng& rng) {
    Individual out = ind;
    mutate_side(out.sell_coalitions, session, rng);
    mutate_side(out.buy_coalitions, session, rng);
    return out;
}

double jaccard(const Coalition& a, const Coalition& b) {
    auto sa = a.distinct_members();
    auto sb = b.distinct_members();
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa.empty() && sb.empty())
        return 1.0;
    std::size_t common = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < sa.size() && j < sb.size()) {
        if (sa[i] == sb[j]) {
            ++common;
            ++i;
            ++j;
        } else if (sa[i] < sb[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return static_cast<double>(common) /
           static_cast<double>(sa.size() + sb.size() - common);
}

namespace {

/// Greedy best-Jaccard alignment of one side; appends per-slot distances.
void align_side(const std::vector<Coalition>& a, const std::vector<Coalition>& b,
                std::vector<double>& slots) {
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    if (na == 0 && nb == 0)
        return;
    std::vector<bool> used_a(na, false);
    std::vector<bool> used_b(nb, false);
    const std::size_t matches = std::min(na, nb);
    for (std::size_t round = 0; round < matches; ++round) {
        double best = -1.0;
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t i = 0; i < na; ++i) {
            if (used_a[i])
                continue;
            for (std::size_t j = 0; j < nb; ++j) {
                if (used_b[j])
                    continue;
                const double v = jaccard(a[i], b[j]);
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        used_a[bi] = true;
        used_b[bj] = true;
        slots.push_back(1.0 - best);
    }
    for (std::size_t k = matches; k < std::max(na, nb); ++k)
        slots.push_back(1.0);
}

} // namespace

double individual_distance(const Individual& i1, const Individual& i2) {
    std::vector<double> slots;
    align_side(i1.sell_coalitions, i2.sell_coalitions, slots);
    align_side(i1.buy_coalitions, i2.buy_coalitions, slots);
    if (slots.empty())
        return 0.0;
    double sum = 0.0;
    for (double d : slots)
        sum += d;
    return sum / static_cast<double>(slots.size());
}

double diversity_contribution(const Population& pop, std::size_t member_index) {
    if (pop.size() < 2)
        throw SimError(ErrorCode::PopulationTooSmall,
                       "diversity needs at least one other individual");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pop.size(); ++j) {
        if (j == member_index)
            continue;
        best = std::min(best, pop.distance(member_index, j));
    }
    return best;
}

double diversity_contribution(const Individual& ind, const Population& pop,
                              std::optional<std::size_t> excluded_member) {
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t j = 0; j < pop.size(); ++j) {
        if (excluded_member && *excluded_member == j)
            continue;
        best = std::min(best, individual_distance(ind, pop.individuals[j]));
        any = true;
    }
    if (!any)
        throw SimError(ErrorCode::PopulationTooSmall, "empty comparison population");
    return best;
}

namespace {

bool is_duplicate_of_any(const Individual& ind, const Population& pop,
                         std::size_t excluded_member) {
    for (std::size_t j = 0; j < pop.size(); ++j) {
        if (j == excluded_member)
            continue;
        if (ind.same_partition(pop.individuals[j]))
            return true;
    }
    return false;
}

void replace_member(Population& pop, std::size_t slot, const Individual& offspring,
                    double offspring_fitness) {
    pop.individuals[slot] = offspring;
    pop.fitnesses[slot] = offspring_fitness;
    refresh_distance_row(pop, slot);
}

} // namespace

void update_population(Population& pop, const Individual& offspring, double offspring_fitness) {
    // candidates: strictly less fit than the offspring
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (pop.fitnesses[i] < offspring_fitness)
            candidates.push_back(i);

    if (!candidates.empty()) {
        std::size_t c_min = candidates[0];
        double cd_min = diversity_contribution(pop, c_min);
        for (std::size_t k = 1; k < candidates.size(); ++k) {
            const double cd = diversity_contribution(pop, candidates[k]);
            if (cd < cd_min) {
                cd_min = cd;
                c_min = candidates[k];
            }
        }
        const double off_cd = diversity_contribution(offspring, pop, c_min);
        if (off_cd > cd_min && !is_duplicate_of_any(offspring, pop, c_min)) {
            replace_member(pop, c_min, offspring, offspring_fitness);
            return;
        }
    }

    const std::size_t worst = pop.worst_index();
    if (offspring_fitness > pop.fitnesses[worst] &&
        !is_duplicate_of_any(offspring, pop, worst)) {
        replace_member(pop, worst, offspring, offspring_fitness);
    }
}

Individual repair(const Individual& ind, const Session& session,
                  const std::vector<OrderRef>& hour_orders) {
    Individual out = ind;
    std::set<OrderRef> seen;
    auto dedupe_side = [&seen](std::vector<Coalition>& side) {
        for (Coalition& c : side) {
            std::vector<OrderRef> kept;
            kept.reserve(c.members.size());
            for (OrderRef m : c.members)
                if (seen.insert(m).second)
                    kept.push_back(m);
            c.members = std::move(kept);
        }
    };
    dedupe_side(out.sell_coalitions);
    dedupe_side(out.buy_coalitions);

    for (OrderRef ref : hour_orders) {
        if (seen.count(ref))
            continue;
        auto& side = session.order(ref).owner.side == Side::Seller ? out.sell_coalitions
                                                                   : out.buy_coalitions;
        if (side.empty())
            side.push_back(Coalition{session.order(ref).owner.side, {}});
        std::size_t smallest = 0;
        for (std::size_t i = 1; i < side.size(); ++i)
            if (side[i].size() < side[smallest].size())
                smallest = i;
        side[smallest].members.push_back(ref);
        seen.insert(ref);
    }

    auto drop_empty = [](std::vector<Coalition>& side) {
        side.erase(std::remove_if(side.begin(), side.end(),
                                  [](const Coalition& c) { return c.empty(); }),
                   side.end());
    };
    drop_empty(out.sell_coalitions);
    drop_empty(out.buy_coalitions);
    return out;
}

RunTrace run(const Session& session, const std::vector<OrderRef>& hour_orders,
             const GaConfig& cfg) {
    cfg.check();
    Rng rng(cfg.seed);

    Population pop = generate_initial_population(session, hour_orders, cfg, rng);

    std::size_t best_idx = pop.best_index();
    Individual best_ind = pop.individuals[best_idx];
    double best_fitness = pop.fitnesses[best_idx];

    RunTrace trace;
    trace.seed = cfg.seed;
    trace.iterations.reserve(cfg.iterations);

    for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
        const std::size_t p1 = tournament_select(pop, cfg.tournament_k, rng);
        const std::size_t p2 = tournament_select(pop, cfg.tournament_k, rng);
        auto offspring = crossover(pop.individuals[p1], pop.individuals[p2], session, rng);
        for (Individual* off : {&offspring.first, &offspring.second}) {
            Individual mutated = mutate(*off, session, rng);
            const double f = individual_fitness(mutated, session, cfg, hour_orders);
            update_population(pop, mutated, f);
        }
        const std::size_t bi = pop.best_index();
        if (pop.fitnesses[bi] > best_fitness) {
            best_fitness = pop.fitnesses[bi];
            best_ind = pop.individuals[bi];
        }
        trace.iterations.push_back({best_fitness, pop.mean_fitness()});
    }

    trace.best = repair(best_ind, session, hour_orders);
    trace.best_fitness = individual_fitness(trace.best, session, cfg, hour_orders);
    trace.raw_best_fitness = best_fitness;
    return trace;
}

std::string serialize_trace(const RunTrace& trace) {
    std::string out = "iteration,best_fitness,mean_fitness\n";
    char buf[96];
    for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9f,%.9f\n", i + 1, trace.iterations[i].best_fitness,
                      trace.iterations[i].mean_fitness);
        out += buf;
    }
    return out;
}

} // namespace peermarket
