#pragma once

// Genetic search over coalition partitions: threshold-seeded initial
// population, tournament selection, enemy-driven crossover and mutation, and
// a diversity-aware steady-state replacement. Fully deterministic under the
// config seed; the rng draw order is documented on each operation.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "peermarket/domain.hpp"
#include "peermarket/rng.hpp"
#include "peermarket/scoring.hpp"

namespace peermarket {

/// Working population with cached fitnesses and pairwise distances. Caches
/// are maintained by generate_initial_population / update_population and are
/// never stale.
struct Population {
    std::vector<Individual> individuals;
    std::vector<double> fitnesses;
    std::vector<double> distances; // row-major size() x size()

    std::size_t size() const { return individuals.size(); }
    double distance(std::size_t i, std::size_t j) const { return distances[i * size() + j]; }

    /// Index of the fittest member, ties by lowest index.
    std::size_t best_index() const;
    /// Index of the least fit member, ties by lowest index.
    std::size_t worst_index() const;
    double mean_fitness() const;
};

struct IterationStat {
    double best_fitness{0.0};
    double mean_fitness{0.0};
};

/// What a search run leaves behind. The best individual is repaired to a
/// well-formed partition; best-fitness values per iteration track the raw
/// (pre-repair) elitist series and never decrease.
struct RunTrace {
    std::vector<IterationStat> iterations;
    Individual best;
    double best_fitness{0.0};     // of the repaired individual
    double raw_best_fitness{0.0}; // elitist maximum over the run
    std::uint64_t seed{0};
};

/// Coalition counts per side: orders with quantity strictly above gamma each
/// seed a coalition; a side with orders but no seeds falls back to one
/// coalition so the game stays runnable.
std::pair<std::size_t, std::size_t>
compute_coalition_number(const Session& session, const std::vector<OrderRef>& hour_orders,
                         Energy gamma);

/// pop_size well-formed individuals. Per individual and side, seed orders
/// open coalitions and the remaining orders are dealt round-robin in a fresh
/// shuffle (rng: sell-side shuffle then buy-side shuffle, one below() per
/// shuffle position from the back). Throws EmptySide when a side has no
/// orders.
Population generate_initial_population(const Session& session,
                                       const std::vector<OrderRef>& hour_orders,
                                       const GaConfig& cfg, Rng& rng);

/// Index of the winner among k distinct uniformly drawn members (k draws via
/// Rng::below over a shrinking pool); highest fitness wins, ties go to the
/// lowest population index.
std::size_t tournament_select(const Population& pop, std::size_t k, Rng& rng);

/// One-point coalition swap: picks one coalition index per side (sell draw
/// first), moves each parent's enemy-dominated members of that coalition
/// into the other parent's. Offspring may contain duplicated or missing
/// orders.
std::pair<Individual, Individual> crossover(const Individual& p1, const Individual& p2,
                                            const Session& session, Rng& rng);

/// For each side with at least two coalitions, takes the two with the lowest
/// relation scores and swaps one uniformly chosen enemy-involved member of
/// each (rng per side: pick in first coalition, pick in second). Sides with
/// no eligible member are left unchanged.
Individual mutate(const Individual& ind, const Session& session, Rng& rng);

/// Jaccard index over distinct member refs; two empty coalitions count as
/// identical (1).
double jaccard(const Coalition& a, const Coalition& b);

/// Mean over aligned coalition slots of (1 - jaccard), aligned per side by
/// greedy best-Jaccard matching; surplus coalitions on either side pad with
/// distance 1.
double individual_distance(const Individual& i1, const Individual& i2);

/// Eq-17 diversity of a population member: min cached distance to any other
/// member. Throws PopulationTooSmall on a single-member population.
double diversity_contribution(const Population& pop, std::size_t member_index);

/// Diversity of an outside individual against the population, optionally
/// with one member excluded.
double diversity_contribution(const Individual& ind, const Population& pop,
                              std::optional<std::size_t> excluded_member = std::nullopt);

/// Diversity-aware steady-state replacement. Among members with fitness
/// strictly below the offspring's, the one with the least diversity
/// contribution is replaced when the offspring is more diverse and not a
/// duplicate; otherwise the overall worst member is replaced when the
/// offspring is strictly fitter and not a duplicate; otherwise the
/// population is unchanged. Size is invariant.
void update_population(Population& pop, const Individual& offspring, double offspring_fitness);

/// Drops duplicate member occurrences (first kept), appends each missing
/// order to the smallest same-side coalition (ties by index), then removes
/// empty coalitions. The result is well-formed.
Individual repair(const Individual& ind, const Session& session,
                  const std::vector<OrderRef>& hour_orders);

/// Full search: init, then cfg.iterations rounds of two tournaments,
/// crossover, per-offspring mutate + evaluate + update. Tracks the elitist
/// best and returns it repaired.
RunTrace run(const Session& session, const std::vector<OrderRef>& hour_orders,
             const GaConfig& cfg);

/// "iteration,best_fitness,mean_fitness" rows with a header line.
std::string serialize_trace(const RunTrace& trace);

} // namespace peermarket
