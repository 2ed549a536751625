#pragma once

// Scenario generation, end-to-end session orchestration and the parameter
// study suites: gamma sweep, relation-mix sweep and weight promotion, plus a
// coalition-free greedy baseline for comparison.

#include <cstdint>
#include <string>
#include <vector>

#include "peermarket/domain.hpp"
#include "peermarket/ga.hpp"
#include "peermarket/matching.hpp"
#include "peermarket/scenario_io.hpp"

namespace peermarket {

struct ProsumerProfile {
    ProsumerId id;
    Energy min_kwh;
    Energy max_kwh;
};

struct RelationMix {
    double p_friend{1.0 / 3.0};
    double p_neutral{1.0 / 3.0};
    double p_enemy{1.0 / 3.0};
};

/// Distributional description of a community; a (spec, seed) pair fixes the
/// generated scenario byte for byte.
struct ScenarioSpec {
    std::vector<ProsumerProfile> profiles;
    RelationMix relation_mix;
    Price price_min{1};
    Price price_max{20};
    Price delta_min{0};
    Price delta_max{2};
    std::vector<int> hours{10, 11, 12};
    std::uint64_t seed{0};

    void check() const; // throws InvalidSpec
};

/// The 14-prosumer community used in the small demonstration scenario:
/// buyers B1-B4 and sellers S4-S13 with their energy intervals.
std::vector<ProsumerProfile> table1_profiles();

/// Synthetic community profiles for larger runs: per prosumer, min drawn
/// from {0,1,2} kWh and max from [4,23] kWh.
std::vector<ProsumerProfile> synthetic_profiles(std::size_t n_buyers, std::size_t n_sellers,
                                                std::uint64_t seed);

/// Draws one scenario. Relations and orders come from independent derived
/// streams, so two specs differing only in relation_mix generate identical
/// orders under the same seed. Relations are drawn per unordered pair in
/// canonical id order; orders per (hour ascending, prosumer ascending) as
/// quantity, price, delta; zero-quantity draws leave that prosumer out of
/// the hour but still consume all three draws.
Scenario generate_scenario(const ScenarioSpec& spec);

/// Relation tally of one final coalition against the graph.
struct CoalitionAudit {
    Side side{Side::Seller};
    std::vector<ProsumerId> members;
    int friendship{0};
    int neutral{0};
    int enemy{0};
};

struct HourMetrics {
    int hour{0};
    std::size_t orders_sell{0};
    std::size_t orders_buy{0};
    std::size_t coalitions_sell{0};
    std::size_t coalitions_buy{0};
    std::size_t transaction_count{0};
    Energy energy_transacted;
    double price_mean{0.0};
    Price price_min{0};
    Price price_max{0};
    double price_std{0.0};
    Energy supply;
    Energy demand;
    Energy residual_supply;
    Energy residual_demand;
    Energy imbalance;
    int social_index{0};
    std::vector<CoalitionAudit> audits;
};

struct SessionResult {
    std::vector<HourMetrics> hours;
    std::vector<std::string> traces; // per hour, serialize_trace output
};

struct SessionOptions {
    std::string ledger_path;          // empty: no ledger written
    bool keep_traces{false};
    double delivery_shortfall{0.0};   // [0,1): max fractional under-delivery
};

/// Full per-hour pipeline: coalition search (seeded per hour from
/// cfg.seed), repair, aggregation, matching, settlement, metrics; appends
/// session_open plus per-hour orders/coalitions/transactions/settlement
/// blocks when a ledger path is set. Hours where one side has no orders
/// skip the search and trade nothing; a single-sided hour reports its
/// orders as residuals.
SessionResult run_session(const Scenario& scenario, const GaConfig& cfg,
                          const SessionOptions& options = {});

/// Greedy coalition-free double auction over individual orders, same
/// metrics shape (no coalitions, social index 0).
SessionResult run_baseline(const Scenario& scenario);

/// Pipeline with precomputed final coalitions for one hour; exposed for the
/// oracle-driven tests.
HourMetrics run_hour_with_individual(const Session& session, int hour, const Individual& final_ind,
                                     const std::vector<OrderRef>& hour_orders);

// ---------------------------------------------------------------------------
// Metrics CSV

/// Documented header for session metrics tables; experiment tables prepend
/// their arm columns to it.
std::string metrics_csv_header();
std::string metrics_csv_row(const HourMetrics& m, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiments. Every suite runs `replications` sessions per arm with paired
// scenario seeds derive_seed(spec.seed, r) and the GA seeded from the
// scenario seed, so arms differ only in the swept parameter.

struct GammaSweepRow {
    Energy gamma;
    std::uint64_t seed{0};
    HourMetrics metrics;
};

struct GammaSweepResult {
    std::vector<GammaSweepRow> rows;
    std::string to_csv() const;
};

GammaSweepResult experiment_gamma_sweep(const ScenarioSpec& spec, const std::vector<Energy>& gammas,
                                        const GaConfig& cfg, std::size_t replications);

struct RelationSweepRow {
    RelationMix mix;
    std::uint64_t seed{0};
    HourMetrics metrics;
};

struct RelationSweepResult {
    std::vector<RelationSweepRow> rows;
    std::string to_csv() const;
};

RelationSweepResult experiment_relation_sweep(const ScenarioSpec& spec,
                                              const std::vector<RelationMix>& mixes,
                                              const GaConfig& cfg, std::size_t replications);

struct WeightSweepRow {
    WeightScheme scheme{WeightScheme::Uniform};
    std::uint64_t seed{0};
    HourMetrics metrics;
};

struct WeightSweepResult {
    std::vector<WeightSweepRow> rows;
    std::string to_csv() const;
};

WeightSweepResult experiment_weight_promotion(const ScenarioSpec& spec, const GaConfig& cfg,
                                              std::size_t replications);

/// Scenario seed of replication r and the GA seed used with it.
std::uint64_t replication_seed(const ScenarioSpec& spec, std::size_t r);
std::uint64_t ga_seed_for(std::uint64_t scenario_seed);

} // namespace peermarket
