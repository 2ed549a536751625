#include <cstdio>

#include "peermarket/sim.hpp"

namespace peermarket {

std::uint64_t replication_seed(const ScenarioSpec& spec, std::size_t r) {
    return derive_seed(spec.seed, 0x5EED0000ULL + r);
}

std::uint64_t ga_seed_for(std::uint64_t scenario_seed) {
    return derive_seed(scenario_seed, 0x6A);
}

namespace {

/// One arm replication: generate with the paired seed, run, return per-hour
/// metrics.
std::vector<HourMetrics> run_arm(const ScenarioSpec& arm_spec, const GaConfig& cfg,
                                 std::uint64_t scenario_seed) {
    ScenarioSpec spec = arm_spec;
    spec.seed = scenario_seed;
    const Scenario scenario = generate_scenario(spec);
    GaConfig run_cfg = cfg;
    run_cfg.seed = ga_seed_for(scenario_seed);
    return run_session(scenario, run_cfg).hours;
}

std::string csv_prefix_row(const std::string& prefix, const HourMetrics& m, std::uint64_t seed) {
    return prefix + "," + metrics_csv_row(m, seed);
}

} // namespace

GammaSweepResult experiment_gamma_sweep(const ScenarioSpec& spec, const std::vector<Energy>& gammas,
                                        const GaConfig& cfg, std::size_t replications) {
    if (gammas.size() < 2)
        throw SimError(ErrorCode::InvalidSpec, "gamma sweep needs at least 2 values");
    GammaSweepResult result;
    for (Energy gamma : gammas) {
        GaConfig arm_cfg = cfg;
        arm_cfg.gamma = gamma;
        for (std::size_t r = 0; r < replications; ++r) {
            const std::uint64_t seed = replication_seed(spec, r);
            for (HourMetrics& m : run_arm(spec, arm_cfg, seed))
                result.rows.push_back({gamma, seed, std::move(m)});
        }
    }
    return result;
}

std::string GammaSweepResult::to_csv() const {
    std::string out = "gamma," + metrics_csv_header() + "\n";
    for (const auto& row : rows)
        out += csv_prefix_row(format_energy(row.gamma), row.metrics, row.seed) + "\n";
    return out;
}

RelationSweepResult experiment_relation_sweep(const ScenarioSpec& spec,
                                              const std::vector<RelationMix>& mixes,
                                              const GaConfig& cfg, std::size_t replications) {
    if (mixes.size() < 2)
        throw SimError(ErrorCode::InvalidSpec, "relation sweep needs at least 2 mixes");
    RelationSweepResult result;
    for (const RelationMix& mix : mixes) {
        ScenarioSpec arm_spec = spec;
        arm_spec.relation_mix = mix;
        for (std::size_t r = 0; r < replications; ++r) {
            const std::uint64_t seed = replication_seed(spec, r);
            for (HourMetrics& m : run_arm(arm_spec, cfg, seed))
                result.rows.push_back({mix, seed, std::move(m)});
        }
    }
    return result;
}

std::string RelationSweepResult::to_csv() const {
    std::string out = "p_friend,p_neutral,p_enemy," + metrics_csv_header() + "\n";
    char prefix[64];
    for (const auto& row : rows) {
        std::snprintf(prefix, sizeof(prefix), "%.3f,%.3f,%.3f", row.mix.p_friend,
                      row.mix.p_neutral, row.mix.p_enemy);
        out += csv_prefix_row(prefix, row.metrics, row.seed) + "\n";
    }
    return out;
}

WeightSweepResult experiment_weight_promotion(const ScenarioSpec& spec, const GaConfig& cfg,
                                              std::size_t replications) {
    WeightSweepResult result;
    for (WeightScheme scheme : {WeightScheme::Uniform, WeightScheme::RelationPromoted}) {
        GaConfig arm_cfg = cfg;
        arm_cfg.weight_scheme = scheme;
        for (std::size_t r = 0; r < replications; ++r) {
            const std::uint64_t seed = replication_seed(spec, r);
            for (HourMetrics& m : run_arm(spec, arm_cfg, seed))
                result.rows.push_back({scheme, seed, std::move(m)});
        }
    }
    return result;
}

std::string WeightSweepResult::to_csv() const {
    std::string out = "weight_scheme," + metrics_csv_header() + "\n";
    for (const auto& row : rows) {
        const char* name = row.scheme == WeightScheme::Uniform ? "uniform" : "promoted";
        out += csv_prefix_row(name, row.metrics, row.seed) + "\n";
    }
    return out;
}

} // namespace peermarket
