// Command-line front end: scenario generation, session runs, the baseline
// comparator, the three parameter sweeps and ledger verification.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "peermarket/ledger.hpp"
#include "peermarket/payloads.hpp"
#include "peermarket/scenario_io.hpp"
#include "peermarket/sim.hpp"

namespace {

using namespace peermarket;

struct SpecFlags {
    std::string profile = "table1";
    std::size_t buyers = 24;
    std::size_t sellers = 24;
    std::string mix = "0.334,0.333,0.333";
    std::int64_t price_min = 1;
    std::int64_t price_max = 20;
    std::int64_t delta_min = 0;
    std::int64_t delta_max = 2;
    std::string hours = "10,11,12";
    std::uint64_t seed = 1;
};

struct GaFlags {
    std::uint64_t seed = 1;
    double gamma = 10.0;
    std::size_t pop_size = 30;
    std::size_t iterations = 200;
    std::size_t tournament_k = 3;
    double m = 1.0;
    std::string weights = "uniform";
    double lambda_dup = 1.0;
    double lambda_miss = 1.0;
};

std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(std::stod(tok));
    return out;
}

std::vector<int> parse_csv_ints(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(std::stoi(tok));
    return out;
}

RelationMix parse_mix(const std::string& s) {
    const auto v = parse_csv_doubles(s);
    if (v.size() != 3)
        throw SimError(ErrorCode::InvalidSpec, "mix needs three comma-separated probabilities");
    return RelationMix{v[0], v[1], v[2]};
}

Energy energy_from_double(double kwh) {
    return Energy::from_milli(static_cast<std::int64_t>(kwh * 1000.0 + 0.5));
}

ScenarioSpec build_spec(const SpecFlags& f) {
    ScenarioSpec spec;
    if (f.profile == "table1")
        spec.profiles = table1_profiles();
    else if (f.profile == "synthetic")
        spec.profiles = synthetic_profiles(f.buyers, f.sellers, f.seed);
    else
        throw SimError(ErrorCode::InvalidSpec, "profile must be table1 or synthetic");
    spec.relation_mix = parse_mix(f.mix);
    spec.price_min = f.price_min;
    spec.price_max = f.price_max;
    spec.delta_min = f.delta_min;
    spec.delta_max = f.delta_max;
    spec.hours = parse_csv_ints(f.hours);
    spec.seed = f.seed;
    return spec;
}

GaConfig build_cfg(const GaFlags& f) {
    GaConfig cfg;
    cfg.seed = f.seed;
    cfg.gamma = energy_from_double(f.gamma);
    cfg.pop_size = f.pop_size;
    cfg.iterations = f.iterations;
    cfg.tournament_k = f.tournament_k;
    cfg.m = f.m;
    const auto scheme = parse_weight_scheme(f.weights);
    if (!scheme)
        throw SimError(ErrorCode::InvalidSpec, "weights must be uniform or promoted");
    cfg.weight_scheme = *scheme;
    cfg.lambda_dup = f.lambda_dup;
    cfg.lambda_miss = f.lambda_miss;
    return cfg;
}

void add_spec_flags(CLI::App* app, SpecFlags& f) {
    app->add_option("--profile", f.profile, "prosumer profiles: table1 or synthetic");
    app->add_option("--buyers", f.buyers, "buyer count for synthetic profiles");
    app->add_option("--sellers", f.sellers, "seller count for synthetic profiles");
    app->add_option("--mix", f.mix, "relation mix p_friend,p_neutral,p_enemy");
    app->add_option("--price-min", f.price_min, "minimum limit price (Gwei/kWh)");
    app->add_option("--price-max", f.price_max, "maximum limit price (Gwei/kWh)");
    app->add_option("--delta-min", f.delta_min, "minimum price tolerance");
    app->add_option("--delta-max", f.delta_max, "maximum price tolerance");
    app->add_option("--hours", f.hours, "comma-separated market hours");
    app->add_option("--seed", f.seed, "scenario seed");
}

void add_ga_flags(CLI::App* app, GaFlags& f, bool with_gamma = true) {
    app->add_option("--seed", f.seed, "run seed");
    if (with_gamma)
        app->add_option("--gamma", f.gamma, "coalition threshold (kWh)");
    app->add_option("--pop-size", f.pop_size, "population size");
    app->add_option("--iterations", f.iterations, "search iterations");
    app->add_option("--tournament-k", f.tournament_k, "tournament size");
    app->add_option("--m", f.m, "distance exponent");
    app->add_option("--weights", f.weights, "coalition weights: uniform or promoted");
    app->add_option("--lambda-dup", f.lambda_dup, "duplicate-order penalty");
    app->add_option("--lambda-miss", f.lambda_miss, "missing-order penalty");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw SimError(ErrorCode::StorageFailure, "cannot write " + path.string());
    out << content;
}

std::string session_csv(const SessionResult& result, std::uint64_t seed) {
    std::string csv = metrics_csv_header() + "\n";
    for (const HourMetrics& m : result.hours)
        csv += metrics_csv_row(m, seed) + "\n";
    return csv;
}

std::string audit_table(const SessionResult& result) {
    std::string out = "hour,side,members,friendship,neutral,enemy\n";
    for (const HourMetrics& m : result.hours) {
        for (const CoalitionAudit& a : m.audits) {
            std::string members;
            for (ProsumerId id : a.members) {
                if (!members.empty())
                    members += " ";
                members += format_prosumer(id);
            }
            out += std::to_string(m.hour) + "," + (a.side == Side::Seller ? "S" : "B") + "," +
                   members + "," + std::to_string(a.friendship) + "," +
                   std::to_string(a.neutral) + "," + std::to_string(a.enemy) + "\n";
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"peermarket: coalition-based peer-to-peer energy market simulator"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "draw a scenario file from a spec");
    SpecFlags gen_spec;
    std::string gen_out = "scenario.txt";
    add_spec_flags(gen, gen_spec);
    gen->add_option("--out", gen_out, "output scenario file");

    // run
    auto* run_cmd = app.add_subcommand("run", "run one market session over a scenario file");
    std::string run_scenario;
    std::string run_out = "out";
    bool run_traces = false;
    double run_shortfall = 0.0;
    GaFlags run_ga;
    run_cmd->add_option("scenario", run_scenario, "scenario file")->required();
    add_ga_flags(run_cmd, run_ga);
    run_cmd->add_option("--out", run_out, "output directory");
    run_cmd->add_flag("--traces", run_traces, "write per-hour fitness traces");
    run_cmd->add_option("--delivery-shortfall", run_shortfall,
                        "max fractional under-delivery applied to sellers");

    // baseline
    auto* base_cmd = app.add_subcommand("baseline", "greedy order-level double auction");
    std::string base_scenario;
    std::string base_out = "out";
    base_cmd->add_option("scenario", base_scenario, "scenario file")->required();
    base_cmd->add_option("--out", base_out, "output directory");

    // sweep-gamma
    auto* sg = app.add_subcommand("sweep-gamma", "coalition-threshold sweep over seeded sessions");
    SpecFlags sg_spec;
    GaFlags sg_ga;
    std::string sg_gammas = "6,12,20";
    std::size_t sg_reps = 30;
    std::string sg_out = "sweep_gamma.csv";
    add_spec_flags(sg, sg_spec);
    add_ga_flags(sg, sg_ga, false);
    sg->add_option("--gamma", sg_gammas, "comma-separated gamma values (kWh)");
    sg->add_option("--replications", sg_reps, "seeded sessions per arm");
    sg->add_option("--out", sg_out, "output csv");

    // sweep-relations
    auto* sr = app.add_subcommand("sweep-relations", "relation-mix sweep over seeded sessions");
    SpecFlags sr_spec;
    GaFlags sr_ga;
    std::vector<std::string> sr_mixes;
    std::size_t sr_reps = 30;
    std::string sr_out = "sweep_relations.csv";
    add_spec_flags(sr, sr_spec);
    add_ga_flags(sr, sr_ga);
    sr->add_option("--arm-mix", sr_mixes,
                   "swept mixes f,n,e (repeatable; default friendship/neutral/enemy dominant)");
    sr->add_option("--replications", sr_reps, "seeded sessions per arm");
    sr->add_option("--out", sr_out, "output csv");

    // sweep-weights
    auto* sw = app.add_subcommand("sweep-weights", "uniform vs relation-promoted weights");
    SpecFlags sw_spec;
    GaFlags sw_ga;
    std::size_t sw_reps = 30;
    std::string sw_out = "sweep_weights.csv";
    add_spec_flags(sw, sw_spec);
    add_ga_flags(sw, sw_ga);
    sw->add_option("--replications", sw_reps, "seeded sessions per arm");
    sw->add_option("--out", sw_out, "output csv");

    // verify-ledger
    auto* vl = app.add_subcommand("verify-ledger", "check a ledger file's hash chain");
    std::string vl_path;
    vl->add_option("ledger", vl_path, "ledger file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const Scenario scenario = generate_scenario(build_spec(gen_spec));
            save_scenario_file(scenario, gen_out);
            std::cout << "wrote " << gen_out << " (" << scenario.prosumers.size()
                      << " prosumers, " << scenario.orders.size() << " orders)\n";
        } else if (run_cmd->parsed()) {
            const Scenario scenario = load_scenario_file(run_scenario);
            const GaConfig cfg = build_cfg(run_ga);
            std::filesystem::create_directories(run_out);
            SessionOptions options;
            options.ledger_path = (std::filesystem::path(run_out) / "ledger.bin").string();
            options.keep_traces = run_traces;
            options.delivery_shortfall = run_shortfall;
            const SessionResult result = run_session(scenario, cfg, options);
            write_file(std::filesystem::path(run_out) / "metrics.csv",
                       session_csv(result, cfg.seed));
            write_file(std::filesystem::path(run_out) / "coalition_audit.csv",
                       audit_table(result));
            if (run_traces) {
                for (std::size_t i = 0; i < result.traces.size(); ++i)
                    write_file(std::filesystem::path(run_out) /
                                   ("trace_h" + std::to_string(result.hours[i].hour) + ".csv"),
                               result.traces[i]);
            }
            std::cout << session_csv(result, cfg.seed);
        } else if (base_cmd->parsed()) {
            const Scenario scenario = load_scenario_file(base_scenario);
            const SessionResult result = run_baseline(scenario);
            std::filesystem::create_directories(base_out);
            write_file(std::filesystem::path(base_out) / "baseline_metrics.csv",
                       session_csv(result, 0));
            std::cout << session_csv(result, 0);
        } else if (sg->parsed()) {
            std::vector<Energy> gammas;
            for (double g : parse_csv_doubles(sg_gammas))
                gammas.push_back(energy_from_double(g));
            const auto result =
                experiment_gamma_sweep(build_spec(sg_spec), gammas, build_cfg(sg_ga), sg_reps);
            write_file(sg_out, result.to_csv());
            std::cout << "wrote " << sg_out << " (" << result.rows.size() << " rows)\n";
        } else if (sr->parsed()) {
            std::vector<RelationMix> mixes;
            if (sr_mixes.empty()) {
                mixes = {RelationMix{0.6, 0.3, 0.1}, RelationMix{0.1, 0.8, 0.1},
                         RelationMix{0.1, 0.2, 0.7}};
            } else {
                for (const auto& m : sr_mixes)
                    mixes.push_back(parse_mix(m));
            }
            const auto result =
                experiment_relation_sweep(build_spec(sr_spec), mixes, build_cfg(sr_ga), sr_reps);
            write_file(sr_out, result.to_csv());
            std::cout << "wrote " << sr_out << " (" << result.rows.size() << " rows)\n";
        } else if (sw->parsed()) {
            const auto result =
                experiment_weight_promotion(build_spec(sw_spec), build_cfg(sw_ga), sw_reps);
            write_file(sw_out, result.to_csv());
            std::cout << "wrote " << sw_out << " (" << result.rows.size() << " rows)\n";
        } else if (vl->parsed()) {
            const VerificationReport report = verify_chain(vl_path);
            if (report.ok) {
                std::cout << "ok: " << report.verified_blocks << " blocks verified\n";
            } else {
                std::cout << "FAIL at block " << *report.first_bad_block << ": " << report.detail
                          << " (" << report.verified_blocks << " blocks verified before it)\n";
                return 1;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
