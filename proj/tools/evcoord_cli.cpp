#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "evcoord/engine.hpp"
#include "evcoord/errors.hpp"
#include "evcoord/report.hpp"
#include "evcoord/scenario.hpp"

namespace fs = std::filesystem;
using namespace evcoord;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct InputArgs {
    std::string scenario_path;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> days;  // "C+E"
    std::optional<double> uncertainty;
};

void add_input_flags(CLI::App* cmd, InputArgs& in) {
    cmd->add_option("--scenario", in.scenario_path, "scenario JSON file");
    cmd->add_option("--config", in.config_path,
                    "generation config JSON (a scenario is generated on the fly)");
    cmd->add_option("--seed", in.seed, "seed override");
    cmd->add_option("--days", in.days,
                    "phase override as COLLECTION+EVALUATION, e.g. 2+8");
    cmd->add_option("--uncertainty", in.uncertainty,
                    "apply this travel/energy uncertainty level to every segment");
}

void apply_days(Scenario& s, const std::string& spec) {
    const auto plus = spec.find('+');
    try {
        if (plus == std::string::npos) throw std::invalid_argument(spec);
        s.collection_days = std::stoi(spec.substr(0, plus));
        s.evaluation_days = std::stoi(spec.substr(plus + 1));
    } catch (const std::exception&) {
        throw ValidationError("--days expects COLLECTION+EVALUATION, e.g. 2+8");
    }
}

void apply_uncertainty(Scenario& s, double level) {
    if (level < 0 || level >= 1)
        throw ValidationError("--uncertainty must lie in [0,1)");
    for (RouteSpec& r : s.routes) {
        r.lead_travel_uncertainty = level;
        r.lead_energy_uncertainty = level;
        for (RouteLeg& leg : r.legs) {
            leg.travel_uncertainty = level;
            leg.energy_uncertainty = level;
        }
    }
}

Scenario resolve_scenario(const InputArgs& in) {
    const bool have_file = !in.scenario_path.empty();
    const bool have_config = !in.config_path.empty();
    if (have_file == have_config)
        throw ValidationError("give exactly one of --scenario or --config");
    Scenario s;
    if (have_file) {
        s = load_scenario_file(in.scenario_path);
        if (in.seed) {
            // A reseeded scenario redraws nothing but the disturbance streams.
            s.seed = *in.seed;
        }
    } else {
        const GenerationConfig config = load_generation_config_file(in.config_path);
        s = generate_scenario(config, in.seed.value_or(0));
    }
    if (in.days) apply_days(s, *in.days);
    if (in.uncertainty) apply_uncertainty(s, *in.uncertainty);

    const auto violations = validate_scenario(s);
    if (!violations.empty()) {
        for (const Violation& v : violations)
            std::cerr << "invalid scenario: " << v.entity << ": " << v.field
                      << ": " << v.message << "\n";
        throw ValidationError("scenario failed validation with " +
                              std::to_string(violations.size()) + " problem(s)");
    }
    return s;
}

Strategy parse_strategy(const std::string& name) {
    if (name == "offline") return Strategy::Offline;
    if (name == "dynamic") return Strategy::Dynamic;
    if (name == "proposed") return Strategy::Proposed;
    throw ValidationError("unknown strategy '" + name +
                          "' (expected offline, dynamic or proposed)");
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory " + dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Charging coordination simulator for electric truck fleets"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic scenario file");
    std::string gen_template = "paper-sv";
    std::string gen_config_path;
    std::string gen_out = "scenario.json";
    std::uint64_t gen_seed = 0;
    std::optional<int> gen_stations, gen_trucks;
    std::optional<double> gen_ports_per_route, gen_uncertainty;
    gen->add_option("--template", gen_template,
                    "parameter template (paper-sv: the published truck and "
                    "station parameter set)");
    gen->add_option("--config", gen_config_path, "generation config JSON file");
    gen->add_option("--stations", gen_stations, "station count override");
    gen->add_option("--trucks", gen_trucks, "truck count override");
    gen->add_option("--ports-per-route", gen_ports_per_route,
                    "port-count coefficient override");
    gen->add_option("--uncertainty", gen_uncertainty,
                    "travel/energy uncertainty level override");
    gen->add_option("--seed", gen_seed, "generation seed");
    gen->add_option("--out", gen_out, "output path");

    // run
    auto* run = app.add_subcommand("run", "simulate one strategy");
    InputArgs run_in;
    add_input_flags(run, run_in);
    std::string run_strategy = "proposed";
    std::string run_out = "out";
    bool run_export_events = false;
    bool run_export_forecast = false;
    run->add_option("--strategy", run_strategy, "offline | dynamic | proposed");
    run->add_option("--out", run_out, "output directory");
    run->add_flag("--export-events", run_export_events, "write events.csv");
    run->add_flag("--export-forecast", run_export_forecast,
                  "write per-station forecast-model CSVs");

    // compare
    auto* cmp = app.add_subcommand("compare", "run all three strategies");
    InputArgs cmp_in;
    add_input_flags(cmp, cmp_in);
    std::string cmp_out = "out";
    bool cmp_export_events = false;
    cmp->add_option("--out", cmp_out, "output directory");
    cmp->add_flag("--export-events", cmp_export_events,
                  "write per-strategy events CSVs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (gen->parsed()) {
            GenerationConfig config;
            if (!gen_config_path.empty()) {
                config = load_generation_config_file(gen_config_path);
            } else if (gen_template != "paper-sv") {
                throw ValidationError("unknown template '" + gen_template + "'");
            }
            if (gen_stations) {
                config.station_count = *gen_stations;
                // Routes visit distinct stations; shrink the segment range to
                // whatever the station count permits.
                config.segments_max =
                    std::min(config.segments_max, config.station_count);
                config.segments_min =
                    std::min(config.segments_min, config.segments_max);
            }
            if (gen_trucks) config.truck_count = *gen_trucks;
            if (gen_ports_per_route) config.ports_per_route = *gen_ports_per_route;
            if (gen_uncertainty) {
                config.travel_uncertainty = *gen_uncertainty;
                config.energy_uncertainty = *gen_uncertainty;
            }
            const Scenario s = generate_scenario(config, gen_seed);
            write_scenario_file(s, gen_out);
            std::cout << "wrote " << gen_out << " (" << s.stations.size()
                      << " stations, " << s.trucks.size() << " trucks)\n";
            return kExitOk;
        }

        if (run->parsed()) {
            const Scenario s = resolve_scenario(run_in);
            ensure_dir(run_out);
            EngineOptions options;
            options.record_events = run_export_events;
            const TwoPhaseResult result =
                run_two_phase(s, parse_strategy(run_strategy), options);
            const fs::path dir(run_out);
            write_metrics_csv((dir / "metrics.csv").string(), result.log);
            write_summary_text((dir / "summary.txt").string(), result.log);
            if (run_export_events)
                write_events_csv((dir / "events.csv").string(), result.log);
            if (run_export_forecast)
                write_forecast_models(run_out, s, result.models);
            const RunSummary sum = summarize(result.log, true);
            std::cout << "strategy " << run_strategy << ": "
                      << sum.trips << " evaluation trips, total waiting "
                      << format_number(sum.total_waiting) << " min\n";
            return kExitOk;
        }

        if (cmp->parsed()) {
            const Scenario s = resolve_scenario(cmp_in);
            ensure_dir(cmp_out);
            EngineOptions options;
            options.record_events = cmp_export_events;
            const std::vector<StrategyRun> runs = compare_strategies(s, options);
            write_comparison_csvs(cmp_out, s, runs);
            const fs::path dir(cmp_out);
            write_comparison_summary((dir / "summary.txt").string(), s, runs);
            for (const StrategyRun& r : runs) {
                const std::string name = strategy_name(r.strategy);
                write_metrics_csv((dir / ("metrics_" + name + ".csv")).string(),
                                  r.result.log);
                if (cmp_export_events)
                    write_events_csv((dir / ("events_" + name + ".csv")).string(),
                                     r.result.log);
            }
            std::cout << "comparison written to " << cmp_out << "\n";
            return kExitOk;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
