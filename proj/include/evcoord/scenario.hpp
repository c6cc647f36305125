#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace evcoord {

// Canonical units throughout the library: minutes, kWh, kWh/min, EUR, EUR/min.
// Time epoch: minute 0 is 00:00 of day 1; time-of-day is time mod day_length.

struct StationSpec {
    std::string id;
    int port_count = 1;
    double charge_power = 0.0;       // kWh/min
    double electricity_price = 0.0;  // EUR/kWh
};

struct TruckSpec {
    std::string id;
    double battery_full = 0.0;          // kWh
    double battery_initial = 0.0;       // kWh at origin
    double safety_margin = 0.0;         // kWh, never go below
    double consumption_rate = 0.0;      // kWh/min of driving
    double max_charge_power = 0.0;      // kWh/min the battery accepts
    double labor_rate = 0.0;            // EUR/min
    double deadline_penalty_rate = 0.0; // EUR/min past deadline
    double departure_time = 0.0;        // minutes from start of the trip's day
    double deadline = 0.0;              // minutes from start of the trip's day
};

/// One station stop along a route plus the main-road segment that follows it.
struct RouteLeg {
    int station = -1;                // index into Scenario::stations
    double detour = 0.0;             // one-way ramp->station time, minutes
    double travel = 0.0;             // ramp k -> ramp k+1 nominal time, minutes
    double travel_uncertainty = 0.0; // fraction of travel, [0,1)
    double energy_uncertainty = 0.0; // fraction of nominal segment energy, [0,1)
};

struct RouteSpec {
    // Leading segment: origin -> first ramp.
    double lead_travel = 0.0;
    double lead_travel_uncertainty = 0.0;
    double lead_energy_uncertainty = 0.0;
    std::vector<RouteLeg> legs;

    int station_count() const { return static_cast<int>(legs.size()); }

    // Paper-style indexing helpers: segment k runs from ramp k to ramp k+1,
    // k = 0..N, and station k sits off ramp k, k = 1..N.
    double travel(int k) const { return k == 0 ? lead_travel : legs[k - 1].travel; }
    double detour(int k) const { return legs[k - 1].detour; }
    int station(int k) const { return legs[k - 1].station; }
    double travel_uncertainty(int k) const {
        return k == 0 ? lead_travel_uncertainty : legs[k - 1].travel_uncertainty;
    }
    double energy_uncertainty(int k) const {
        return k == 0 ? lead_energy_uncertainty : legs[k - 1].energy_uncertainty;
    }
};

struct Scenario {
    std::vector<StationSpec> stations;
    std::vector<TruckSpec> trucks;
    std::vector<RouteSpec> routes;  // routes[i] belongs to trucks[i]
    double day_length = 1440.0;
    int collection_days = 10;
    int evaluation_days = 30;
    std::uint64_t seed = 0;
    double forecast_bin_width = 5.0;

    int total_days() const { return collection_days + evaluation_days; }
};

/// Realized noise for one truck on one day; index k = 0..N per road segment.
struct DisturbanceRealization {
    std::vector<double> travel_noise;  // minutes, within +-d1*travel
    std::vector<double> energy_noise;  // kWh, within +-d2*consumption*travel
};

struct Violation {
    std::string entity;  // e.g. "truck T3" or "route of T3, leg 2"
    std::string field;
    std::string message;
};

struct TruckTemplate {
    double battery_full = 624.0;
    double safety_margin = 156.0;            // 25% of installed capacity
    double consumption_rate = 1.83;
    double max_charge_power = 350.0 / 60.0;  // 350 kW
    double labor_rate = 2.0;
    double deadline_penalty_rate = 10.0;
    bool start_full = false;  // else initial battery uniform in the feasible range
};

struct GenerationConfig {
    int station_count = 8;
    int truck_count = 50;
    int segments_min = 2;
    int segments_max = 4;
    double lead_travel_min = 30.0;
    double lead_travel_max = 90.0;
    double travel_min = 50.0;
    double travel_max = 130.0;
    double detour_min = 2.0;
    double detour_max = 6.0;
    double travel_uncertainty = 0.05;
    double energy_uncertainty = 0.05;
    std::vector<double> flow_weights;  // per-station sampling weight; empty = uniform
    double ports_per_route = 0.08;     // port_count = max(1, ceil(coef * routes through))
    double station_charge_power = 300.0 / 60.0;  // 300 kW
    double electricity_price = 0.36;
    TruckTemplate truck;
    double departure_window_begin = 420.0;  // 07:00
    double departure_window_end = 600.0;    // 10:00
    double deadline_slack_min = 0.05;
    double deadline_slack_max = 0.25;
    double day_length = 1440.0;
    int collection_days = 10;
    int evaluation_days = 30;
    double forecast_bin_width = 5.0;
};

/// Port-count sizing rule: proportional to the number of routes through the
/// station, rounded up, at least one.
int ports_for_route_count(int route_count, double ports_per_route);

/// Builds a scenario from the config; a pure function of (config, seed).
/// Throws ValidationError naming the offending field on bad ranges or on
/// ranges that cannot yield battery-feasible routes.
Scenario generate_scenario(const GenerationConfig& config, std::uint64_t seed);

/// Bounded noise per road segment, drawn from a counter-based stream keyed by
/// (scenario seed, day, truck, segment, channel).
DisturbanceRealization sample_disturbances(const Scenario& scenario, int day,
                                           int truck_index);

/// Empty result iff every type invariant holds.
std::vector<Violation> validate_scenario(const Scenario& scenario);

// On-disk form: a versioned JSON document; serialization is byte-deterministic
// and parse(serialize(s)) reproduces s exactly.
std::string serialize_scenario(const Scenario& scenario);
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);
void write_scenario_file(const Scenario& scenario, const std::string& path);

std::string serialize_generation_config(const GenerationConfig& config);
GenerationConfig parse_generation_config(const std::string& text);
GenerationConfig load_generation_config_file(const std::string& path);

}  // namespace evcoord
