#include "evcoord/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "evcoord/errors.hpp"
#include "evcoord/rng.hpp"

namespace evcoord {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ValidationError("generation config: " + field + ": " + what);
}

void check_config(const GenerationConfig& c) {
    require(c.station_count >= 1, "station_count", "must be at least 1");
    require(c.truck_count >= 1, "truck_count", "must be at least 1");
    require(c.segments_min >= 1, "segments_min", "must be at least 1");
    require(c.segments_max >= c.segments_min, "segments_max", "range is empty");
    require(c.segments_max <= c.station_count, "segments_max",
            "exceeds station_count (routes use distinct stations)");
    require(c.lead_travel_min > 0 && c.lead_travel_max >= c.lead_travel_min,
            "lead_travel_min/max", "range must be positive and nonempty");
    require(c.travel_min > 0 && c.travel_max >= c.travel_min, "travel_min/max",
            "range must be positive and nonempty");
    require(c.detour_min >= 0 && c.detour_max >= c.detour_min, "detour_min/max",
            "range must be nonnegative and nonempty");
    require(c.travel_uncertainty >= 0 && c.travel_uncertainty < 1,
            "travel_uncertainty", "must lie in [0,1)");
    require(c.energy_uncertainty >= 0 && c.energy_uncertainty < 1,
            "energy_uncertainty", "must lie in [0,1)");
    require(c.flow_weights.empty() ||
                static_cast<int>(c.flow_weights.size()) == c.station_count,
            "flow_weights", "size must match station_count");
    for (double w : c.flow_weights)
        require(w >= 0, "flow_weights", "weights must be nonnegative");
    if (!c.flow_weights.empty()) {
        double s = 0;
        for (double w : c.flow_weights) s += w;
        require(s > 0, "flow_weights", "at least one weight must be positive");
    }
    require(c.ports_per_route > 0, "ports_per_route", "must be positive");
    require(c.station_charge_power > 0, "station_charge_power", "must be positive");
    require(c.electricity_price >= 0, "electricity_price", "must be nonnegative");
    require(c.truck.battery_full > 0, "truck.battery_full", "must be positive");
    require(c.truck.safety_margin > 0 &&
                c.truck.safety_margin < c.truck.battery_full,
            "truck.safety_margin", "must lie in (0, battery_full)");
    require(c.truck.consumption_rate > 0, "truck.consumption_rate",
            "must be positive");
    require(c.truck.max_charge_power > 0, "truck.max_charge_power",
            "must be positive");
    require(c.truck.labor_rate >= 0, "truck.labor_rate", "must be nonnegative");
    require(c.truck.deadline_penalty_rate >= 0, "truck.deadline_penalty_rate",
            "must be nonnegative");
    require(c.day_length > 0, "day_length", "must be positive");
    require(c.departure_window_begin >= 0 &&
                c.departure_window_end >= c.departure_window_begin &&
                c.departure_window_end < c.day_length,
            "departure_window_begin/end", "window must fit inside one day");
    require(c.deadline_slack_min >= 0 &&
                c.deadline_slack_max >= c.deadline_slack_min,
            "deadline_slack_min/max", "range must be nonnegative and nonempty");
    require(c.collection_days >= 0, "collection_days", "must be nonnegative");
    require(c.evaluation_days >= 1, "evaluation_days", "must be at least 1");
    require(c.forecast_bin_width > 0 &&
                std::fmod(c.day_length, c.forecast_bin_width) == 0.0,
            "forecast_bin_width", "must divide day_length");

    // Battery feasibility: from a full charge at any station the truck must be
    // able to reach the next station (or the destination) under worst-case
    // energy noise, with the safety margin intact. Likewise from the origin to
    // the first station. Otherwise no charging plan can make routes safe.
    const double usable = c.truck.battery_full - c.truck.safety_margin;
    const double p = c.truck.consumption_rate;
    const double worst_seg = p * (c.detour_max +
                                  c.travel_max * (1.0 + c.energy_uncertainty) +
                                  c.detour_max);
    require(worst_seg <= usable, "travel_max",
            "worst-case segment energy exceeds usable battery; shrink "
            "travel/detour ranges or enlarge the truck battery");
    const double worst_lead =
        p * (c.lead_travel_max * (1.0 + c.energy_uncertainty) + c.detour_max);
    require(worst_lead <= usable, "lead_travel_max",
            "worst-case leading segment exceeds usable battery");
}

int weighted_pick(SplitMix64& rng, const std::vector<double>& weights,
                  const std::vector<bool>& used) {
    double total = 0;
    for (size_t i = 0; i < weights.size(); ++i)
        if (!used[i]) total += weights[i];
    double r = rng.next_double() * total;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (used[i]) continue;
        r -= weights[i];
        if (r <= 0) return static_cast<int>(i);
    }
    for (size_t i = weights.size(); i-- > 0;)
        if (!used[i]) return static_cast<int>(i);
    return 0;
}

}  // namespace

int ports_for_route_count(int route_count, double ports_per_route) {
    const int n = static_cast<int>(std::ceil(route_count * ports_per_route));
    return std::max(1, n);
}

Scenario generate_scenario(const GenerationConfig& c, std::uint64_t seed) {
    check_config(c);
    SplitMix64 rng(mix64(seed ^ 0x5ce4a51060bef5dbULL));

    Scenario s;
    s.day_length = c.day_length;
    s.collection_days = c.collection_days;
    s.evaluation_days = c.evaluation_days;
    s.seed = seed;
    s.forecast_bin_width = c.forecast_bin_width;

    s.stations.resize(c.station_count);
    for (int i = 0; i < c.station_count; ++i) {
        s.stations[i].id = "S" + std::to_string(i + 1);
        s.stations[i].charge_power = c.station_charge_power;
        s.stations[i].electricity_price = c.electricity_price;
        s.stations[i].port_count = 1;  // sized after routes are known
    }

    std::vector<double> weights = c.flow_weights;
    if (weights.empty()) weights.assign(c.station_count, 1.0);

    std::vector<int> routes_through(c.station_count, 0);
    const double p = c.truck.consumption_rate;

    for (int t = 0; t < c.truck_count; ++t) {
        TruckSpec truck;
        truck.id = "T" + std::to_string(t + 1);
        truck.battery_full = c.truck.battery_full;
        truck.safety_margin = c.truck.safety_margin;
        truck.consumption_rate = c.truck.consumption_rate;
        truck.max_charge_power = c.truck.max_charge_power;
        truck.labor_rate = c.truck.labor_rate;
        truck.deadline_penalty_rate = c.truck.deadline_penalty_rate;

        RouteSpec route;
        const int n_seg =
            static_cast<int>(rng.uniform_int(c.segments_min, c.segments_max));
        std::vector<bool> used(c.station_count, false);
        route.lead_travel = rng.uniform(c.lead_travel_min, c.lead_travel_max);
        route.lead_travel_uncertainty = c.travel_uncertainty;
        route.lead_energy_uncertainty = c.energy_uncertainty;
        for (int k = 0; k < n_seg; ++k) {
            RouteLeg leg;
            leg.station = weighted_pick(rng, weights, used);
            used[leg.station] = true;
            routes_through[leg.station] += 1;
            leg.detour = rng.uniform(c.detour_min, c.detour_max);
            leg.travel = rng.uniform(c.travel_min, c.travel_max);
            leg.travel_uncertainty = c.travel_uncertainty;
            leg.energy_uncertainty = c.energy_uncertainty;
            route.legs.push_back(leg);
        }

        // Initial battery: any value that safely covers the leading segment
        // under worst-case noise.
        const double need_at_r1 = truck.safety_margin + p * route.legs[0].detour;
        const double min_initial =
            need_at_r1 +
            p * route.lead_travel * (1.0 + route.lead_energy_uncertainty);
        truck.battery_initial =
            c.truck.start_full ? truck.battery_full
                               : rng.uniform(std::min(min_initial, truck.battery_full),
                                             truck.battery_full);

        truck.departure_time =
            rng.uniform(c.departure_window_begin, c.departure_window_end);

        double drive = route.lead_travel;
        double detour_sum = 0;
        for (const RouteLeg& leg : route.legs) {
            drive += leg.travel;
            detour_sum += leg.detour;
        }
        const double mean_detour = detour_sum / route.legs.size();
        const double charge_rate =
            std::min(c.station_charge_power, truck.max_charge_power);
        const double deficit =
            std::max(0.0, p * drive - (truck.battery_initial - truck.safety_margin));
        const double charge_time = deficit / charge_rate;
        const int stops =
            deficit > 0 ? 1 + static_cast<int>(deficit / (truck.battery_full -
                                                          truck.safety_margin))
                        : 0;
        const double slack = rng.uniform(c.deadline_slack_min, c.deadline_slack_max);
        truck.deadline = truck.departure_time +
                         (1.0 + slack) * (drive + charge_time + 2.0 * mean_detour * stops);

        s.trucks.push_back(std::move(truck));
        s.routes.push_back(std::move(route));
    }

    for (int i = 0; i < c.station_count; ++i)
        s.stations[i].port_count =
            ports_for_route_count(routes_through[i], c.ports_per_route);

    return s;
}

DisturbanceRealization sample_disturbances(const Scenario& scenario, int day,
                                           int truck_index) {
    if (truck_index < 0 || truck_index >= static_cast<int>(scenario.trucks.size()))
        throw ValidationError("sample_disturbances: unknown truck index");
    if (day < 0 || day >= scenario.total_days())
        throw ValidationError("sample_disturbances: day outside horizon");

    const RouteSpec& route = scenario.routes[truck_index];
    const TruckSpec& truck = scenario.trucks[truck_index];
    const int n = route.station_count();
    KeyedStream stream(scenario.seed);

    DisturbanceRealization r;
    r.travel_noise.resize(n + 1);
    r.energy_noise.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double tau = route.travel(k);
        const double b1 = route.travel_uncertainty(k) * tau;
        const double b2 =
            route.energy_uncertainty(k) * truck.consumption_rate * tau;
        r.travel_noise[k] = stream.symmetric(
            b1, static_cast<std::uint64_t>(day),
            static_cast<std::uint64_t>(truck_index), static_cast<std::uint64_t>(k), 0);
        r.energy_noise[k] = stream.symmetric(
            b2, static_cast<std::uint64_t>(day),
            static_cast<std::uint64_t>(truck_index), static_cast<std::uint64_t>(k), 1);
    }
    return r;
}

std::vector<Violation> validate_scenario(const Scenario& s) {
    std::vector<Violation> out;
    auto add = [&out](const std::string& entity, const std::string& field,
                      const std::string& message) {
        out.push_back({entity, field, message});
    };

    std::unordered_set<std::string> station_ids;
    for (const StationSpec& st : s.stations) {
        const std::string entity = "station " + st.id;
        if (!station_ids.insert(st.id).second)
            add(entity, "id", "duplicate station id");
        if (st.port_count < 1) add(entity, "port_count", "must be at least 1");
        if (!(st.charge_power > 0)) add(entity, "charge_power", "must be positive");
        if (st.electricity_price < 0)
            add(entity, "electricity_price", "must be nonnegative");
    }

    if (s.trucks.size() != s.routes.size())
        add("scenario", "routes", "each truck needs exactly one route");

    std::unordered_set<std::string> truck_ids;
    for (size_t i = 0; i < s.trucks.size(); ++i) {
        const TruckSpec& t = s.trucks[i];
        const std::string entity = "truck " + t.id;
        if (!truck_ids.insert(t.id).second) add(entity, "id", "duplicate truck id");
        if (!(t.safety_margin > 0))
            add(entity, "safety_margin", "must be positive");
        if (!(t.safety_margin < t.battery_initial))
            add(entity, "safety_margin", "must be below battery_initial");
        if (!(t.battery_initial <= t.battery_full))
            add(entity, "battery_initial", "must not exceed battery_full");
        if (!(t.consumption_rate > 0))
            add(entity, "consumption_rate", "must be positive");
        if (!(t.max_charge_power > 0))
            add(entity, "max_charge_power", "must be positive");
        if (t.labor_rate < 0) add(entity, "labor_rate", "must be nonnegative");
        if (t.deadline_penalty_rate < 0)
            add(entity, "deadline_penalty_rate", "must be nonnegative");
        if (!(t.departure_time < t.deadline))
            add(entity, "departure_time", "must precede the deadline");

        if (i >= s.routes.size()) break;
        const RouteSpec& r = s.routes[i];
        const std::string route_entity = "route of " + t.id;
        if (r.legs.empty()) add(route_entity, "legs", "route has no stations");
        if (!(r.lead_travel > 0))
            add(route_entity, "lead_travel", "must be positive");
        if (r.lead_travel_uncertainty < 0 || r.lead_travel_uncertainty >= 1)
            add(route_entity, "lead_travel_uncertainty", "must lie in [0,1)");
        if (r.lead_energy_uncertainty < 0 || r.lead_energy_uncertainty >= 1)
            add(route_entity, "lead_energy_uncertainty", "must lie in [0,1)");
        for (size_t k = 0; k < r.legs.size(); ++k) {
            const RouteLeg& leg = r.legs[k];
            const std::string leg_entity =
                route_entity + ", leg " + std::to_string(k + 1);
            if (leg.station < 0 ||
                leg.station >= static_cast<int>(s.stations.size()))
                add(leg_entity, "station", "station reference does not resolve");
            if (!(leg.travel > 0)) add(leg_entity, "travel", "must be positive");
            if (leg.detour < 0) add(leg_entity, "detour", "must be nonnegative");
            if (leg.travel_uncertainty < 0 || leg.travel_uncertainty >= 1)
                add(leg_entity, "travel_uncertainty", "must lie in [0,1)");
            if (leg.energy_uncertainty < 0 || leg.energy_uncertainty >= 1)
                add(leg_entity, "energy_uncertainty", "must lie in [0,1)");
        }
    }

    if (!(s.day_length > 0)) add("scenario", "day_length", "must be positive");
    if (s.collection_days < 0)
        add("scenario", "collection_days", "must be nonnegative");
    if (s.evaluation_days < 0)
        add("scenario", "evaluation_days", "must be nonnegative");
    if (!(s.forecast_bin_width > 0) ||
        std::fmod(s.day_length, s.forecast_bin_width) != 0.0)
        add("scenario", "forecast_bin_width", "must divide day_length");

    return out;
}

}  // namespace evcoord
