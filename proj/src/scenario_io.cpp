#include <fstream>
#include <sstream>

#include "evcoord/errors.hpp"
#include "evcoord/scenario.hpp"
#include "json.hpp"

namespace evcoord {

namespace {

using Json = nlohmann::ordered_json;

Json route_to_json(const RouteSpec& r, const Scenario& s) {
    Json lead;
    lead["travel"] = r.lead_travel;
    lead["travel_uncertainty"] = r.lead_travel_uncertainty;
    lead["energy_uncertainty"] = r.lead_energy_uncertainty;
    Json legs = Json::array();
    for (const RouteLeg& leg : r.legs) {
        Json j;
        j["station"] = s.stations[leg.station].id;
        j["detour"] = leg.detour;
        j["travel"] = leg.travel;
        j["travel_uncertainty"] = leg.travel_uncertainty;
        j["energy_uncertainty"] = leg.energy_uncertainty;
        legs.push_back(std::move(j));
    }
    Json out;
    out["lead"] = std::move(lead);
    out["legs"] = std::move(legs);
    return out;
}

double need_number(const Json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ValidationError("scenario file: missing numeric field '" + key + "'");
    return j.at(key).get<double>();
}

int need_int(const Json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw ValidationError("scenario file: missing integer field '" + key + "'");
    return j.at(key).get<int>();
}

std::string need_string(const Json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw ValidationError("scenario file: missing string field '" + key + "'");
    return j.at(key).get<std::string>();
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
    Json j;
    j["format_version"] = 1;
    j["day_length"] = s.day_length;
    j["collection_days"] = s.collection_days;
    j["evaluation_days"] = s.evaluation_days;
    j["forecast_bin_width"] = s.forecast_bin_width;
    j["seed"] = s.seed;

    Json stations = Json::array();
    for (const StationSpec& st : s.stations) {
        Json e;
        e["id"] = st.id;
        e["port_count"] = st.port_count;
        e["charge_power"] = st.charge_power;
        e["electricity_price"] = st.electricity_price;
        stations.push_back(std::move(e));
    }
    j["stations"] = std::move(stations);

    Json trucks = Json::array();
    for (size_t i = 0; i < s.trucks.size(); ++i) {
        const TruckSpec& t = s.trucks[i];
        Json e;
        e["id"] = t.id;
        e["battery_full"] = t.battery_full;
        e["battery_initial"] = t.battery_initial;
        e["safety_margin"] = t.safety_margin;
        e["consumption_rate"] = t.consumption_rate;
        e["max_charge_power"] = t.max_charge_power;
        e["labor_rate"] = t.labor_rate;
        e["deadline_penalty_rate"] = t.deadline_penalty_rate;
        e["departure_time"] = t.departure_time;
        e["deadline"] = t.deadline;
        e["route"] = route_to_json(s.routes[i], s);
        trucks.push_back(std::move(e));
    }
    j["trucks"] = std::move(trucks);

    return j.dump(2) + "\n";
}

Scenario parse_scenario(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("scenario file: invalid JSON: ") + e.what());
    }
    if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
        throw ValidationError("scenario file: unsupported format_version");

    Scenario s;
    s.day_length = need_number(j, "day_length");
    s.collection_days = need_int(j, "collection_days");
    s.evaluation_days = need_int(j, "evaluation_days");
    s.forecast_bin_width = need_number(j, "forecast_bin_width");
    if (!j.contains("seed") || !j["seed"].is_number())
        throw ValidationError("scenario file: missing field 'seed'");
    s.seed = j["seed"].get<std::uint64_t>();

    if (!j.contains("stations") || !j["stations"].is_array())
        throw ValidationError("scenario file: missing 'stations' array");
    std::vector<std::string> station_ids;
    for (const Json& e : j["stations"]) {
        StationSpec st;
        st.id = need_string(e, "id");
        st.port_count = need_int(e, "port_count");
        st.charge_power = need_number(e, "charge_power");
        st.electricity_price = need_number(e, "electricity_price");
        station_ids.push_back(st.id);
        s.stations.push_back(std::move(st));
    }
    auto station_index = [&station_ids](const std::string& id) {
        for (size_t i = 0; i < station_ids.size(); ++i)
            if (station_ids[i] == id) return static_cast<int>(i);
        return -1;
    };

    if (!j.contains("trucks") || !j["trucks"].is_array())
        throw ValidationError("scenario file: missing 'trucks' array");
    for (const Json& e : j["trucks"]) {
        TruckSpec t;
        t.id = need_string(e, "id");
        t.battery_full = need_number(e, "battery_full");
        t.battery_initial = need_number(e, "battery_initial");
        t.safety_margin = need_number(e, "safety_margin");
        t.consumption_rate = need_number(e, "consumption_rate");
        t.max_charge_power = need_number(e, "max_charge_power");
        t.labor_rate = need_number(e, "labor_rate");
        t.deadline_penalty_rate = need_number(e, "deadline_penalty_rate");
        t.departure_time = need_number(e, "departure_time");
        t.deadline = need_number(e, "deadline");

        if (!e.contains("route") || !e["route"].is_object())
            throw ValidationError("scenario file: truck " + t.id + " lacks a route");
        const Json& rj = e["route"];
        RouteSpec r;
        const Json& lead = rj.at("lead");
        r.lead_travel = need_number(lead, "travel");
        r.lead_travel_uncertainty = need_number(lead, "travel_uncertainty");
        r.lead_energy_uncertainty = need_number(lead, "energy_uncertainty");
        if (!rj.contains("legs") || !rj["legs"].is_array())
            throw ValidationError("scenario file: route of " + t.id + " lacks legs");
        for (const Json& lj : rj["legs"]) {
            RouteLeg leg;
            leg.station = station_index(need_string(lj, "station"));
            leg.detour = need_number(lj, "detour");
            leg.travel = need_number(lj, "travel");
            leg.travel_uncertainty = need_number(lj, "travel_uncertainty");
            leg.energy_uncertainty = need_number(lj, "energy_uncertainty");
            r.legs.push_back(leg);
        }
        s.trucks.push_back(std::move(t));
        s.routes.push_back(std::move(r));
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void write_scenario_file(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << serialize_scenario(scenario);
}

namespace {

template <typename T>
void read_if(const Json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

std::string serialize_generation_config(const GenerationConfig& c) {
    Json j;
    j["station_count"] = c.station_count;
    j["truck_count"] = c.truck_count;
    j["segments_min"] = c.segments_min;
    j["segments_max"] = c.segments_max;
    j["lead_travel_min"] = c.lead_travel_min;
    j["lead_travel_max"] = c.lead_travel_max;
    j["travel_min"] = c.travel_min;
    j["travel_max"] = c.travel_max;
    j["detour_min"] = c.detour_min;
    j["detour_max"] = c.detour_max;
    j["travel_uncertainty"] = c.travel_uncertainty;
    j["energy_uncertainty"] = c.energy_uncertainty;
    if (!c.flow_weights.empty()) j["flow_weights"] = c.flow_weights;
    j["ports_per_route"] = c.ports_per_route;
    j["station_charge_power"] = c.station_charge_power;
    j["electricity_price"] = c.electricity_price;
    Json t;
    t["battery_full"] = c.truck.battery_full;
    t["safety_margin"] = c.truck.safety_margin;
    t["consumption_rate"] = c.truck.consumption_rate;
    t["max_charge_power"] = c.truck.max_charge_power;
    t["labor_rate"] = c.truck.labor_rate;
    t["deadline_penalty_rate"] = c.truck.deadline_penalty_rate;
    t["start_full"] = c.truck.start_full;
    j["truck"] = std::move(t);
    j["departure_window_begin"] = c.departure_window_begin;
    j["departure_window_end"] = c.departure_window_end;
    j["deadline_slack_min"] = c.deadline_slack_min;
    j["deadline_slack_max"] = c.deadline_slack_max;
    j["day_length"] = c.day_length;
    j["collection_days"] = c.collection_days;
    j["evaluation_days"] = c.evaluation_days;
    j["forecast_bin_width"] = c.forecast_bin_width;
    return j.dump(2) + "\n";
}

GenerationConfig parse_generation_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("generation config: invalid JSON: ") +
                              e.what());
    }
    GenerationConfig c;
    read_if(j, "station_count", c.station_count);
    read_if(j, "truck_count", c.truck_count);
    read_if(j, "segments_min", c.segments_min);
    read_if(j, "segments_max", c.segments_max);
    read_if(j, "lead_travel_min", c.lead_travel_min);
    read_if(j, "lead_travel_max", c.lead_travel_max);
    read_if(j, "travel_min", c.travel_min);
    read_if(j, "travel_max", c.travel_max);
    read_if(j, "detour_min", c.detour_min);
    read_if(j, "detour_max", c.detour_max);
    read_if(j, "travel_uncertainty", c.travel_uncertainty);
    read_if(j, "energy_uncertainty", c.energy_uncertainty);
    read_if(j, "flow_weights", c.flow_weights);
    read_if(j, "ports_per_route", c.ports_per_route);
    read_if(j, "station_charge_power", c.station_charge_power);
    read_if(j, "electricity_price", c.electricity_price);
    if (j.contains("truck")) {
        const Json& t = j["truck"];
        read_if(t, "battery_full", c.truck.battery_full);
        read_if(t, "safety_margin", c.truck.safety_margin);
        read_if(t, "consumption_rate", c.truck.consumption_rate);
        read_if(t, "max_charge_power", c.truck.max_charge_power);
        read_if(t, "labor_rate", c.truck.labor_rate);
        read_if(t, "deadline_penalty_rate", c.truck.deadline_penalty_rate);
        read_if(t, "start_full", c.truck.start_full);
    }
    read_if(j, "departure_window_begin", c.departure_window_begin);
    read_if(j, "departure_window_end", c.departure_window_end);
    read_if(j, "deadline_slack_min", c.deadline_slack_min);
    read_if(j, "deadline_slack_max", c.deadline_slack_max);
    read_if(j, "day_length", c.day_length);
    read_if(j, "collection_days", c.collection_days);
    read_if(j, "evaluation_days", c.evaluation_days);
    read_if(j, "forecast_bin_width", c.forecast_bin_width);
    return c;
}

GenerationConfig load_generation_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open generation config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_generation_config(buf.str());
}

}  // namespace evcoord
