#include "evcoord/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "evcoord/errors.hpp"

namespace evcoord {

namespace {
constexpr double kEnergyTol = 1e-9;  // kWh slack for safety-floor checks
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Offline: return "offline";
        case Strategy::Dynamic: return "dynamic";
        case Strategy::Proposed: return "proposed";
    }
    return "?";
}

std::string event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::DepartOrigin: return "depart_origin";
        case EventKind::ReachRamp: return "reach_ramp";
        case EventKind::ArriveStation: return "arrive_station";
        case EventKind::StartCharge: return "start_charge";
        case EventKind::FinishCharge: return "finish_charge";
        case EventKind::ReturnToRamp: return "return_to_ramp";
        case EventKind::ReachDestination: return "reach_destination";
    }
    return "?";
}

void MetricsLog::append(MetricsLog&& later) {
    day_count = later.first_day + later.day_count - first_day;
    trips.insert(trips.end(), later.trips.begin(), later.trips.end());
    visits.insert(visits.end(), later.visits.begin(), later.visits.end());
    replans.insert(replans.end(), later.replans.begin(), later.replans.end());
    events.insert(events.end(), later.events.begin(), later.events.end());
    ramp_violations += later.ramp_violations;
    destination_violations += later.destination_violations;
}

struct SimulationSession::Impl {
    struct StationRuntime {
        PortSchedule schedule;
        ForecastModel model;
    };

    struct TripRuntime {
        bool active = false;
        int day = 0;
        double battery = 0.0;
        double deadline = 0.0;
        DisturbanceRealization noise;
        std::optional<ChargingPlan> offline_plan;
        TripMetrics metrics;
        std::vector<int> deferred_days;  // departures waiting on a long trip
    };

    struct QueuedEvent {
        double time;
        std::uint64_t seq;
        EventKind kind;
        int truck;
        int day;
        int ramp;
        // annotations carried into the log
        int station = -1;
        int port = -1;
        double battery = 0.0;
        double wait = -1.0;
        double charge = -1.0;

        bool operator>(const QueuedEvent& o) const {
            if (time != o.time) return time > o.time;
            return seq > o.seq;
        }
    };

    const Scenario& scenario;
    Strategy strategy;
    EngineOptions options;
    std::vector<StationRuntime> stations;
    std::vector<TripRuntime> trips;
    std::vector<std::uint64_t> event_counter;
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue;
    MetricsLog* log = nullptr;
    StationPhase phase = StationPhase::Collection;

    Impl(const Scenario& sc, Strategy st, EngineOptions opt)
        : scenario(sc), strategy(st), options(opt) {
        const auto violations = validate_scenario(sc);
        if (!violations.empty())
            throw ValidationError("simulation requires a valid scenario: " +
                                  violations.front().entity + ": " +
                                  violations.front().field + ": " +
                                  violations.front().message);
        stations.reserve(sc.stations.size());
        for (const StationSpec& spec : sc.stations)
            stations.push_back({PortSchedule(spec.port_count),
                                ForecastModel(sc.forecast_bin_width, sc.day_length)});
        trips.resize(sc.trucks.size());
        event_counter.assign(sc.trucks.size(), 0);
    }

    // Sequence numbers put the truck id in the high bits, so simultaneous
    // events settle in truck order while one truck's own events keep their
    // creation order.
    std::uint64_t next_seq(int truck) {
        return (static_cast<std::uint64_t>(truck) << 32) | event_counter[truck]++;
    }

    void push(QueuedEvent ev) { queue.push(std::move(ev)); }

    void schedule(double time, EventKind kind, int truck, int day, int ramp) {
        push({time, next_seq(truck), kind, truck, day, ramp});
    }

    void log_event(const QueuedEvent& ev) {
        if (!options.record_events) return;
        EventRecord r;
        r.time = ev.time;
        r.seq = ev.seq;
        r.kind = ev.kind;
        r.truck = ev.truck;
        r.day = ev.day;
        r.ramp = ev.ramp;
        r.station = ev.station;
        r.port = ev.port;
        r.battery = ev.battery;
        r.wait = ev.wait;
        r.charge = ev.charge;
        log->events.push_back(r);
    }

    MetricsLog run(int first_day, int day_count, StationPhase new_phase) {
        MetricsLog out;
        out.first_day = first_day;
        out.day_count = day_count;
        out.collection_days = scenario.collection_days;
        log = &out;
        phase = new_phase;
        for (auto& st : stations) {
            st.model.set_phase(new_phase);
            st.model.set_learn_in_nominal(options.learn_in_nominal);
        }

        for (int day = first_day; day < first_day + day_count; ++day)
            for (std::size_t t = 0; t < scenario.trucks.size(); ++t)
                schedule(day * scenario.day_length +
                             scenario.trucks[t].departure_time,
                         EventKind::DepartOrigin, static_cast<int>(t), day, 0);

        double clock = -std::numeric_limits<double>::infinity();
        while (!queue.empty()) {
            QueuedEvent ev = queue.top();
            queue.pop();
            if (ev.time < clock - 1e-9)
                throw EngineError("event processed out of order");
            clock = std::max(clock, ev.time);
            dispatch(ev);
        }

        std::stable_sort(out.trips.begin(), out.trips.end(),
                         [](const TripMetrics& a, const TripMetrics& b) {
                             if (a.day != b.day) return a.day < b.day;
                             return a.truck < b.truck;
                         });
        log = nullptr;
        return out;
    }

    void dispatch(QueuedEvent& ev) {
        switch (ev.kind) {
            case EventKind::DepartOrigin: handle_depart(ev); break;
            case EventKind::ReachRamp: handle_ramp(ev); break;
            case EventKind::ReachDestination: handle_destination(ev); break;
            default: log_event(ev); break;  // station-side annotations only
        }
    }

    void handle_depart(QueuedEvent& ev) {
        TripRuntime& trip = trips[ev.truck];
        if (trip.active) {
            trip.deferred_days.push_back(ev.day);
            return;
        }
        const TruckSpec& truck = scenario.trucks[ev.truck];
        const RouteSpec& route = scenario.routes[ev.truck];

        trip.active = true;
        trip.day = ev.day;
        trip.battery = truck.battery_initial;
        trip.deadline = ev.day * scenario.day_length + truck.deadline;
        trip.noise = sample_disturbances(scenario, ev.day, ev.truck);
        trip.metrics = TripMetrics{};
        trip.metrics.day = ev.day;
        trip.metrics.truck = ev.truck;
        trip.offline_plan.reset();

        if (strategy == Strategy::Offline) {
            // Planned once, before departure, with no congestion or noise
            // knowledge: state projected to the first ramp under nominal
            // dynamics, all waits zero, no robust margin.
            TruckState state;
            state.truck = &truck;
            state.route = &route;
            state.ramp = 1;
            state.arrival = ev.time + route.lead_travel;
            state.battery = truck.battery_initial -
                            truck.consumption_rate * route.lead_travel;
            state.deadline = trip.deadline;
            PlannerOptions popt;
            popt.robust_first_margin = false;
            popt.enumeration_cap = options.enumeration_cap;
            try {
                trip.offline_plan = optimize_plan(
                    scenario, state,
                    WaitingEstimates::zeros(route.station_count()), popt);
            } catch (const PlanInfeasible& e) {
                throw EngineError("offline plan infeasible for truck " + truck.id +
                                  " on day " + std::to_string(ev.day) + ": " +
                                  e.what());
            }
        }

        ev.battery = trip.battery;
        log_event(ev);
        schedule(ev.time + route.lead_travel + trip.noise.travel_noise[0],
                 EventKind::ReachRamp, ev.truck, ev.day, 1);
    }

    void handle_ramp(QueuedEvent& ev) {
        TripRuntime& trip = trips[ev.truck];
        const TruckSpec& truck = scenario.trucks[ev.truck];
        const RouteSpec& route = scenario.routes[ev.truck];
        const int k = ev.ramp;
        const int n = route.station_count();

        // Segment k-1 is behind us; apply its consumption and noise.
        trip.battery += -truck.consumption_rate * route.travel(k - 1) +
                        trip.noise.energy_noise[k - 1];
        const double floor =
            truck.safety_margin + truck.consumption_rate * route.detour(k);
        if (trip.battery < floor - kEnergyTol) {
            trip.metrics.safety_violations += 1;
            log->ramp_violations += 1;
        }

        TruckState state;
        state.truck = &truck;
        state.route = &route;
        state.ramp = k;
        state.arrival = ev.time;
        state.battery = trip.battery;
        state.deadline = trip.deadline;

        bool charge = false;
        double duration = 0.0;
        if (strategy == Strategy::Offline) {
            charge = trip.offline_plan->charge[k - 1] != 0;
            duration = trip.offline_plan->duration[k - 1];
        } else {
            const WaitingEstimates estimates = gather_estimates(state);
            PlannerOptions popt;
            popt.enumeration_cap = options.enumeration_cap;
            ChargingPlan plan;
            try {
                plan = optimize_plan(scenario, state, estimates, popt);
            } catch (const PlanInfeasible& e) {
                throw EngineError("no feasible plan for truck " + truck.id +
                                  " at ramp " + std::to_string(k) + " on day " +
                                  std::to_string(trip.day) +
                                  " (scenario generation bug): " + e.what());
            }
            trip.metrics.replans += 1;
            if (options.record_replans) {
                ReplanRecord& r = pending_replan_;
                r.day = trip.day;
                r.truck = ev.truck;
                r.ramp = k;
                r.arrival = ev.time;
                r.battery = trip.battery;
                r.deadline = trip.deadline;
                r.objective = plan.objective;
                r.charge = plan.charge;
                r.duration = plan.duration;
                r.wait_estimate = estimates.wait;
                r.reachable = estimates.reachable;
                log->replans.push_back(r);
                pending_replan_ = ReplanRecord{};
            }
            charge = plan.charge[0] != 0;
            duration = plan.duration[0];
        }

        double leave_ramp = ev.time;
        if (charge) {
            const int station_index = route.station(k);
            StationRuntime& station = stations[station_index];
            const double station_arrival = ev.time + route.detour(k);
            const double wait = station.schedule.nearby_waiting_time(station_arrival);
            const int port =
                station.schedule.assign_port(station_arrival, true, duration).value();
            station.model.record({station_arrival, wait, port, truck.id});

            log->visits.push_back({trip.day, ev.truck, k, station_index, port,
                                   station_arrival, wait, duration});
            trip.metrics.waiting += wait;
            trip.metrics.charges += 1;
            trip.metrics.labor_cost +=
                truck.labor_rate * (2.0 * route.detour(k) + duration + wait);
            trip.metrics.energy_cost +=
                charge_cost_per_minute(truck, scenario.stations[station_index]) *
                duration;

            const double rate =
                effective_charge_rate(truck, scenario.stations[station_index]);
            const double at_station =
                trip.battery - truck.consumption_rate * route.detour(k);
            const double gained =
                std::min(duration * rate, truck.battery_full - at_station);
            trip.battery = at_station + gained -
                           truck.consumption_rate * route.detour(k);

            ev.station = station_index;
            ev.port = port;
            ev.wait = wait;
            ev.charge = duration;
            const double start = station_arrival + wait;
            push({station_arrival, next_seq(ev.truck), EventKind::ArriveStation,
                  ev.truck, trip.day, k, station_index, port, at_station, wait,
                  duration});
            push({start, next_seq(ev.truck), EventKind::StartCharge, ev.truck,
                  trip.day, k, station_index, port, at_station, wait, duration});
            push({start + duration, next_seq(ev.truck), EventKind::FinishCharge,
                  ev.truck, trip.day, k, station_index, port, at_station + gained,
                  wait, duration});
            push({start + duration + route.detour(k), next_seq(ev.truck),
                  EventKind::ReturnToRamp, ev.truck, trip.day, k, station_index,
                  port, trip.battery, wait, duration});
            leave_ramp = ev.time + 2.0 * route.detour(k) + wait + duration;
        }

        ev.battery = state.battery;
        log_event(ev);

        const double next_time =
            leave_ramp + route.travel(k) + trip.noise.travel_noise[k];
        if (k < n)
            schedule(next_time, EventKind::ReachRamp, ev.truck, trip.day, k + 1);
        else
            schedule(next_time, EventKind::ReachDestination, ev.truck, trip.day,
                     n + 1);
    }

    WaitingEstimates gather_estimates(const TruckState& state) {
        const RouteSpec& route = *state.route;
        const int k = state.ramp;
        const int n = route.station_count();
        const int remaining = n - k + 1;

        WaitingEstimates est = WaitingEstimates::zeros(remaining);
        est.wait[0] = stations[route.station(k)].schedule.nearby_waiting_time(
            state.arrival + route.detour(k));
        if (strategy == Strategy::Dynamic || remaining == 1) return est;

        // Two rounds with the distant stations: earliest arrivals out,
        // maximum waits back; full windows out, averaged estimates back.
        PlannerOptions popt;
        popt.enumeration_cap = options.enumeration_cap;
        const auto earliest = earliest_ramp_arrivals(scenario, state, popt);
        std::size_t reach = 0;
        while (reach < earliest.size() && earliest[reach].has_value()) ++reach;
        for (std::size_t i = reach; i < earliest.size(); ++i)
            est.reachable[i + 1] = 0;

        std::vector<double> max_waits(reach, 0.0);
        for (std::size_t i = 0; i < reach; ++i) {
            const int l = k + 1 + static_cast<int>(i);
            const ForecastModel& model = stations[route.station(l)].model;
            max_waits[i] =
                max_waiting_since(model, *earliest[i] + route.detour(l));
        }
        const std::vector<double> latest =
            latest_ramp_arrivals(scenario, state, max_waits, est.wait[0]);
        for (std::size_t i = 0; i < reach; ++i) {
            const int l = k + 1 + static_cast<int>(i);
            const ForecastModel& model = stations[route.station(l)].model;
            est.wait[i + 1] = window_waiting_estimate(
                model, *earliest[i] + route.detour(l), latest[i] + route.detour(l));
        }
        if (options.record_replans) {
            pending_replan_.max_wait = max_waits;
            pending_replan_.win_earliest.clear();
            pending_replan_.win_latest.clear();
            for (std::size_t i = 0; i < reach; ++i) {
                pending_replan_.win_earliest.push_back(*earliest[i]);
                pending_replan_.win_latest.push_back(latest[i]);
            }
        }
        return est;
    }

    void handle_destination(QueuedEvent& ev) {
        TripRuntime& trip = trips[ev.truck];
        const TruckSpec& truck = scenario.trucks[ev.truck];
        const RouteSpec& route = scenario.routes[ev.truck];
        const int n = route.station_count();

        trip.battery += -truck.consumption_rate * route.travel(n) +
                        trip.noise.energy_noise[n];
        if (trip.battery < truck.safety_margin - kEnergyTol) {
            trip.metrics.safety_violations += 1;
            log->destination_violations += 1;
        }

        trip.metrics.delay = std::max(ev.time - trip.deadline, 0.0);
        trip.metrics.penalty_cost =
            truck.deadline_penalty_rate * trip.metrics.delay;
        trip.metrics.finish_time = ev.time;
        log->trips.push_back(trip.metrics);

        ev.battery = trip.battery;
        log_event(ev);
        trip.active = false;

        if (!trip.deferred_days.empty()) {
            const int day = trip.deferred_days.front();
            trip.deferred_days.erase(trip.deferred_days.begin());
            const double planned =
                day * scenario.day_length + truck.departure_time;
            schedule(std::max(planned, ev.time), EventKind::DepartOrigin,
                     ev.truck, day, 0);
        }
    }

    ReplanRecord pending_replan_;
};

SimulationSession::SimulationSession(const Scenario& scenario, Strategy strategy,
                                     EngineOptions options)
    : impl_(new Impl(scenario, strategy, options)) {}

SimulationSession::~SimulationSession() { delete impl_; }

MetricsLog SimulationSession::run_days(int first_day, int day_count,
                                       StationPhase phase) {
    return impl_->run(first_day, day_count, phase);
}

std::vector<ForecastModel> SimulationSession::forecast_models() const {
    std::vector<ForecastModel> out;
    out.reserve(impl_->stations.size());
    for (const auto& st : impl_->stations) out.push_back(st.model);
    return out;
}

MetricsLog run_simulation(const Scenario& scenario, Strategy strategy,
                          const DaysSelector& days, EngineOptions options) {
    SimulationSession session(scenario, strategy, options);
    return session.run_days(days.first_day, days.day_count, days.phase);
}

TwoPhaseResult run_two_phase(const Scenario& scenario, Strategy strategy,
                             EngineOptions options) {
    SimulationSession session(scenario, strategy, options);
    TwoPhaseResult result;
    MetricsLog log;
    if (scenario.collection_days > 0) {
        log = session.run_days(0, scenario.collection_days,
                               StationPhase::Collection);
        result.models = session.forecast_models();
        MetricsLog eval = session.run_days(
            scenario.collection_days, scenario.evaluation_days,
            StationPhase::Nominal);
        log.append(std::move(eval));
    } else {
        result.models = session.forecast_models();
        log = session.run_days(0, scenario.evaluation_days, StationPhase::Nominal);
    }
    result.log = std::move(log);
    return result;
}

std::vector<StrategyRun> compare_strategies(const Scenario& scenario,
                                            EngineOptions options) {
    std::vector<StrategyRun> runs;
    for (Strategy s :
         {Strategy::Offline, Strategy::Dynamic, Strategy::Proposed})
        runs.push_back({s, run_two_phase(scenario, s, options)});
    return runs;
}

std::vector<int> peak_port_occupancy(const Scenario& scenario,
                                     const MetricsLog& log) {
    std::vector<int> peak(scenario.stations.size(), 0);
    for (std::size_t s = 0; s < scenario.stations.size(); ++s) {
        std::vector<std::pair<double, int>> edges;
        for (const StationVisit& v : log.visits) {
            if (v.station != static_cast<int>(s) || v.charge <= 0) continue;
            edges.push_back({v.arrival + v.wait, +1});
            edges.push_back({v.arrival + v.wait + v.charge, -1});
        }
        std::sort(edges.begin(), edges.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first < b.first;
                      return a.second < b.second;  // close before open
                  });
        int open = 0;
        for (const auto& [time, delta] : edges) {
            open += delta;
            peak[s] = std::max(peak[s], open);
        }
    }
    return peak;
}

}  // namespace evcoord
