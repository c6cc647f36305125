#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evcoord/planner.hpp"
#include "evcoord/scenario.hpp"
#include "evcoord/station.hpp"

namespace evcoord {

enum class Strategy { Offline, Dynamic, Proposed };

std::string strategy_name(Strategy s);

enum class EventKind {
    DepartOrigin,
    ReachRamp,
    ArriveStation,
    StartCharge,
    FinishCharge,
    ReturnToRamp,
    ReachDestination,
};

std::string event_kind_name(EventKind kind);

/// One simulation event; the log is ordered by (time, seq) with seq unique.
/// Commit details (station, port, wait, charge) ride on the ReachRamp row of
/// a committing truck, so replaying the log in order reproduces the stations'
/// observation streams exactly.
struct EventRecord {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::DepartOrigin;
    int truck = -1;
    int day = -1;
    int ramp = -1;     // 0 = origin, N+1 = destination
    int station = -1;  // only on station-related rows
    int port = -1;
    double battery = 0.0;
    double wait = -1.0;    // minutes; < 0 when not applicable
    double charge = -1.0;  // minutes; < 0 when not applicable
};

/// Per-trip outcome; a trip is one (day, truck) delivery mission.
struct TripMetrics {
    int day = 0;
    int truck = 0;
    double waiting = 0.0;       // minutes spent queueing
    double delay = 0.0;         // minutes past the deadline
    double labor_cost = 0.0;    // EUR
    double energy_cost = 0.0;   // EUR
    double penalty_cost = 0.0;  // EUR
    int charges = 0;
    int replans = 0;
    double finish_time = 0.0;   // absolute minutes
    int safety_violations = 0;  // battery below its floor at a ramp/destination

    double total_cost() const { return labor_cost + energy_cost + penalty_cost; }
};

/// One committed charging stop.
struct StationVisit {
    int day = 0;
    int truck = 0;
    int ramp = 0;
    int station = 0;
    int port = 0;
    double arrival = 0.0;  // at the station (ramp time + detour)
    double wait = 0.0;
    double charge = 0.0;  // minutes the port is held
};

/// Everything a replanning step saw and decided; fuels the property checks.
struct ReplanRecord {
    int day = 0;
    int truck = 0;
    int ramp = 0;           // k
    double arrival = 0.0;   // a_k
    double battery = 0.0;   // e_k
    double deadline = 0.0;  // absolute
    double objective = 0.0; // J*
    std::vector<std::uint8_t> charge;     // plan b, index 0 = station k
    std::vector<double> duration;         // plan t
    std::vector<double> wait_estimate;    // w~ per remaining station
    std::vector<std::uint8_t> reachable;  // per remaining station
    // Proposed only; entries cover the reachable stations after the nearby one.
    std::vector<double> max_wait;      // station round-1 responses
    std::vector<double> win_earliest;  // ramp-time window bounds
    std::vector<double> win_latest;
};

struct MetricsLog {
    int first_day = 0;
    int day_count = 0;
    int collection_days = 0;  // days below this index formed the forecast data
    std::vector<TripMetrics> trips;      // sorted by (day, truck)
    std::vector<StationVisit> visits;    // in commit order
    std::vector<ReplanRecord> replans;   // in commit order
    std::vector<EventRecord> events;     // populated when event recording is on
    long ramp_violations = 0;
    long destination_violations = 0;

    void append(MetricsLog&& later);
};

struct EngineOptions {
    bool record_events = false;
    bool record_replans = true;
    bool learn_in_nominal = false;
    std::size_t enumeration_cap = 16;
};

struct DaysSelector {
    int first_day = 0;
    int day_count = 1;
    StationPhase phase = StationPhase::Collection;
};

/// Deterministic single-threaded discrete-event run. Station state persists
/// across calls on the same session, which is how the two operating phases
/// share one fleet history.
class SimulationSession {
public:
    SimulationSession(const Scenario& scenario, Strategy strategy,
                      EngineOptions options = {});
    ~SimulationSession();
    SimulationSession(const SimulationSession&) = delete;
    SimulationSession& operator=(const SimulationSession&) = delete;

    MetricsLog run_days(int first_day, int day_count, StationPhase phase);
    std::vector<ForecastModel> forecast_models() const;

private:
    struct Impl;
    Impl* impl_;
};

MetricsLog run_simulation(const Scenario& scenario, Strategy strategy,
                          const DaysSelector& days, EngineOptions options = {});

struct TwoPhaseResult {
    std::vector<ForecastModel> models;  // frozen at the phase boundary
    MetricsLog log;                     // both phases, day-tagged
};

/// The collection phase followed by the frozen-model evaluation phase, with
/// day counts taken from the scenario.
TwoPhaseResult run_two_phase(const Scenario& scenario, Strategy strategy,
                             EngineOptions options = {});

struct StrategyRun {
    Strategy strategy;
    TwoPhaseResult result;
};

/// Runs all three strategies on the same scenario (hence identical
/// disturbances) in a fixed order: Offline, Dynamic, Proposed.
std::vector<StrategyRun> compare_strategies(const Scenario& scenario,
                                            EngineOptions options = {});

/// Highest simultaneous port occupancy per station implied by the visit
/// ledger; used to audit that capacity is never exceeded.
std::vector<int> peak_port_occupancy(const Scenario& scenario,
                                     const MetricsLog& log);

}  // namespace evcoord
