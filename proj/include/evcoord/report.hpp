#pragma once

#include <string>
#include <vector>

#include "evcoord/engine.hpp"

namespace evcoord {

/// Shortest representation that parses back to the same double; keeps CSV
/// output byte-stable and exactly recomputable.
std::string format_number(double v);

/// Percentage reduction from x to y: (x - y) * 100 / x.
double percent_reduction(double x, double y);

struct RunSummary {
    int trips = 0;
    double total_waiting = 0.0;
    double total_delay = 0.0;
    int delayed_trips = 0;
    double total_cost = 0.0;
    double mean_waiting_per_trip = 0.0;
    double mean_cost_per_trip = 0.0;
    long safety_violations = 0;
};

/// Aggregates trips in storage order; evaluation_only drops the trips of the
/// data-collection days.
RunSummary summarize(const MetricsLog& log, bool evaluation_only);

/// Mean per-trip waiting over the evaluation days.
double mean_trip_waiting(const MetricsLog& log);

struct StationWaitStats {
    int station = 0;
    int trucks = 0;       // trucks that charged there in the evaluation days
    double mean = 0.0;    // of the per-truck average waits
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;

    double iqr() const { return q75 - q25; }
};

std::vector<StationWaitStats> station_wait_stats(const Scenario& scenario,
                                                 const MetricsLog& log);

// Writers. Every file is deterministic for a given log.
void write_metrics_csv(const std::string& path, const MetricsLog& log);
void write_events_csv(const std::string& path, const MetricsLog& log);
void write_summary_text(const std::string& path, const MetricsLog& log);
void write_forecast_csv(const std::string& path, const ForecastModel& model);

/// Per-run forecast export: one file per station under `directory`,
/// named forecast_<station id>.csv.
void write_forecast_models(const std::string& directory,
                           const Scenario& scenario,
                           const std::vector<ForecastModel>& models);

// Comparison outputs across the three strategies.
void write_comparison_csvs(const std::string& directory,
                           const Scenario& scenario,
                           const std::vector<StrategyRun>& runs);
void write_comparison_summary(const std::string& path,
                              const Scenario& scenario,
                              const std::vector<StrategyRun>& runs);

}  // namespace evcoord
