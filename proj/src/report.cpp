#include "evcoord/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "evcoord/errors.hpp"

namespace evcoord {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * (sorted.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double percent_reduction(double x, double y) { return (x - y) * 100.0 / x; }

RunSummary summarize(const MetricsLog& log, bool evaluation_only) {
    RunSummary s;
    for (const TripMetrics& t : log.trips) {
        if (evaluation_only && t.day < log.collection_days) continue;
        s.trips += 1;
        s.total_waiting += t.waiting;
        s.total_delay += t.delay;
        if (t.delay > 0) s.delayed_trips += 1;
        s.total_cost += t.total_cost();
        s.safety_violations += t.safety_violations;
    }
    if (s.trips > 0) {
        s.mean_waiting_per_trip = s.total_waiting / s.trips;
        s.mean_cost_per_trip = s.total_cost / s.trips;
    }
    return s;
}

double mean_trip_waiting(const MetricsLog& log) {
    return summarize(log, true).mean_waiting_per_trip;
}

std::vector<StationWaitStats> station_wait_stats(const Scenario& scenario,
                                                 const MetricsLog& log) {
    std::vector<StationWaitStats> out;
    for (std::size_t s = 0; s < scenario.stations.size(); ++s) {
        // Per-truck average wait at this station over the evaluation days.
        std::map<int, std::pair<double, int>> per_truck;
        for (const StationVisit& v : log.visits) {
            if (v.station != static_cast<int>(s)) continue;
            if (v.day < log.collection_days) continue;
            auto& acc = per_truck[v.truck];
            acc.first += v.wait;
            acc.second += 1;
        }
        StationWaitStats st;
        st.station = static_cast<int>(s);
        std::vector<double> means;
        for (const auto& [truck, acc] : per_truck)
            means.push_back(acc.first / acc.second);
        st.trucks = static_cast<int>(means.size());
        if (!means.empty()) {
            std::sort(means.begin(), means.end());
            double total = 0.0;
            for (double m : means) total += m;
            st.mean = total / means.size();
            st.q25 = quantile(means, 0.25);
            st.median = quantile(means, 0.5);
            st.q75 = quantile(means, 0.75);
        }
        out.push_back(st);
    }
    return out;
}

void write_metrics_csv(const std::string& path, const MetricsLog& log) {
    auto out = open_out(path);
    out << "day,phase,truck,waiting,delay,labor_cost,energy_cost,penalty_cost,"
           "total_cost,charges,replans,finish_time,safety_violations\n";
    for (const TripMetrics& t : log.trips) {
        out << t.day << ','
            << (t.day < log.collection_days ? "collection" : "evaluation") << ','
            << t.truck << ',' << format_number(t.waiting) << ','
            << format_number(t.delay) << ',' << format_number(t.labor_cost) << ','
            << format_number(t.energy_cost) << ','
            << format_number(t.penalty_cost) << ','
            << format_number(t.total_cost()) << ',' << t.charges << ','
            << t.replans << ',' << format_number(t.finish_time) << ','
            << t.safety_violations << '\n';
    }
}

void write_events_csv(const std::string& path, const MetricsLog& log) {
    auto out = open_out(path);
    out << "time,seq,kind,day,truck,ramp,station,port,battery,wait,charge\n";
    for (const EventRecord& e : log.events) {
        out << format_number(e.time) << ',' << e.seq << ','
            << event_kind_name(e.kind) << ',' << e.day << ',' << e.truck << ','
            << e.ramp << ',';
        if (e.station >= 0) out << e.station;
        out << ',';
        if (e.port >= 0) out << e.port;
        out << ',' << format_number(e.battery) << ',';
        if (e.wait >= 0) out << format_number(e.wait);
        out << ',';
        if (e.charge >= 0) out << format_number(e.charge);
        out << '\n';
    }
}

void write_summary_text(const std::string& path, const MetricsLog& log) {
    auto out = open_out(path);
    const RunSummary all = summarize(log, false);
    const RunSummary eval = summarize(log, true);
    out << "trips: " << all.trips << "\n";
    out << "total_waiting: " << format_number(all.total_waiting) << "\n";
    out << "total_delay: " << format_number(all.total_delay) << "\n";
    out << "delayed_trips: " << all.delayed_trips << "\n";
    out << "total_cost: " << format_number(all.total_cost) << "\n";
    out << "safety_violations: " << all.safety_violations << "\n";
    out << "evaluation_trips: " << eval.trips << "\n";
    out << "evaluation_total_waiting: " << format_number(eval.total_waiting)
        << "\n";
    out << "evaluation_mean_waiting_per_trip: "
        << format_number(eval.mean_waiting_per_trip) << "\n";
    out << "evaluation_mean_cost_per_trip: "
        << format_number(eval.mean_cost_per_trip) << "\n";
}

void write_forecast_csv(const std::string& path, const ForecastModel& model) {
    auto out = open_out(path);
    out << "bin_start,mean_wait,count\n";
    for (int b = 0; b < model.bin_count(); ++b) {
        out << format_number(b * model.bin_width()) << ','
            << format_number(model.bin_mean(b)) << ','
            << model.bin_observations(b) << '\n';
    }
}

void write_forecast_models(const std::string& directory,
                           const Scenario& scenario,
                           const std::vector<ForecastModel>& models) {
    for (std::size_t s = 0; s < models.size(); ++s) {
        const std::string path =
            (std::filesystem::path(directory) /
             ("forecast_" + scenario.stations[s].id + ".csv"))
                .string();
        write_forecast_csv(path, models[s]);
    }
}

void write_comparison_csvs(const std::string& directory,
                           const Scenario& scenario,
                           const std::vector<StrategyRun>& runs) {
    namespace fs = std::filesystem;
    const fs::path dir(directory);

    {
        auto out = open_out((dir / "per_day.csv").string());
        out << "strategy,day,phase,total_waiting,total_delay,delayed_trips,"
               "total_cost\n";
        for (const StrategyRun& run : runs) {
            const MetricsLog& log = run.result.log;
            std::map<int, std::array<double, 3>> per_day;
            std::map<int, int> delayed;
            for (const TripMetrics& t : log.trips) {
                auto& acc = per_day[t.day];
                acc[0] += t.waiting;
                acc[1] += t.delay;
                acc[2] += t.total_cost();
                if (t.delay > 0) delayed[t.day] += 1;
            }
            for (const auto& [day, acc] : per_day) {
                out << strategy_name(run.strategy) << ',' << day << ','
                    << (day < log.collection_days ? "collection" : "evaluation")
                    << ',' << format_number(acc[0]) << ','
                    << format_number(acc[1]) << ',' << delayed[day] << ','
                    << format_number(acc[2]) << '\n';
            }
        }
    }

    {
        auto out = open_out((dir / "cumulative_delay.csv").string());
        out << "strategy,day,cumulative_delay\n";
        for (const StrategyRun& run : runs) {
            const MetricsLog& log = run.result.log;
            std::map<int, double> per_day;
            for (const TripMetrics& t : log.trips)
                if (t.day >= log.collection_days) per_day[t.day] += t.delay;
            double cum = 0.0;
            for (const auto& [day, delay] : per_day) {
                cum += delay;
                out << strategy_name(run.strategy) << ',' << day << ','
                    << format_number(cum) << '\n';
            }
        }
    }

    {
        auto out = open_out((dir / "per_truck.csv").string());
        out << "strategy,truck,trips,mean_waiting,mean_delay,mean_cost\n";
        for (const StrategyRun& run : runs) {
            const MetricsLog& log = run.result.log;
            std::map<int, std::array<double, 3>> acc;
            std::map<int, int> trips;
            for (const TripMetrics& t : log.trips) {
                if (t.day < log.collection_days) continue;
                acc[t.truck][0] += t.waiting;
                acc[t.truck][1] += t.delay;
                acc[t.truck][2] += t.total_cost();
                trips[t.truck] += 1;
            }
            for (const auto& [truck, a] : acc) {
                const int n = trips[truck];
                out << strategy_name(run.strategy) << ',' << truck << ',' << n
                    << ',' << format_number(a[0] / n) << ','
                    << format_number(a[1] / n) << ',' << format_number(a[2] / n)
                    << '\n';
            }
        }
    }

    {
        auto out = open_out((dir / "station_quantiles.csv").string());
        out << "strategy,station,trucks,mean_wait,q25,median,q75,iqr\n";
        for (const StrategyRun& run : runs) {
            const auto stats = station_wait_stats(scenario, run.result.log);
            for (const StationWaitStats& st : stats) {
                out << strategy_name(run.strategy) << ','
                    << scenario.stations[st.station].id << ',' << st.trucks << ','
                    << format_number(st.mean) << ',' << format_number(st.q25)
                    << ',' << format_number(st.median) << ','
                    << format_number(st.q75) << ',' << format_number(st.iqr())
                    << '\n';
            }
            // Fleet-level row: statistics across the stations' mean waits.
            std::vector<double> means;
            for (const StationWaitStats& st : stats)
                if (st.trucks > 0) means.push_back(st.mean);
            std::sort(means.begin(), means.end());
            double total = 0.0;
            for (double m : means) total += m;
            out << strategy_name(run.strategy) << ",ALL," << means.size() << ','
                << format_number(means.empty() ? 0.0 : total / means.size())
                << ',' << format_number(quantile(means, 0.25)) << ','
                << format_number(quantile(means, 0.5)) << ','
                << format_number(quantile(means, 0.75)) << ','
                << format_number(quantile(means, 0.75) - quantile(means, 0.25))
                << '\n';
        }
    }

    {
        auto out = open_out((dir / "mean_cost.csv").string());
        out << "strategy,trips,mean_cost,mean_waiting,delayed_share\n";
        for (const StrategyRun& run : runs) {
            const RunSummary s = summarize(run.result.log, true);
            out << strategy_name(run.strategy) << ',' << s.trips << ','
                << format_number(s.mean_cost_per_trip) << ','
                << format_number(s.mean_waiting_per_trip) << ','
                << format_number(s.trips > 0
                                     ? static_cast<double>(s.delayed_trips) /
                                           s.trips
                                     : 0.0)
                << '\n';
        }
    }

    {
        auto out = open_out((dir / "reductions.csv").string());
        out << "metric,baseline,against,baseline_value,value,reduction_pct\n";
        auto find = [&runs](Strategy s) -> const StrategyRun& {
            for (const StrategyRun& run : runs)
                if (run.strategy == s) return run;
            throw EngineError("comparison lacks a strategy run");
        };
        const RunSummary off = summarize(find(Strategy::Offline).result.log, true);
        const RunSummary dyn = summarize(find(Strategy::Dynamic).result.log, true);
        const RunSummary pro = summarize(find(Strategy::Proposed).result.log, true);
        auto row = [&](const std::string& metric, const std::string& base_name,
                       const std::string& new_name, double base, double value) {
            out << metric << ',' << base_name << ',' << new_name << ','
                << format_number(base) << ',' << format_number(value) << ','
                << format_number(base != 0.0 ? percent_reduction(base, value)
                                             : 0.0)
                << '\n';
        };
        row("mean_waiting_per_trip", "offline", "proposed",
            off.mean_waiting_per_trip, pro.mean_waiting_per_trip);
        row("mean_waiting_per_trip", "dynamic", "proposed",
            dyn.mean_waiting_per_trip, pro.mean_waiting_per_trip);
        row("mean_waiting_per_trip", "offline", "dynamic",
            off.mean_waiting_per_trip, dyn.mean_waiting_per_trip);
        row("mean_cost_per_trip", "offline", "proposed", off.mean_cost_per_trip,
            pro.mean_cost_per_trip);
        row("mean_cost_per_trip", "dynamic", "proposed", dyn.mean_cost_per_trip,
            pro.mean_cost_per_trip);
    }
}

void write_comparison_summary(const std::string& path,
                              const Scenario& scenario,
                              const std::vector<StrategyRun>& runs) {
    (void)scenario;
    auto out = open_out(path);
    for (const StrategyRun& run : runs) {
        const RunSummary s = summarize(run.result.log, true);
        out << strategy_name(run.strategy)
            << ": trips=" << s.trips
            << " total_waiting=" << format_number(s.total_waiting)
            << " mean_waiting_per_trip=" << format_number(s.mean_waiting_per_trip)
            << " total_delay=" << format_number(s.total_delay)
            << " delayed_trips=" << s.delayed_trips
            << " mean_cost_per_trip=" << format_number(s.mean_cost_per_trip)
            << " safety_violations=" << s.safety_violations << "\n";
    }
}

}  // namespace evcoord
