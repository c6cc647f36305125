#pragma once

#include <optional>
#include <string>
#include <vector>

namespace evcoord {

/// First-come, first-served port ledger: one earliest-available time per port.
/// Commitments are binding; availability times never decrease.
class PortSchedule {
public:
    explicit PortSchedule(int port_count, double initial_time = 0.0);

    /// How long a truck arriving at `arrival` would wait for the best port.
    double nearby_waiting_time(double arrival) const;

    /// Applies a charging decision (b, t). Declining leaves the schedule
    /// untouched and returns nullopt; committing books the port with the
    /// smallest availability time (lowest index on ties) from
    /// arrival + wait for `duration` minutes and returns the port.
    std::optional<int> assign_port(double arrival, bool charge, double duration);

    int port_count() const { return static_cast<int>(available_.size()); }
    double available_from(int port) const { return available_[port]; }

private:
    std::vector<double> available_;
};

enum class StationPhase { Collection, Nominal };

struct WaitObservation {
    double arrival = 0.0;  // absolute minutes
    double wait = 0.0;     // minutes, >= 0
    int port = 0;
    std::string truck_id;
};

/// Periodic piecewise-constant map from time-of-day to the mean observed
/// waiting time; built from per-bin sums and counts. Empty bins read as 0.
class ForecastModel {
public:
    ForecastModel() = default;
    ForecastModel(double bin_width, double day_length);

    /// Accumulates an observation. In the Collection phase always; in the
    /// Nominal phase only when continued learning is enabled.
    void record(const WaitObservation& obs);

    double lookup(double time) const;       // mean of the bin holding `time`
    double max_over_period() const;         // the periodic supremum
    /// Exact average of the model over [lo, hi], wrapping across day
    /// boundaries; a degenerate window reads the single point.
    double window_average(double lo, double hi) const;

    StationPhase phase() const { return phase_; }
    void set_phase(StationPhase phase) { phase_ = phase; }
    void set_learn_in_nominal(bool learn) { learn_in_nominal_ = learn; }

    double bin_width() const { return bin_width_; }
    double day_length() const { return day_length_; }
    int bin_count() const { return static_cast<int>(sum_.size()); }
    double bin_mean(int bin) const;
    long bin_observations(int bin) const { return count_[bin]; }

private:
    int bin_of(double time) const;

    double bin_width_ = 5.0;
    double day_length_ = 1440.0;
    std::vector<double> sum_;
    std::vector<long> count_;
    StationPhase phase_ = StationPhase::Collection;
    bool learn_in_nominal_ = false;
};

/// Round 1 of the distant exchange: the maximum waiting time from the
/// earliest station arrival onward. Zero during the Collection phase.
double max_waiting_since(const ForecastModel& model, double earliest_arrival);

/// Round 2: the window-averaged estimate for the station-arrival window
/// [lo, hi]. Zero during the Collection phase; hi < lo is a protocol error.
double window_waiting_estimate(const ForecastModel& model, double lo, double hi);

}  // namespace evcoord
