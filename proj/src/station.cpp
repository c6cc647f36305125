#include "evcoord/station.hpp"

#include <algorithm>
#include <cmath>

#include "evcoord/errors.hpp"

namespace evcoord {

PortSchedule::PortSchedule(int port_count, double initial_time) {
    if (port_count < 1) throw ValidationError("port schedule needs at least one port");
    available_.assign(port_count, initial_time);
}

double PortSchedule::nearby_waiting_time(double arrival) const {
    const double soonest = *std::min_element(available_.begin(), available_.end());
    return std::max(soonest - arrival, 0.0);
}

std::optional<int> PortSchedule::assign_port(double arrival, bool charge,
                                             double duration) {
    if (duration < 0) throw ValidationError("charge duration must be nonnegative");
    if (!charge) return std::nullopt;
    int best = 0;
    for (int c = 1; c < port_count(); ++c)
        if (available_[c] < available_[best]) best = c;
    const double wait = std::max(available_[best] - arrival, 0.0);
    available_[best] = arrival + wait + duration;
    return best;
}

ForecastModel::ForecastModel(double bin_width, double day_length)
    : bin_width_(bin_width), day_length_(day_length) {
    if (!(bin_width > 0) || !(day_length > 0) ||
        std::fmod(day_length, bin_width) != 0.0)
        throw ValidationError("forecast bin width must divide the day length");
    const int bins = static_cast<int>(day_length / bin_width);
    sum_.assign(bins, 0.0);
    count_.assign(bins, 0);
}

int ForecastModel::bin_of(double time) const {
    double tod = std::fmod(time, day_length_);
    if (tod < 0) tod += day_length_;
    int bin = static_cast<int>(tod / bin_width_);
    return std::min(bin, bin_count() - 1);
}

void ForecastModel::record(const WaitObservation& obs) {
    if (phase_ == StationPhase::Nominal && !learn_in_nominal_) return;
    const int bin = bin_of(obs.arrival);
    sum_[bin] += obs.wait;
    count_[bin] += 1;
}

double ForecastModel::bin_mean(int bin) const {
    return count_[bin] == 0 ? 0.0 : sum_[bin] / static_cast<double>(count_[bin]);
}

double ForecastModel::lookup(double time) const { return bin_mean(bin_of(time)); }

double ForecastModel::max_over_period() const {
    // The model is periodic, so the supremum over any ray equals the maximum
    // across one full day of bins.
    double best = 0.0;
    for (int b = 0; b < bin_count(); ++b) best = std::max(best, bin_mean(b));
    return best;
}

double ForecastModel::window_average(double lo, double hi) const {
    if (hi < lo) throw ValidationError("window end precedes its start");
    if (hi == lo) return lookup(lo);

    double day_integral = 0.0;
    for (int b = 0; b < bin_count(); ++b) day_integral += bin_mean(b) * bin_width_;

    const double total = hi - lo;
    const double full_days = std::floor(total / day_length_);
    double integral = full_days * day_integral;
    double remaining = total - full_days * day_length_;

    double pos = std::fmod(lo, day_length_);
    if (pos < 0) pos += day_length_;
    while (remaining > 0) {
        const int bin = std::min(static_cast<int>(pos / bin_width_), bin_count() - 1);
        const double bin_end = (bin + 1) * bin_width_;
        const double take = std::min(remaining, bin_end - pos);
        integral += bin_mean(bin) * take;
        remaining -= take;
        pos = bin_end >= day_length_ ? 0.0 : bin_end;
        if (take <= 0) break;  // guards fmod edge cases from looping
    }
    return integral / total;
}

double max_waiting_since(const ForecastModel& model, double earliest_arrival) {
    (void)earliest_arrival;
    if (model.phase() == StationPhase::Collection) return 0.0;
    return model.max_over_period();
}

double window_waiting_estimate(const ForecastModel& model, double lo, double hi) {
    if (hi < lo) throw ValidationError("arrival window end precedes its start");
    if (model.phase() == StationPhase::Collection) return 0.0;
    return model.window_average(lo, hi);
}

}  // namespace evcoord
