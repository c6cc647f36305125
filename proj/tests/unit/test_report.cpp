#include "doctest.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "evcoord/report.hpp"
#include "evcoord/rng.hpp"

using namespace evcoord;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("percentage reduction follows the published formula") {
    CHECK(percent_reduction(103.49, 36.71) ==
          doctest::Approx(64.5279).epsilon(1e-4));
    CHECK(percent_reduction(34.89, 23.08) ==
          doctest::Approx(33.8492).epsilon(1e-4));
    CHECK(percent_reduction(10.0, 10.0) == 0.0);
}

TEST_CASE("number formatting round-trips binary-exactly") {
    SplitMix64 rng(9);
    for (int i = 0; i < 2000; ++i) {
        const double v = (rng.next_double() - 0.5) * std::pow(10.0, i % 12);
        const std::string text = format_number(v);
        double parsed = 0.0;
        const auto res =
            std::from_chars(text.data(), text.data() + text.size(), parsed);
        REQUIRE(res.ec == std::errc());
        REQUIRE(parsed == v);
    }
}

TEST_CASE("summary totals equal sums over the emitted metrics rows") {
    GenerationConfig c;
    c.station_count = 4;
    c.truck_count = 12;
    c.collection_days = 1;
    c.evaluation_days = 2;
    c.ports_per_route = 0.05;
    const Scenario s = generate_scenario(c, 21);
    const TwoPhaseResult r = run_two_phase(s, Strategy::Proposed);

    const auto dir = std::filesystem::temp_directory_path() / "evcoord_report_test";
    std::filesystem::create_directories(dir);
    write_metrics_csv((dir / "metrics.csv").string(), r.log);
    write_summary_text((dir / "summary.txt").string(), r.log);

    // Re-add the CSV numbers in row order; the totals must match the summary
    // exactly because both are computed from the same rows in the same order.
    std::ifstream in(dir / "metrics.csv");
    std::string line;
    std::getline(in, line);  // header
    double waiting = 0.0, delay = 0.0, cost = 0.0;
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        REQUIRE(fields.size() == 13);
        waiting += std::stod(fields[3]);
        delay += std::stod(fields[4]);
        cost += std::stod(fields[8]);
        ++rows;
    }
    CHECK(rows == static_cast<int>(r.log.trips.size()));

    const std::string summary = slurp(dir / "summary.txt");
    CHECK(summary.find("total_waiting: " + format_number(waiting) + "\n") !=
          std::string::npos);
    CHECK(summary.find("total_delay: " + format_number(delay) + "\n") !=
          std::string::npos);
    CHECK(summary.find("total_cost: " + format_number(cost) + "\n") !=
          std::string::npos);
}

TEST_CASE("station statistics quantiles on hand data") {
    Scenario s;
    for (int i = 0; i < 2; ++i) {
        StationSpec st;
        st.id = "S" + std::to_string(i + 1);
        st.port_count = 1;
        st.charge_power = 5.0;
        s.stations.push_back(st);
    }
    MetricsLog log;
    log.collection_days = 0;
    // Station 0: per-truck averages 2, 4, 6, 8 -> median 5, q25 3.5, q75 6.5.
    for (int truck = 0; truck < 4; ++truck)
        log.visits.push_back(
            {0, truck, 1, 0, 0, 100.0, 2.0 * (truck + 1), 10.0});
    // Truck 0 visits station 0 twice: average (2 + 4) / 2 = 3.
    log.visits.push_back({1, 0, 1, 0, 0, 100.0, 4.0, 10.0});
    const auto stats = station_wait_stats(s, log);
    REQUIRE(stats.size() == 2);
    CHECK(stats[0].trucks == 4);
    CHECK(stats[0].mean == doctest::Approx((3.0 + 4.0 + 6.0 + 8.0) / 4.0));
    CHECK(stats[0].median == doctest::Approx(5.0));
    CHECK(stats[0].iqr() == doctest::Approx(stats[0].q75 - stats[0].q25));
    CHECK(stats[1].trucks == 0);
}

TEST_CASE("forecast export carries bin starts, means and counts") {
    ForecastModel m(5.0, 1440.0);
    m.record({302.0, 6.0, 0, "T"});
    m.record({303.0, 10.0, 0, "T"});
    const auto dir = std::filesystem::temp_directory_path() / "evcoord_report_test";
    std::filesystem::create_directories(dir);
    write_forecast_csv((dir / "forecast.csv").string(), m);
    const std::string text = slurp(dir / "forecast.csv");
    CHECK(text.find("bin_start,mean_wait,count\n") == 0);
    CHECK(text.find("300,8,2\n") != std::string::npos);
}
