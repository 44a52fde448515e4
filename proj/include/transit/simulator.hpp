#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "transit/types.hpp"

namespace transit {

/// Synthetic route+service description with a known ground truth.
struct SimConfig {
    std::string route_id = "R1";
    Direction direction = Direction::Up;
    std::vector<Stop> stops;          // contiguous seq 1..N
    std::vector<double> leg_travel_s; // nominal travel per leg, size N-1
    std::vector<double> true_starts;  // scheduled departures, ascending seconds-of-day
    int days = 30;
    Date start_date{2018, 10, 1};
    double sigma_start_s = 0.0;       // start-time jitter std dev
    double sigma_travel_base_s = 0.0; // per-leg travel jitter at the first start
    double sigma_growth_s_per_h = 0.0;// jitter added per hour after the first start
    double gps_noise_m = 0.0;         // isotropic positional noise std dev
    double sample_period_s = 10.0;
    std::uint64_t seed = 1;
};

struct SimOutput {
    std::vector<Stop> stops;
    std::vector<RawPoint> trace;   // sorted by (bus_id, timestamp)
    Timetable truth;               // true starts + nominal cumulative travel
    ArrivalMatrix truth_arrivals;  // actual (jittered) arrivals, all stops
    std::vector<std::string> warnings;
};

/// Generates one synthetic dataset. Each trip starts at its true start
/// plus Gaussian jitter; each leg adds nominal travel plus Gaussian noise
/// whose std dev grows linearly with hours elapsed since the first true
/// start. Arrivals are kept strictly increasing (resample, then clamp to
/// previous+1s after 100 attempts). The bus position is interpolated
/// linearly between stops and emitted on a whole-second grid anchored at
/// the trip start. Deterministic for a given seed; per-day and per-trip
/// streams use independent sub-seeds.
SimOutput simulate(const SimConfig& cfg);

/// Straight-line route of n stops spaced spacing_m apart, heading north.
std::vector<Stop> make_line_route(const std::string& route_id, Direction direction,
                                  int n_stops, double spacing_m,
                                  double lat0 = 28.6000, double lon0 = 77.2000);

/// Evenly spaced start times: first, first+headway, ... (count total).
std::vector<double> make_starts(double first_s, double headway_s, int count);

} // namespace transit
