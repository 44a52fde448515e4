#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "transit/types.hpp"

namespace transit {

struct SnapConfig {
    double radius_m = 50.0;    // snap radius around each stop
    int min_trip_stops = 3;    // trips visiting fewer distinct stops are dropped
    double trip_gap_s = 1800;  // silence longer than this starts a new trip
};

/// Great-circle distance in meters (mean Earth radius 6,371,000 m).
double haversine_m(double lat1, double lon1, double lat2, double lon2);

/// Maps raw fixes of one bus on one day+direction to stop events. Each
/// maximal run of consecutive points inside one stop's radius yields one
/// event timed at the run's minimum-distance point. A point inside two
/// radii goes to the nearer stop; exact ties go to the lower seq.
std::vector<StopEvent> snap_points(std::span<const RawPoint> points,
                                   const std::vector<Stop>& stops,
                                   const SnapConfig& cfg);

/// Cuts one bus-day's events into trips. A trip ends when the stop seq
/// drops below the running maximum or the gap to the previous event
/// exceeds trip_gap_s. Keeps the first arrival per stop within a trip;
/// discards trips with fewer than min_trip_stops distinct stops.
std::vector<std::map<int, double>> segment_trips(const std::vector<StopEvent>& events,
                                                 int stop_count,
                                                 const SnapConfig& cfg);

/// Assembles the arrival matrix from extracted trips. Keeps stops with
/// seq == 1 (mod sample_every) plus the last stop; drops trips missing
/// the first retained stop; drops arrivals that break in-trip strict
/// monotonicity (noting each drop in warnings); orders each day's trips
/// by arrival at the first retained stop.
ArrivalMatrix build_matrix(const std::string& route_id,
                           Direction direction,
                           const std::vector<TripObs>& trips,
                           int stop_count,
                           int sample_every,
                           std::vector<std::string>* warnings = nullptr);

/// Full snap+segment pass for one route+direction: filters points, groups
/// them per bus and day, and returns all extracted trips.
std::vector<TripObs> extract_trips(const std::vector<RawPoint>& points,
                                   const std::vector<Stop>& stops,
                                   const std::string& route_id,
                                   Direction direction,
                                   const SnapConfig& cfg);

/// All stop events for one route+direction, grouped per bus-day, time-ordered.
std::vector<StopEvent> collect_events(const std::vector<RawPoint>& points,
                                      const std::vector<Stop>& stops,
                                      const std::string& route_id,
                                      Direction direction,
                                      const SnapConfig& cfg);

/// extract_trips + build_matrix in one call.
ArrivalMatrix extract_matrix(const std::vector<RawPoint>& points,
                             const std::vector<Stop>& stops,
                             const std::string& route_id,
                             Direction direction,
                             const SnapConfig& cfg,
                             int sample_every,
                             std::vector<std::string>* warnings = nullptr);

/// Debug dump, header: day,bus_id,direction,stop_seq,arrival
void write_events_csv(const std::vector<StopEvent>& events, std::ostream& out);

} // namespace transit
