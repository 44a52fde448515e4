#pragma once

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace transit {

/// Parse failure in an input file; carries the 1-based line number.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

/// Input data violates a model invariant (bad ranges, broken ordering, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pipeline stage produced nothing to work with (no trips, no clusters).
struct EmptyResultError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A referenced input file does not exist.
struct MissingFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Date {
    int year = 0;
    int month = 0; // 1..12
    int day = 0;   // 1..31

    auto operator<=>(const Date&) const = default;

    bool valid() const;
    Date next() const;
    std::string str() const; // YYYY-MM-DD
    int month_key() const { return year * 12 + month; }

    /// Parses "YYYY-MM-DD"; returns nullopt on malformed or out-of-range input.
    static std::optional<Date> parse(std::string_view s);
};

enum class Direction { Up, Down };

std::string to_string(Direction d);                       // "UP" / "DOWN"
std::optional<Direction> parse_direction(std::string_view s); // accepts UP/DOWN and up/down

struct Stop {
    std::string stop_id;
    std::string route_id;
    Direction direction = Direction::Up;
    int seq = 0; // 1-based position along the route
    double lat = 0.0;
    double lon = 0.0;
};

/// One timestamped GPS fix for one bus on one route.
struct RawPoint {
    std::string route_id;
    std::string bus_id;
    Direction direction = Direction::Up;
    Date day;
    int sec_of_day = 0; // local seconds since midnight, whole seconds
    double lat = 0.0;
    double lon = 0.0;
};

/// A bus's arrival at a known stop, produced by snapping.
struct StopEvent {
    Date day;
    std::string bus_id;
    Direction direction = Direction::Up;
    int stop_seq = 0;
    double arrival = 0.0; // seconds-of-day, [0, 86400)
};

/// One extracted trip: the day it ran plus arrival seconds per stop seq.
struct TripObs {
    Date day;
    std::map<int, double> arrival_by_seq;
};

/// Arrival times for one route+direction indexed by (day, trip, stop seq).
/// Trips within a day are ordered by arrival at the first retained stop;
/// arrivals are strictly increasing along each trip.
struct ArrivalMatrix {
    std::string route_id;
    Direction direction = Direction::Up;
    std::vector<Date> days;     // ascending, size d
    std::vector<int> stop_seqs; // retained stops, ascending
    std::vector<std::vector<std::map<int, double>>> trips; // [day][trip] -> (seq -> arrival)

    int day_count() const { return static_cast<int>(days.size()); }
    int trips_on(int day_index) const { return static_cast<int>(trips[day_index].size()); }
    std::optional<double> arrival(int day_index, int trip_index, int seq) const;

    /// All arrivals observed at one stop, pooled across days, unsorted.
    std::vector<double> arrivals_at(int seq) const;

    /// Restricts to the days for which keep(day) is true.
    ArrivalMatrix filter_days(const std::vector<Date>& keep) const;

    /// Restricts to the given stop seqs (intersection with stop_seqs).
    ArrivalMatrix filter_stops(const std::vector<int>& keep) const;

    /// Throws ValidationError if ordering invariants are broken.
    void check() const;
};

/// Scheduled times per trip at the published stops, whole seconds-of-day.
struct TimetableRow {
    std::map<int, int> scheduled; // seq -> seconds-of-day
};

struct Timetable {
    std::string route_id;
    Direction direction = Direction::Up;
    std::vector<int> published_stops; // ascending seq
    std::vector<TimetableRow> rows;   // ordered by start time

    bool empty() const { return rows.empty(); }

    /// Start time of a row = scheduled time at its first published stop.
    static int start_of(const TimetableRow& row);

    /// Sorted scheduled times at one stop across all rows.
    std::vector<int> column(int seq) const;

    /// Throws ValidationError unless rows are monotone along published stops
    /// and start times are pairwise separated by at least min_start_gap.
    void check(double min_start_gap = 0.0) const;
};

struct ValidationSummary {
    std::map<std::pair<std::string, Date>, int> points_per_route_day;
    std::map<std::string, int> gap_flags; // route -> count of sampling gaps > 10x nominal
    std::vector<std::string> seq_violations;
    long total_points = 0;

    bool ok() const { return seq_violations.empty(); }
};

/// Read-only dataset health report: point counts per route/day, sampling
/// gaps beyond 10x the nominal period, and stop-seq contiguity violations.
ValidationSummary validate_dataset(const std::vector<Stop>& stops,
                                   const std::vector<RawPoint>& points,
                                   double nominal_period_s = 10.0);

} // namespace transit
