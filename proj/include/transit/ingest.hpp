#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "transit/types.hpp"

namespace transit {

struct DatasetManifest {
    std::string name;
    std::vector<std::string> routes; // sorted, unique
    Date first_date;
    Date last_date;
    long point_count = 0;
};

// stops.csv: route_id,direction,seq,lat,lon,name
std::vector<Stop> parse_stops(std::istream& in);
void write_stops(const std::vector<Stop>& stops, std::ostream& out);

// trace.csv: timestamp,route_id,bus_id,direction,lat,lon
// Output is sorted by (bus_id, timestamp); exact duplicates keep the first.
std::vector<RawPoint> parse_trace(std::istream& in);
void write_trace(const std::vector<RawPoint>& points, std::ostream& out);

// timetable.csv: route_id,direction,trip_index,stop_seq,scheduled_time
Timetable parse_timetable(std::istream& in);
void write_timetable(const Timetable& t, std::ostream& out);

// File-path wrappers; throw MissingFileError when the path does not exist.
std::vector<Stop> load_stops(const std::string& path);
std::vector<RawPoint> load_trace(const std::string& path);
Timetable load_timetable(const std::string& path);
void save_stops(const std::vector<Stop>& stops, const std::string& path);
void save_trace(const std::vector<RawPoint>& points, const std::string& path);
void save_timetable(const Timetable& t, const std::string& path);

DatasetManifest make_manifest(const std::string& name, const std::vector<RawPoint>& points);

} // namespace transit
