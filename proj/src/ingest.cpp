#include "transit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "transit/util.hpp"

namespace transit {

namespace {

constexpr const char* kStopsHeader = "route_id,direction,seq,lat,lon,name";
constexpr const char* kTraceHeader = "timestamp,route_id,bus_id,direction,lat,lon";
constexpr const char* kTimetableHeader = "route_id,direction,trip_index,stop_seq,scheduled_time";

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<int> to_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string expect_header(std::istream& in, const char* want) {
    std::string line;
    if (!std::getline(in, line)) return {}; // empty stream: header-only semantics
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != want) throw ParseError(1, std::string("expected header \"") + want + "\"");
    return line;
}

// "YYYY-MM-DDThh:mm:ss"
bool parse_timestamp(std::string_view s, Date& date, int& sec) {
    if (s.size() != 19 || s[10] != 'T') return false;
    auto d = Date::parse(s.substr(0, 10));
    if (!d) return false;
    int t = parse_hms(s.substr(11));
    if (t < 0) return false;
    date = *d;
    sec = t;
    return true;
}

} // namespace

std::vector<Stop> parse_stops(std::istream& in) {
    expect_header(in, kStopsHeader);
    std::vector<Stop> stops;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        if (f.size() != 6) throw ParseError(line_no, "expected 6 fields, got " + std::to_string(f.size()));
        Stop s;
        s.route_id = f[0];
        auto dir = parse_direction(f[1]);
        if (!dir) throw ParseError(line_no, "bad direction \"" + f[1] + "\"");
        s.direction = *dir;
        auto seq = to_int(f[2]);
        if (!seq || *seq < 1) throw ParseError(line_no, "bad stop seq \"" + f[2] + "\"");
        s.seq = *seq;
        auto lat = to_double(f[3]);
        auto lon = to_double(f[4]);
        if (!lat) throw ParseError(line_no, "bad latitude \"" + f[3] + "\"");
        if (!lon) throw ParseError(line_no, "bad longitude \"" + f[4] + "\"");
        if (*lat < -90.0 || *lat > 90.0) throw ParseError(line_no, "latitude out of range");
        if (*lon < -180.0 || *lon > 180.0) throw ParseError(line_no, "longitude out of range");
        s.lat = *lat;
        s.lon = *lon;
        s.stop_id = f[5];
        stops.push_back(std::move(s));
    }

    std::stable_sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) {
        return std::tie(a.route_id, a.direction, a.seq) < std::tie(b.route_id, b.direction, b.seq);
    });

    // contiguity check per (route, direction)
    std::map<std::pair<std::string, Direction>, std::vector<int>> seqs;
    for (const auto& s : stops) seqs[{s.route_id, s.direction}].push_back(s.seq);
    for (const auto& [key, list] : seqs) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i] != static_cast<int>(i) + 1)
                throw ValidationError("route " + key.first + " " + to_string(key.second) +
                                      ": stop seq not contiguous from 1");
        }
    }
    return stops;
}

void write_stops(const std::vector<Stop>& stops, std::ostream& out) {
    std::vector<const Stop*> ordered;
    ordered.reserve(stops.size());
    for (const auto& s : stops) ordered.push_back(&s);
    std::stable_sort(ordered.begin(), ordered.end(), [](const Stop* a, const Stop* b) {
        return std::tie(a->route_id, a->direction, a->seq) < std::tie(b->route_id, b->direction, b->seq);
    });
    out << kStopsHeader << "\n";
    for (const Stop* s : ordered)
        out << s->route_id << ',' << to_string(s->direction) << ',' << s->seq << ','
            << format_fixed(s->lat, 6) << ',' << format_fixed(s->lon, 6) << ',' << s->stop_id << "\n";
}

std::vector<RawPoint> parse_trace(std::istream& in) {
    expect_header(in, kTraceHeader);
    std::vector<RawPoint> points;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        if (f.size() != 6) throw ParseError(line_no, "expected 6 fields, got " + std::to_string(f.size()));
        RawPoint p;
        if (!parse_timestamp(f[0], p.day, p.sec_of_day))
            throw ParseError(line_no, "bad timestamp \"" + f[0] + "\"");
        p.route_id = f[1];
        p.bus_id = f[2];
        auto dir = parse_direction(f[3]);
        if (!dir) throw ParseError(line_no, "bad direction \"" + f[3] + "\"");
        p.direction = *dir;
        auto lat = to_double(f[4]);
        auto lon = to_double(f[5]);
        if (!lat || *lat < -90.0 || *lat > 90.0) throw ParseError(line_no, "bad latitude \"" + f[4] + "\"");
        if (!lon || *lon < -180.0 || *lon > 180.0) throw ParseError(line_no, "bad longitude \"" + f[5] + "\"");
        p.lat = *lat;
        p.lon = *lon;
        points.push_back(std::move(p));
    }

    std::stable_sort(points.begin(), points.end(), [](const RawPoint& a, const RawPoint& b) {
        return std::tie(a.bus_id, a.day, a.sec_of_day) < std::tie(b.bus_id, b.day, b.sec_of_day);
    });
    // exact duplicates (bus + timestamp): keep the first seen
    auto last = std::unique(points.begin(), points.end(), [](const RawPoint& a, const RawPoint& b) {
        return a.bus_id == b.bus_id && a.day == b.day && a.sec_of_day == b.sec_of_day;
    });
    points.erase(last, points.end());
    return points;
}

void write_trace(const std::vector<RawPoint>& points, std::ostream& out) {
    std::vector<const RawPoint*> ordered;
    ordered.reserve(points.size());
    for (const auto& p : points) ordered.push_back(&p);
    std::stable_sort(ordered.begin(), ordered.end(), [](const RawPoint* a, const RawPoint* b) {
        return std::tie(a->bus_id, a->day, a->sec_of_day) < std::tie(b->bus_id, b->day, b->sec_of_day);
    });
    out << kTraceHeader << "\n";
    for (const RawPoint* p : ordered)
        out << p->day.str() << 'T' << format_hms(p->sec_of_day) << ',' << p->route_id << ','
            << p->bus_id << ',' << to_string(p->direction) << ',' << format_fixed(p->lat, 6) << ','
            << format_fixed(p->lon, 6) << "\n";
}

Timetable parse_timetable(std::istream& in) {
    expect_header(in, kTimetableHeader);
    Timetable t;
    std::map<int, TimetableRow> rows_by_index;
    std::set<int> seqs;
    std::string line;
    int line_no = 1;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        if (f.size() != 5) throw ParseError(line_no, "expected 5 fields, got " + std::to_string(f.size()));
        auto dir = parse_direction(f[1]);
        if (!dir) throw ParseError(line_no, "bad direction \"" + f[1] + "\"");
        if (first_row) {
            t.route_id = f[0];
            t.direction = *dir;
            first_row = false;
        } else if (f[0] != t.route_id || *dir != t.direction) {
            throw ParseError(line_no, "timetable mixes routes or directions");
        }
        auto trip = to_int(f[2]);
        auto seq = to_int(f[3]);
        if (!trip || *trip < 1) throw ParseError(line_no, "bad trip index \"" + f[2] + "\"");
        if (!seq || *seq < 1) throw ParseError(line_no, "bad stop seq \"" + f[3] + "\"");
        int sched = parse_hms(f[4]);
        if (sched < 0) throw ParseError(line_no, "bad scheduled time \"" + f[4] + "\"");
        auto [it, inserted] = rows_by_index[*trip].scheduled.emplace(*seq, sched);
        if (!inserted) throw ParseError(line_no, "duplicate (trip, stop) entry");
        seqs.insert(*seq);
    }
    t.published_stops.assign(seqs.begin(), seqs.end());
    for (auto& [index, row] : rows_by_index) t.rows.push_back(std::move(row));
    std::stable_sort(t.rows.begin(), t.rows.end(), [](const TimetableRow& a, const TimetableRow& b) {
        return Timetable::start_of(a) < Timetable::start_of(b);
    });
    t.check();
    return t;
}

void write_timetable(const Timetable& t, std::ostream& out) {
    out << kTimetableHeader << "\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (const auto& [seq, sched] : t.rows[i].scheduled)
            out << t.route_id << ',' << to_string(t.direction) << ',' << i + 1 << ',' << seq << ','
                << format_hms(sched) << "\n";
    if (!out) throw std::runtime_error("timetable write failed");
}

namespace {

std::ifstream open_input(const std::string& path) {
    if (!std::filesystem::exists(path)) throw MissingFileError("no such file: " + path);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

} // namespace

std::vector<Stop> load_stops(const std::string& path) {
    auto in = open_input(path);
    return parse_stops(in);
}

std::vector<RawPoint> load_trace(const std::string& path) {
    auto in = open_input(path);
    return parse_trace(in);
}

Timetable load_timetable(const std::string& path) {
    auto in = open_input(path);
    return parse_timetable(in);
}

void save_stops(const std::vector<Stop>& stops, const std::string& path) {
    auto out = open_output(path);
    write_stops(stops, out);
}

void save_trace(const std::vector<RawPoint>& points, const std::string& path) {
    auto out = open_output(path);
    write_trace(points, out);
}

void save_timetable(const Timetable& t, const std::string& path) {
    auto out = open_output(path);
    write_timetable(t, out);
}

DatasetManifest make_manifest(const std::string& name, const std::vector<RawPoint>& points) {
    DatasetManifest m;
    m.name = name;
    m.point_count = static_cast<long>(points.size());
    std::set<std::string> routes;
    for (const auto& p : points) {
        routes.insert(p.route_id);
        if (!m.first_date.valid() || p.day < m.first_date) m.first_date = p.day;
        if (!m.last_date.valid() || m.last_date < p.day) m.last_date = p.day;
    }
    m.routes.assign(routes.begin(), routes.end());
    return m;
}

} // namespace transit
