#include "transit/snap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>
#include <tuple>

#include "transit/util.hpp"

namespace transit {

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    constexpr double kEarthRadiusM = 6371000.0;
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlambda = (lon2 - lon1) * kDegToRad;
    const double sp = std::sin(dphi / 2.0);
    const double sl = std::sin(dlambda / 2.0);
    const double a = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

std::vector<StopEvent> snap_points(std::span<const RawPoint> points,
                                   const std::vector<Stop>& stops,
                                   const SnapConfig& cfg) {
    struct Assigned {
        int stop_index = -1; // -1: outside every radius
        double dist = 0.0;
    };

    // stops come in ascending seq order, so keeping strict improvements only
    // resolves exact distance ties toward the lower seq
    auto classify = [&](const RawPoint& p) {
        Assigned a;
        for (std::size_t s = 0; s < stops.size(); ++s) {
            double d = haversine_m(p.lat, p.lon, stops[s].lat, stops[s].lon);
            if (d <= cfg.radius_m && (a.stop_index < 0 || d < a.dist)) {
                a.stop_index = static_cast<int>(s);
                a.dist = d;
            }
        }
        return a;
    };

    std::vector<StopEvent> events;
    int run_stop = -1;      // stop index of the current in-radius run
    std::size_t best_point = 0;
    double best_dist = 0.0;

    auto flush = [&]() {
        if (run_stop < 0) return;
        const RawPoint& p = points[best_point];
        events.push_back(StopEvent{p.day, p.bus_id, p.direction, stops[run_stop].seq,
                                   static_cast<double>(p.sec_of_day)});
        run_stop = -1;
    };

    for (std::size_t i = 0; i < points.size(); ++i) {
        Assigned a = classify(points[i]);
        if (a.stop_index != run_stop) {
            flush();
            run_stop = a.stop_index;
            best_point = i;
            best_dist = a.dist;
        } else if (run_stop >= 0 && a.dist < best_dist) {
            best_point = i;
            best_dist = a.dist;
        }
    }
    flush();
    return events;
}

std::vector<std::map<int, double>> segment_trips(const std::vector<StopEvent>& events,
                                                 int stop_count,
                                                 const SnapConfig& cfg) {
    std::vector<std::map<int, double>> trips;
    std::map<int, double> current;
    int running_max = 0;
    double prev_time = 0.0;

    auto close = [&]() {
        if (static_cast<int>(current.size()) >= cfg.min_trip_stops) trips.push_back(current);
        current.clear();
        running_max = 0;
    };

    for (const auto& e : events) {
        if (e.stop_seq < 1 || e.stop_seq > stop_count) continue;
        if (!current.empty() &&
            (e.stop_seq < running_max || e.arrival - prev_time > cfg.trip_gap_s)) {
            close();
        }
        current.emplace(e.stop_seq, e.arrival); // first arrival per stop wins
        running_max = std::max(running_max, e.stop_seq);
        prev_time = e.arrival;
    }
    close();
    return trips;
}

ArrivalMatrix build_matrix(const std::string& route_id,
                           Direction direction,
                           const std::vector<TripObs>& trips,
                           int stop_count,
                           int sample_every,
                           std::vector<std::string>* warnings) {
    std::set<int> retained;
    for (int seq = 1; seq <= stop_count; seq += sample_every) retained.insert(seq);
    if (stop_count >= 1) retained.insert(stop_count); // terminus is always published

    ArrivalMatrix m;
    m.route_id = route_id;
    m.direction = direction;
    m.stop_seqs.assign(retained.begin(), retained.end());
    const int first_seq = m.stop_seqs.empty() ? 0 : m.stop_seqs.front();

    std::map<Date, std::vector<std::map<int, double>>> by_day;
    for (const auto& trip : trips) {
        std::map<int, double> kept;
        double prev = -1.0;
        for (const auto& [seq, t] : trip.arrival_by_seq) {
            if (!retained.count(seq)) continue;
            if (t <= prev) {
                if (warnings)
                    warnings->push_back("dropped non-increasing arrival at stop " +
                                        std::to_string(seq) + " on " + trip.day.str());
                continue;
            }
            kept.emplace(seq, t);
            prev = t;
        }
        if (!kept.count(first_seq)) continue; // no start observation, not usable
        by_day[trip.day].push_back(std::move(kept));
    }

    for (auto& [day, day_trips] : by_day) {
        std::stable_sort(day_trips.begin(), day_trips.end(),
                         [&](const std::map<int, double>& a, const std::map<int, double>& b) {
                             return a.at(first_seq) < b.at(first_seq);
                         });
        m.days.push_back(day);
        m.trips.push_back(std::move(day_trips));
    }
    m.check();
    return m;
}

namespace {

std::vector<Stop> stops_of(const std::vector<Stop>& stops, const std::string& route_id,
                           Direction direction) {
    std::vector<Stop> out;
    for (const auto& s : stops)
        if (s.route_id == route_id && s.direction == direction) out.push_back(s);
    std::sort(out.begin(), out.end(), [](const Stop& a, const Stop& b) { return a.seq < b.seq; });
    return out;
}

// invokes fn once per (bus, day) group of the route's points, time-sorted
template <typename Fn>
void per_bus_day(const std::vector<RawPoint>& points, const std::string& route_id,
                 Direction direction, Fn&& fn) {
    std::vector<RawPoint> selected;
    for (const auto& p : points)
        if (p.route_id == route_id && p.direction == direction) selected.push_back(p);
    std::stable_sort(selected.begin(), selected.end(), [](const RawPoint& a, const RawPoint& b) {
        return std::tie(a.bus_id, a.day, a.sec_of_day) < std::tie(b.bus_id, b.day, b.sec_of_day);
    });

    std::size_t begin = 0;
    while (begin < selected.size()) {
        std::size_t end = begin + 1;
        while (end < selected.size() && selected[end].bus_id == selected[begin].bus_id &&
               selected[end].day == selected[begin].day)
            ++end;
        fn(selected[begin].day, std::span<const RawPoint>(selected.data() + begin, end - begin));
        begin = end;
    }
}

} // namespace

std::vector<TripObs> extract_trips(const std::vector<RawPoint>& points,
                                   const std::vector<Stop>& stops,
                                   const std::string& route_id,
                                   Direction direction,
                                   const SnapConfig& cfg) {
    auto route_stops = stops_of(stops, route_id, direction);
    std::vector<TripObs> out;
    per_bus_day(points, route_id, direction, [&](Date day, std::span<const RawPoint> group) {
        auto events = snap_points(group, route_stops, cfg);
        for (auto& trip : segment_trips(events, static_cast<int>(route_stops.size()), cfg))
            out.push_back(TripObs{day, std::move(trip)});
    });
    return out;
}

std::vector<StopEvent> collect_events(const std::vector<RawPoint>& points,
                                      const std::vector<Stop>& stops,
                                      const std::string& route_id,
                                      Direction direction,
                                      const SnapConfig& cfg) {
    auto route_stops = stops_of(stops, route_id, direction);
    std::vector<StopEvent> out;
    per_bus_day(points, route_id, direction, [&](Date, std::span<const RawPoint> group) {
        auto events = snap_points(group, route_stops, cfg);
        out.insert(out.end(), events.begin(), events.end());
    });
    return out;
}

ArrivalMatrix extract_matrix(const std::vector<RawPoint>& points,
                             const std::vector<Stop>& stops,
                             const std::string& route_id,
                             Direction direction,
                             const SnapConfig& cfg,
                             int sample_every,
                             std::vector<std::string>* warnings) {
    int stop_count = 0;
    for (const auto& s : stops)
        if (s.route_id == route_id && s.direction == direction) ++stop_count;
    auto trips = extract_trips(points, stops, route_id, direction, cfg);
    return build_matrix(route_id, direction, trips, stop_count, sample_every, warnings);
}

void write_events_csv(const std::vector<StopEvent>& events, std::ostream& out) {
    out << "day,bus_id,direction,stop_seq,arrival\n";
    for (const auto& e : events)
        out << e.day.str() << ',' << e.bus_id << ',' << to_string(e.direction) << ',' << e.stop_seq
            << ',' << format_fixed(e.arrival, 3) << "\n";
}

} // namespace transit
