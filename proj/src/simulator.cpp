#include "transit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <tuple>

#include "transit/util.hpp"

namespace transit {

namespace {

constexpr double kMetersPerDegLat = 111320.0;

double gauss(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

void check_config(const SimConfig& cfg) {
    if (cfg.stops.size() < 2) throw ValidationError("simulator: need at least 2 stops");
    for (std::size_t i = 0; i < cfg.stops.size(); ++i)
        if (cfg.stops[i].seq != static_cast<int>(i) + 1)
            throw ValidationError("simulator: stop seq must be contiguous from 1");
    if (cfg.leg_travel_s.size() != cfg.stops.size() - 1)
        throw ValidationError("simulator: need one travel time per leg");
    for (double leg : cfg.leg_travel_s)
        if (leg <= 0) throw ValidationError("simulator: leg travel times must be positive");
    if (cfg.true_starts.empty()) throw ValidationError("simulator: no start times");
    if (!std::is_sorted(cfg.true_starts.begin(), cfg.true_starts.end()))
        throw ValidationError("simulator: start times must be ascending");
    if (cfg.days < 1) throw ValidationError("simulator: days must be >= 1");
    if (cfg.sample_period_s <= 0) throw ValidationError("simulator: sample period must be positive");
    if (cfg.sigma_start_s < 0 || cfg.sigma_travel_base_s < 0 || cfg.sigma_growth_s_per_h < 0 ||
        cfg.gps_noise_m < 0)
        throw ValidationError("simulator: sigmas must be non-negative");
}

std::string bus_name(int trip_index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "SIM%03d", trip_index + 1);
    return buf;
}

} // namespace

SimOutput simulate(const SimConfig& cfg) {
    check_config(cfg);
    SimOutput out;
    out.stops = cfg.stops;

    const std::size_t n_stops = cfg.stops.size();
    const double first_start = cfg.true_starts.front();

    // ground truth: true starts plus nominal cumulative travel
    out.truth.route_id = cfg.route_id;
    out.truth.direction = cfg.direction;
    for (const auto& s : cfg.stops) out.truth.published_stops.push_back(s.seq);
    for (double start : cfg.true_starts) {
        TimetableRow row;
        double t = start;
        row.scheduled.emplace(1, static_cast<int>(std::floor(t + 0.5)));
        for (std::size_t j = 0; j + 1 < n_stops; ++j) {
            t += cfg.leg_travel_s[j];
            row.scheduled.emplace(static_cast<int>(j) + 2, static_cast<int>(std::floor(t + 0.5)));
        }
        out.truth.rows.push_back(std::move(row));
    }
    out.truth.check();

    out.truth_arrivals.route_id = cfg.route_id;
    out.truth_arrivals.direction = cfg.direction;
    for (std::size_t j = 0; j < n_stops; ++j)
        out.truth_arrivals.stop_seqs.push_back(static_cast<int>(j) + 1);

    Date date = cfg.start_date;
    for (int day = 0; day < cfg.days; ++day, date = date.next()) {
        std::vector<std::map<int, double>> day_trips;

        for (std::size_t trip = 0; trip < cfg.true_starts.size(); ++trip) {
            std::vector<double> arrivals(n_stops);
            arrivals[0] = cfg.true_starts[trip];
            if (cfg.sigma_start_s > 0)
                arrivals[0] += cfg.sigma_start_s * gauss(mix_seed(cfg.seed, day, trip, 1));

            bool usable = arrivals[0] >= 0.0;
            for (std::size_t j = 0; usable && j + 1 < n_stops; ++j) {
                const double hours = std::max(0.0, (arrivals[j] - first_start) / 3600.0);
                const double sigma = cfg.sigma_travel_base_s + cfg.sigma_growth_s_per_h * hours;
                double next = 0.0;
                bool ok = false;
                for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
                    double noise = sigma > 0
                        ? sigma * gauss(mix_seed(cfg.seed, day, trip, 16 + j * 128 + attempt))
                        : 0.0;
                    next = arrivals[j] + cfg.leg_travel_s[j] + noise;
                    ok = next > arrivals[j];
                }
                if (!ok) next = arrivals[j] + 1.0; // clamp after 100 rejected draws
                arrivals[j + 1] = next;
            }
            if (!usable || arrivals.back() >= 86400.0) {
                out.warnings.push_back("dropped trip " + std::to_string(trip + 1) + " on " +
                                       date.str() + ": outside the service day");
                continue;
            }

            std::map<int, double> truth_trip;
            for (std::size_t j = 0; j < n_stops; ++j)
                truth_trip.emplace(static_cast<int>(j) + 1, arrivals[j]);
            day_trips.push_back(std::move(truth_trip));

            // emit fixes on a whole-second grid anchored at the actual start
            std::mt19937_64 noise_rng(mix_seed(cfg.seed, day, trip, 13000));
            std::normal_distribution<double> unit(0.0, 1.0);
            const std::string bus = bus_name(static_cast<int>(trip));
            std::size_t leg = 0;
            for (double t = std::ceil(arrivals[0]); t <= arrivals.back(); t += cfg.sample_period_s) {
                while (leg + 2 < n_stops && t > arrivals[leg + 1]) ++leg;
                const double span = arrivals[leg + 1] - arrivals[leg];
                const double f = std::clamp((t - arrivals[leg]) / span, 0.0, 1.0);
                const Stop& a = cfg.stops[leg];
                const Stop& b = cfg.stops[leg + 1];
                double lat = a.lat + f * (b.lat - a.lat);
                double lon = a.lon + f * (b.lon - a.lon);
                if (cfg.gps_noise_m > 0) {
                    lat += cfg.gps_noise_m * unit(noise_rng) / kMetersPerDegLat;
                    lon += cfg.gps_noise_m * unit(noise_rng) /
                           (kMetersPerDegLat * std::cos(lat * std::numbers::pi / 180.0));
                }
                out.trace.push_back(RawPoint{cfg.route_id, bus, cfg.direction, date,
                                             static_cast<int>(std::llround(t)), lat, lon});
            }
        }

        if (day_trips.empty()) continue;
        std::stable_sort(day_trips.begin(), day_trips.end(),
                         [](const std::map<int, double>& a, const std::map<int, double>& b) {
                             return a.at(1) < b.at(1);
                         });
        out.truth_arrivals.days.push_back(date);
        out.truth_arrivals.trips.push_back(std::move(day_trips));
    }

    std::stable_sort(out.trace.begin(), out.trace.end(), [](const RawPoint& a, const RawPoint& b) {
        return std::tie(a.bus_id, a.day, a.sec_of_day) < std::tie(b.bus_id, b.day, b.sec_of_day);
    });
    out.truth_arrivals.check();
    return out;
}

std::vector<Stop> make_line_route(const std::string& route_id, Direction direction,
                                  int n_stops, double spacing_m, double lat0, double lon0) {
    std::vector<Stop> stops;
    for (int i = 0; i < n_stops; ++i) {
        Stop s;
        s.stop_id = "S" + std::to_string(i + 1);
        s.route_id = route_id;
        s.direction = direction;
        s.seq = i + 1;
        s.lat = lat0 + spacing_m * i / kMetersPerDegLat;
        s.lon = lon0;
        stops.push_back(std::move(s));
    }
    return stops;
}

std::vector<double> make_starts(double first_s, double headway_s, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(first_s + headway_s * i);
    return out;
}

} // namespace transit
