#include "transit/types.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <set>
#include <tuple>

namespace transit {

namespace {

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return lengths[month - 1];
}

} // namespace

bool Date::valid() const {
    if (year < 1 || month < 1 || month > 12 || day < 1) return false;
    return day <= days_in_month(year, month);
}

Date Date::next() const {
    Date d = *this;
    if (++d.day > days_in_month(year, month)) {
        d.day = 1;
        if (++d.month > 12) {
            d.month = 1;
            ++d.year;
        }
    }
    return d;
}

std::string Date::str() const {
    std::array<char, 16> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02d-%02d", year, month, day);
    return buf.data();
}

std::optional<Date> Date::parse(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto num = [&](int from, int len) -> int {
        int v = 0;
        for (int i = from; i < from + len; ++i) {
            if (s[i] < '0' || s[i] > '9') return -1;
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    Date d{num(0, 4), num(5, 2), num(8, 2)};
    if (d.year < 0 || d.month < 0 || d.day < 0 || !d.valid()) return std::nullopt;
    return d;
}

std::string to_string(Direction d) {
    return d == Direction::Up ? "UP" : "DOWN";
}

std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "UP" || s == "up") return Direction::Up;
    if (s == "DOWN" || s == "down") return Direction::Down;
    return std::nullopt;
}

std::optional<double> ArrivalMatrix::arrival(int day_index, int trip_index, int seq) const {
    const auto& trip = trips[day_index][trip_index];
    auto it = trip.find(seq);
    if (it == trip.end()) return std::nullopt;
    return it->second;
}

std::vector<double> ArrivalMatrix::arrivals_at(int seq) const {
    std::vector<double> out;
    for (const auto& day : trips)
        for (const auto& trip : day)
            if (auto it = trip.find(seq); it != trip.end()) out.push_back(it->second);
    return out;
}

ArrivalMatrix ArrivalMatrix::filter_days(const std::vector<Date>& keep) const {
    ArrivalMatrix out;
    out.route_id = route_id;
    out.direction = direction;
    out.stop_seqs = stop_seqs;
    for (int k = 0; k < day_count(); ++k) {
        if (std::find(keep.begin(), keep.end(), days[k]) == keep.end()) continue;
        out.days.push_back(days[k]);
        out.trips.push_back(trips[k]);
    }
    return out;
}

ArrivalMatrix ArrivalMatrix::filter_stops(const std::vector<int>& keep) const {
    std::set<int> keep_set(keep.begin(), keep.end());
    ArrivalMatrix out;
    out.route_id = route_id;
    out.direction = direction;
    out.days = days;
    for (int seq : stop_seqs)
        if (keep_set.count(seq)) out.stop_seqs.push_back(seq);
    out.trips.resize(trips.size());
    for (std::size_t k = 0; k < trips.size(); ++k) {
        for (const auto& trip : trips[k]) {
            std::map<int, double> kept;
            for (const auto& [seq, t] : trip)
                if (keep_set.count(seq)) kept.emplace(seq, t);
            if (!kept.empty()) out.trips[k].push_back(std::move(kept));
        }
    }
    return out;
}

void ArrivalMatrix::check() const {
    if (days.size() != trips.size())
        throw ValidationError("arrival matrix: day/trip list size mismatch");
    if (!std::is_sorted(days.begin(), days.end()))
        throw ValidationError("arrival matrix: days not ascending");
    if (!std::is_sorted(stop_seqs.begin(), stop_seqs.end()))
        throw ValidationError("arrival matrix: stop seqs not ascending");
    const int first_seq = stop_seqs.empty() ? 0 : stop_seqs.front();
    for (std::size_t k = 0; k < trips.size(); ++k) {
        double prev_start = -1.0;
        for (const auto& trip : trips[k]) {
            double prev = -1.0;
            for (const auto& [seq, t] : trip) {
                if (t < 0.0 || t >= 86400.0)
                    throw ValidationError("arrival matrix: arrival outside [0, 86400)");
                if (t <= prev)
                    throw ValidationError("arrival matrix: arrivals not strictly increasing within a trip");
                prev = t;
            }
            auto it = trip.find(first_seq);
            if (it == trip.end())
                throw ValidationError("arrival matrix: trip missing the first retained stop");
            if (it->second < prev_start)
                throw ValidationError("arrival matrix: trips not ordered by first-stop arrival");
            prev_start = it->second;
        }
    }
}

int Timetable::start_of(const TimetableRow& row) {
    return row.scheduled.begin()->second;
}

std::vector<int> Timetable::column(int seq) const {
    std::vector<int> out;
    for (const auto& row : rows)
        if (auto it = row.scheduled.find(seq); it != row.scheduled.end()) out.push_back(it->second);
    std::sort(out.begin(), out.end());
    return out;
}

void Timetable::check(double min_start_gap) const {
    std::vector<int> starts;
    for (const auto& row : rows) {
        if (row.scheduled.empty()) throw ValidationError("timetable: empty row");
        int prev = -1;
        for (const auto& [seq, t] : row.scheduled) {
            if (std::find(published_stops.begin(), published_stops.end(), seq) == published_stops.end())
                throw ValidationError("timetable: row uses unpublished stop seq");
            if (t <= prev) throw ValidationError("timetable: scheduled times not strictly increasing");
            prev = t;
        }
        starts.push_back(start_of(row));
    }
    std::sort(starts.begin(), starts.end());
    for (std::size_t i = 1; i < starts.size(); ++i)
        if (starts[i] - starts[i - 1] < min_start_gap)
            throw ValidationError("timetable: start times closer than the minimum separation");
}

ValidationSummary validate_dataset(const std::vector<Stop>& stops,
                                   const std::vector<RawPoint>& points,
                                   double nominal_period_s) {
    ValidationSummary summary;
    summary.total_points = static_cast<long>(points.size());

    // seq contiguity per (route, direction)
    std::map<std::pair<std::string, Direction>, std::vector<int>> seqs;
    for (const auto& s : stops) seqs[{s.route_id, s.direction}].push_back(s.seq);
    for (auto& [key, list] : seqs) {
        std::sort(list.begin(), list.end());
        bool ok = true;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i] != static_cast<int>(i) + 1) { ok = false; break; }
        }
        if (!ok)
            summary.seq_violations.push_back(key.first + "/" + to_string(key.second) +
                                             ": stop seq not contiguous from 1");
    }

    for (const auto& p : points) summary.points_per_route_day[{p.route_id, p.day}]++;

    // sampling gaps per bus within a day
    std::vector<const RawPoint*> sorted;
    sorted.reserve(points.size());
    for (const auto& p : points) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](const RawPoint* a, const RawPoint* b) {
        return std::tie(a->route_id, a->bus_id, a->day, a->sec_of_day) <
               std::tie(b->route_id, b->bus_id, b->day, b->sec_of_day);
    });
    const double limit = 10.0 * nominal_period_s;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const RawPoint& a = *sorted[i - 1];
        const RawPoint& b = *sorted[i];
        if (a.route_id != b.route_id || a.bus_id != b.bus_id || !(a.day == b.day)) continue;
        if (b.sec_of_day - a.sec_of_day > limit) summary.gap_flags[b.route_id]++;
    }
    return summary;
}

} // namespace transit
