#include "transit/timetable.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "transit/util.hpp"

namespace transit {

namespace {

int round_s(double v) { return static_cast<int>(std::floor(v + 0.5)); }

struct Samples {
    double sum = 0.0;
    std::vector<double> values;

    void add(double v) {
        sum += v;
        values.push_back(v);
    }
    int n() const { return static_cast<int>(values.size()); }
    double mean() const { return sum / n(); }
    double variance() const {
        double m = mean();
        double acc = 0.0;
        for (double v : values) acc += (v - m) * (v - m);
        return acc / n();
    }
};

} // namespace

int slot_of(double sec_of_day, int slot_minutes) {
    return static_cast<int>(std::floor(sec_of_day / (60.0 * slot_minutes)));
}

TimetableBuild build_timetable(const ArrivalMatrix& training,
                               const ClusterState& starts,
                               int slot_minutes) {
    if (starts.empty()) throw EmptyResultError("no start clusters");
    if (training.stop_seqs.empty()) throw ValidationError("training matrix has no stops");

    TimetableBuild build;
    Timetable& tt = build.timetable;
    tt.route_id = training.route_id;
    tt.direction = training.direction;
    tt.published_stops = training.stop_seqs;
    const int first_seq = training.stop_seqs.front();

    // offsets of each trip's downstream arrivals from its cluster's centroid,
    // pooled per (slot of the centroid, stop)
    std::map<std::pair<int, int>, Samples> slot_samples;
    std::map<int, Samples> day_samples; // all-day fallback per stop
    for (int k = 0; k < training.day_count(); ++k) {
        for (int i = 0; i < training.trips_on(k); ++i) {
            auto tp = training.arrival(k, i, first_seq);
            if (!tp) continue;
            auto c = assign(*tp, starts);
            const double centroid = starts.clusters[*c].centroid;
            const int slot = slot_of(centroid, slot_minutes);
            for (int seq : training.stop_seqs) {
                if (seq == first_seq) continue;
                if (auto t = training.arrival(k, i, seq)) {
                    slot_samples[{slot, seq}].add(*t - centroid);
                    day_samples[seq].add(*t - centroid);
                }
            }
        }
    }

    for (const auto& [key, s] : slot_samples)
        build.slots.push_back(SlotStats{key.first, key.second, s.mean(), s.n(), s.variance()});

    for (const auto& cluster : starts.clusters) {
        TimetableRow row;
        const int start = round_s(cluster.centroid);
        row.scheduled.emplace(first_seq, start);
        const int slot = slot_of(cluster.centroid, slot_minutes);
        int prev = start;
        for (int seq : training.stop_seqs) {
            if (seq == first_seq) continue;
            const Samples* s = nullptr;
            if (auto it = slot_samples.find({slot, seq}); it != slot_samples.end()) {
                s = &it->second;
            } else if (auto dit = day_samples.find(seq); dit != day_samples.end()) {
                s = &dit->second;
                build.warnings.push_back("slot " + std::to_string(slot) + " stop " +
                                         std::to_string(seq) + ": no samples, using all-day mean");
            } else {
                build.warnings.push_back("stop " + std::to_string(seq) +
                                         ": no samples at all, omitted from row starting " +
                                         format_hms(start));
                continue;
            }
            const int sched = round_s(cluster.centroid + s->mean());
            if (sched <= prev) {
                build.warnings.push_back("stop " + std::to_string(seq) +
                                         ": non-increasing schedule, omitted from row starting " +
                                         format_hms(start));
                continue;
            }
            row.scheduled.emplace(seq, sched);
            prev = sched;
        }
        tt.rows.push_back(std::move(row));
    }

    tt.check();
    return build;
}

void write_slots_csv(const std::vector<SlotStats>& slots, std::ostream& out) {
    out << "slot,stop_seq,mean_offset,n,variance\n";
    for (const auto& s : slots)
        out << s.slot << ',' << s.stop_seq << ',' << format_fixed(s.mean_offset, 3) << ',' << s.n
            << ',' << format_fixed(s.variance, 3) << "\n";
}

} // namespace transit
