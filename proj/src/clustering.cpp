#include "transit/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <tuple>

#include "transit/util.hpp"
#include "transit/waiting.hpp"

namespace transit {

namespace {

struct Work {
    double sum = 0.0;
    int count = 0;
    std::vector<StartPoint> members;

    double mean() const { return sum / count; }
};

// nearest by absolute gap; ties go to the earlier (smaller) mean
std::size_t nearest(const std::vector<Work>& clusters, double tp) {
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        double gap = std::abs(tp - clusters[i].mean());
        if (gap < best_gap) {
            best = i;
            best_gap = gap;
        }
    }
    return best;
}

// collapse adjacent clusters until every gap exceeds t1
void repair_separation(std::vector<Work>& clusters, double t1) {
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 1; i < clusters.size(); ++i) {
            if (clusters[i].mean() - clusters[i - 1].mean() <= t1) {
                Work& a = clusters[i - 1];
                Work& b = clusters[i];
                a.sum += b.sum;
                a.count += b.count;
                a.members.insert(a.members.end(), b.members.begin(), b.members.end());
                clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(i));
                merged = true;
                break;
            }
        }
    }
}

} // namespace

std::vector<double> ClusterState::centroids() const {
    std::vector<double> out;
    out.reserve(clusters.size());
    for (const auto& c : clusters) out.push_back(c.centroid);
    return out;
}

ClusterState cluster_starts(std::vector<StartPoint> points, const ClusterConfig& cfg) {
    std::sort(points.begin(), points.end(), [](const StartPoint& a, const StartPoint& b) {
        return std::tie(a.tp, a.day_index, a.trip_index) < std::tie(b.tp, b.day_index, b.trip_index);
    });

    std::vector<Work> clusters; // mean-ascending throughout the pass
    for (const auto& p : points) {
        bool opened = true;
        if (!clusters.empty()) {
            std::size_t i = nearest(clusters, p.tp);
            if (std::abs(p.tp - clusters[i].mean()) < cfg.t1) {
                clusters[i].sum += p.tp;
                clusters[i].count += 1;
                clusters[i].members.push_back(p);
                opened = false;
            }
        }
        if (opened) {
            Work w;
            w.sum = p.tp;
            w.count = 1;
            w.members.push_back(p);
            auto pos = std::upper_bound(clusters.begin(), clusters.end(), p.tp,
                                        [](double v, const Work& c) { return v < c.mean(); });
            clusters.insert(pos, std::move(w));
        }
        repair_separation(clusters, cfg.t1);
    }

    ClusterState state;
    for (auto& w : clusters) {
        if (w.count < cfg.t2) continue; // too few supporting days, outlier
        Cluster c;
        c.count = w.count;
        c.members = std::move(w.members);
        double sum = std::accumulate(c.members.begin(), c.members.end(), 0.0,
                                     [](double acc, const StartPoint& m) { return acc + m.tp; });
        c.centroid = sum / c.count;
        state.clusters.push_back(std::move(c));
    }
    std::sort(state.clusters.begin(), state.clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.centroid < b.centroid; });
    return state;
}

std::optional<std::size_t> assign(double tp, const ClusterState& state) {
    if (state.clusters.empty()) return std::nullopt;
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.clusters.size(); ++i) {
        double d = tp - state.clusters[i].centroid;
        if (d * d < best_d2) {
            best = i;
            best_d2 = d * d;
        }
    }
    return best;
}

std::vector<StartPoint> collect_starts(const ArrivalMatrix& m) {
    std::vector<StartPoint> out;
    if (m.stop_seqs.empty()) return out;
    const int first_seq = m.stop_seqs.front();
    for (int k = 0; k < m.day_count(); ++k)
        for (int i = 0; i < m.trips_on(k); ++i)
            if (auto t = m.arrival(k, i, first_seq)) out.push_back(StartPoint{k, i, *t});
    std::sort(out.begin(), out.end(), [](const StartPoint& a, const StartPoint& b) {
        return std::tie(a.tp, a.day_index, a.trip_index) < std::tie(b.tp, b.day_index, b.trip_index);
    });
    return out;
}

GridSearchResult grid_search_t1(const std::vector<StartPoint>& train_starts,
                                const std::vector<double>& t1_grid,
                                const ArrivalMatrix& validation,
                                int t2) {
    if (t1_grid.empty()) throw ValidationError("t1 grid is empty");
    if (validation.stop_seqs.empty())
        throw ValidationError("validation slice has no stops");
    std::vector<double> val_arrivals = validation.arrivals_at(validation.stop_seqs.front());
    if (val_arrivals.empty()) throw ValidationError("validation slice has no arrivals");

    GridSearchResult result;
    bool found = false;
    double best_score = std::numeric_limits<double>::infinity();
    for (double t1 : t1_grid) {
        ClusterConfig cfg;
        cfg.t1 = t1;
        cfg.t2 = t2;
        ClusterState state = cluster_starts(train_starts, cfg);
        if (state.empty()) continue;

        std::vector<int> schedule;
        for (double c : state.centroids()) schedule.push_back(static_cast<int>(std::floor(c + 0.5)));
        std::sort(schedule.begin(), schedule.end());

        double total = 0.0;
        int n = 0;
        for (double t : val_arrivals) {
            if (auto w = timetable_wait(t, schedule)) {
                total += *w / 60.0;
                ++n;
            }
        }
        double score = n > 0 ? total / n : std::numeric_limits<double>::infinity();
        result.scores.emplace_back(t1, score);

        if (!found || score < best_score || (score == best_score && t1 < result.t1)) {
            found = true;
            best_score = score;
            result.t1 = t1;
            result.state = std::move(state);
        }
    }
    if (!found) throw EmptyResultError("no viable T1");
    return result;
}

void write_clusters_csv(double t1, const ClusterState& state, std::ostream& out) {
    out << "T1,cluster_index,centroid,count\n";
    for (std::size_t i = 0; i < state.clusters.size(); ++i)
        out << format_fixed(t1, 0) << ',' << i << ',' << format_fixed(state.clusters[i].centroid, 3)
            << ',' << state.clusters[i].count << "\n";
}

} // namespace transit
