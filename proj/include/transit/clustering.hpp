#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "transit/types.hpp"

namespace transit {

/// One observed trip start: day index, trip index within the day, and the
/// start time in seconds-of-day.
struct StartPoint {
    int day_index = 0;
    int trip_index = 0;
    double tp = 0.0;
};

struct Cluster {
    double centroid = 0.0; // mean of member times
    int count = 0;
    std::vector<StartPoint> members;
};

/// Start-time clusters, centroid-ascending. Invariants after clustering:
/// pairwise centroid gaps exceed t1 and each centroid equals the mean of
/// its members.
struct ClusterState {
    std::vector<Cluster> clusters;

    bool empty() const { return clusters.empty(); }
    std::vector<double> centroids() const;
};

struct ClusterConfig {
    double t1 = 900.0;            // minimum centroid separation, seconds
    int t2 = 10;                  // minimum member count for a cluster to survive
    std::vector<double> t1_grid;  // candidate separations for grid search
};

/// Single-pass sequential clustering of start times. Points are processed
/// in ascending time order; each point merges into the nearest cluster
/// when closer than t1, else opens a new one. Merges that pull two
/// centroids within t1 of each other collapse those clusters. Clusters
/// with fewer than t2 members are dropped at the end.
ClusterState cluster_starts(std::vector<StartPoint> points, const ClusterConfig& cfg);

/// Index of the cluster with the nearest centroid (squared distance);
/// ties resolve to the earlier centroid; nullopt when state is empty.
std::optional<std::size_t> assign(double tp, const ClusterState& state);

/// Start times (first retained stop) of every trip in the matrix,
/// sorted ascending by time.
std::vector<StartPoint> collect_starts(const ArrivalMatrix& m);

struct GridSearchResult {
    double t1 = 0.0;
    ClusterState state;
    std::vector<std::pair<double, double>> scores; // (t1 candidate, mean wait minutes)
};

/// Tries each t1 candidate: clusters the training starts, treats the
/// centroids as a first-stop schedule, and scores the mean timetable wait
/// of the validation arrivals at the first stop. Returns the candidate
/// with the lowest mean wait; ties go to the smaller t1.
GridSearchResult grid_search_t1(const std::vector<StartPoint>& train_starts,
                                const std::vector<double>& t1_grid,
                                const ArrivalMatrix& validation,
                                int t2);

/// Debug dump, header: T1,cluster_index,centroid,count
void write_clusters_csv(double t1, const ClusterState& state, std::ostream& out);

} // namespace transit
