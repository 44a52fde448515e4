#include <doctest.h>

#include <cmath>

#include "transit/timetable.hpp"

using namespace transit;

namespace {

ArrivalMatrix matrix_from(const std::vector<std::vector<std::map<int, double>>>& day_trips,
                          std::vector<int> stop_seqs) {
    ArrivalMatrix m;
    m.route_id = "425";
    m.stop_seqs = std::move(stop_seqs);
    Date d{2018, 10, 1};
    for (const auto& trips : day_trips) {
        m.days.push_back(d);
        m.trips.push_back(trips);
        d = d.next();
    }
    m.check();
    return m;
}

ClusterState clusters_at(const std::vector<std::pair<double, int>>& centroid_counts) {
    ClusterState state;
    for (auto [c, n] : centroid_counts) state.clusters.push_back(Cluster{c, n, {}});
    return state;
}

} // namespace

TEST_CASE("slot index is a half-open floor division") {
    CHECK(slot_of(0.0, 15) == 0);
    CHECK(slot_of(899.0, 15) == 0);
    CHECK(slot_of(900.0, 15) == 1);
    CHECK(slot_of(25200.0, 15) == 28);
    CHECK(slot_of(86399.0, 15) == 95);
    CHECK(slot_of(25200.0, 60) == 7);
}

TEST_CASE("downstream time is the start plus the mean slot offset") {
    // offsets to stop 4 across three days: 600, 720, 840 -> mean 720
    auto m = matrix_from(
        {
            {{{1, 25200.0}, {4, 25800.0}}},
            {{{1, 25200.0}, {4, 25920.0}}},
            {{{1, 25200.0}, {4, 26040.0}}},
        },
        {1, 4});
    auto starts = clusters_at({{25200.0, 3}});
    auto build = build_timetable(m, starts);
    REQUIRE(build.timetable.rows.size() == 1);
    CHECK(build.timetable.rows[0].scheduled.at(1) == 25200);
    CHECK(build.timetable.rows[0].scheduled.at(4) == 25200 + 720);
    REQUIRE(build.slots.size() == 1);
    CHECK(build.slots[0].slot == 28);
    CHECK(build.slots[0].stop_seq == 4);
    CHECK(build.slots[0].mean_offset == doctest::Approx(720.0));
    CHECK(build.slots[0].n == 3);
    CHECK(build.slots[0].variance == doctest::Approx(9600.0)); // (120^2 + 0 + 120^2)/3
}

TEST_CASE("constant offsets give zero variance") {
    auto m = matrix_from(
        {
            {{{1, 25200.0}, {4, 25800.0}}},
            {{{1, 25200.0}, {4, 25800.0}}},
        },
        {1, 4});
    auto build = build_timetable(m, clusters_at({{25200.0, 2}}));
    CHECK(build.timetable.rows[0].scheduled.at(4) == 25800);
    REQUIRE(build.slots.size() == 1);
    CHECK(build.slots[0].variance == 0.0);
}

TEST_CASE("each row uses its own slot's mean, not the global mean") {
    // 07:00 trips take 600 s to stop 4; 08:00 trips take 900 s
    auto m = matrix_from(
        {
            {{{1, 25200.0}, {4, 25800.0}}, {{1, 28800.0}, {4, 29700.0}}},
            {{{1, 25200.0}, {4, 25800.0}}, {{1, 28800.0}, {4, 29700.0}}},
        },
        {1, 4});
    auto starts = clusters_at({{25200.0, 2}, {28800.0, 2}});
    auto build = build_timetable(m, starts);
    REQUIRE(build.timetable.rows.size() == 2);
    CHECK(build.timetable.rows[0].scheduled.at(4) == 25200 + 600);
    CHECK(build.timetable.rows[1].scheduled.at(4) == 28800 + 900);
}

TEST_CASE("a slot with no samples falls back to the all-day mean") {
    // the 08:00 cluster's trips never reach stop 4
    auto m = matrix_from(
        {
            {{{1, 25200.0}, {4, 25800.0}}, {{1, 28800.0}}},
            {{{1, 25200.0}, {4, 25800.0}}, {{1, 28800.0}}},
        },
        {1, 4});
    auto starts = clusters_at({{25200.0, 2}, {28800.0, 2}});
    auto build = build_timetable(m, starts);
    REQUIRE(build.timetable.rows.size() == 2);
    CHECK(build.timetable.rows[1].scheduled.at(4) == 28800 + 600); // all-day mean is 600
    CHECK(!build.warnings.empty());
}

TEST_CASE("a stop with no samples anywhere is omitted with a warning") {
    auto m = matrix_from({{{{1, 25200.0}}}, {{{1, 25200.0}}}}, {1, 4});
    auto build = build_timetable(m, clusters_at({{25200.0, 2}}));
    REQUIRE(build.timetable.rows.size() == 1);
    CHECK(build.timetable.rows[0].scheduled.count(4) == 0);
    CHECK(!build.warnings.empty());
}

TEST_CASE("building with no clusters is an error") {
    auto m = matrix_from({{{{1, 25200.0}}}}, {1});
    CHECK_THROWS_AS(build_timetable(m, ClusterState{}), EmptyResultError);
}

TEST_CASE("emitted slot means minimize the sum of squared deviations") {
    // independent recomputation of each slot's samples from the matrix
    auto m = matrix_from(
        {
            {{{1, 25190.0}, {4, 25800.0}, {7, 26300.0}}, {{1, 28805.0}, {4, 29700.0}, {7, 30400.0}}},
            {{{1, 25210.0}, {4, 25930.0}, {7, 26500.0}}, {{1, 28795.0}, {4, 29660.0}, {7, 30300.0}}},
            {{{1, 25200.0}, {4, 25870.0}, {7, 26380.0}}, {{1, 28800.0}, {4, 29710.0}, {7, 30490.0}}},
        },
        {1, 4, 7});
    ClusterConfig cfg;
    cfg.t1 = 900;
    cfg.t2 = 1;
    auto starts = cluster_starts(collect_starts(m), cfg);
    auto build = build_timetable(m, starts);
    REQUIRE(!build.slots.empty());

    for (const auto& cell : build.slots) {
        std::vector<double> samples;
        for (int k = 0; k < m.day_count(); ++k) {
            for (int i = 0; i < m.trips_on(k); ++i) {
                double tp = *m.arrival(k, i, 1);
                auto c = assign(tp, starts);
                double centroid = starts.clusters[*c].centroid;
                if (slot_of(centroid, 15) != cell.slot) continue;
                if (auto t = m.arrival(k, i, cell.stop_seq)) samples.push_back(*t - centroid);
            }
        }
        REQUIRE(static_cast<int>(samples.size()) == cell.n);

        auto sse = [&](double x) {
            double acc = 0.0;
            for (double s : samples) acc += (s - x) * (s - x);
            return acc;
        };
        CHECK(sse(cell.mean_offset) < sse(cell.mean_offset + 1.0));
        CHECK(sse(cell.mean_offset) < sse(cell.mean_offset - 1.0));
    }
}

TEST_CASE("built rows are strictly increasing along published stops") {
    auto m = matrix_from(
        {
            {{{1, 25200.0}, {4, 25801.0}, {7, 26300.0}}},
            {{{1, 25201.0}, {4, 25800.0}, {7, 26299.0}}},
        },
        {1, 4, 7});
    ClusterConfig cfg;
    cfg.t1 = 600;
    cfg.t2 = 1;
    auto starts = cluster_starts(collect_starts(m), cfg);
    auto build = build_timetable(m, starts);
    for (const auto& row : build.timetable.rows) {
        int prev = -1;
        for (const auto& [seq, t] : row.scheduled) {
            CHECK(t > prev);
            prev = t;
        }
    }
}
