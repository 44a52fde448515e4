#include <doctest.h>

#include "transit/types.hpp"

using namespace transit;

TEST_CASE("date parse and format") {
    auto d = Date::parse("2018-10-01");
    REQUIRE(d.has_value());
    CHECK(d->year == 2018);
    CHECK(d->month == 10);
    CHECK(d->day == 1);
    CHECK(d->str() == "2018-10-01");

    CHECK_FALSE(Date::parse("2018-13-01").has_value());
    CHECK_FALSE(Date::parse("2018-02-30").has_value());
    CHECK_FALSE(Date::parse("2018/10/01").has_value());
    CHECK_FALSE(Date::parse("18-10-01").has_value());
    CHECK(Date::parse("2020-02-29").has_value()); // leap year
    CHECK_FALSE(Date::parse("2019-02-29").has_value());
}

TEST_CASE("date successor rolls over months and years") {
    CHECK(Date{2018, 10, 31}.next() == Date{2018, 11, 1});
    CHECK(Date{2018, 12, 31}.next() == Date{2019, 1, 1});
    CHECK(Date{2018, 10, 1}.next() == Date{2018, 10, 2});
}

TEST_CASE("direction names") {
    CHECK(to_string(Direction::Up) == "UP");
    CHECK(to_string(Direction::Down) == "DOWN");
    CHECK(parse_direction("UP") == Direction::Up);
    CHECK(parse_direction("down") == Direction::Down);
    CHECK_FALSE(parse_direction("sideways").has_value());
}

namespace {

Stop make_stop(const std::string& route, int seq, double lat = 28.6, double lon = 77.2) {
    return Stop{"S" + std::to_string(seq), route, Direction::Up, seq, lat, lon};
}

RawPoint make_point(const std::string& route, const std::string& bus, int sec) {
    return RawPoint{route, bus, Direction::Up, Date{2018, 10, 1}, sec, 28.6, 77.2};
}

} // namespace

TEST_CASE("validate_dataset on empty input reports nothing") {
    std::vector<Stop> stops = {make_stop("425", 1), make_stop("425", 2)};
    auto summary = validate_dataset(stops, {});
    CHECK(summary.total_points == 0);
    CHECK(summary.ok());
    CHECK(summary.gap_flags.empty());
}

TEST_CASE("validate_dataset flags a seq gap") {
    std::vector<Stop> stops = {make_stop("425", 1), make_stop("425", 3)};
    auto summary = validate_dataset(stops, {make_point("425", "B1", 100)});
    REQUIRE(summary.seq_violations.size() == 1);
    CHECK(summary.seq_violations[0].find("425") != std::string::npos);
}

TEST_CASE("validate_dataset flags one sampling gap at 600s under 10s nominal") {
    std::vector<Stop> stops = {make_stop("425", 1), make_stop("425", 2)};
    std::vector<RawPoint> points = {
        make_point("425", "B1", 100),
        make_point("425", "B1", 110),
        make_point("425", "B1", 710), // 600 s > 10 x 10 s
        make_point("425", "B1", 720),
    };
    auto summary = validate_dataset(stops, points);
    CHECK(summary.ok());
    REQUIRE(summary.gap_flags.count("425") == 1);
    CHECK(summary.gap_flags.at("425") == 1);
    CHECK(summary.points_per_route_day.at({"425", Date{2018, 10, 1}}) == 4);
}

TEST_CASE("validate_dataset does not flag gaps across buses or days") {
    std::vector<Stop> stops = {make_stop("425", 1), make_stop("425", 2)};
    std::vector<RawPoint> points = {
        make_point("425", "B1", 100),
        make_point("425", "B2", 5000),
        RawPoint{"425", "B1", Direction::Up, Date{2018, 10, 2}, 100, 28.6, 77.2},
    };
    auto summary = validate_dataset(stops, points);
    CHECK(summary.gap_flags.empty());
}

TEST_CASE("arrival matrix invariant checks") {
    ArrivalMatrix m;
    m.route_id = "425";
    m.days = {Date{2018, 10, 1}};
    m.stop_seqs = {1, 4};
    m.trips = {{{{1, 21600.0}, {4, 22000.0}}, {{1, 23000.0}, {4, 23500.0}}}};
    CHECK_NOTHROW(m.check());

    SUBCASE("non-increasing arrival within a trip") {
        m.trips[0][0][4] = 21600.0;
        CHECK_THROWS_AS(m.check(), ValidationError);
    }
    SUBCASE("trips out of start order") {
        std::swap(m.trips[0][0], m.trips[0][1]);
        CHECK_THROWS_AS(m.check(), ValidationError);
    }
    SUBCASE("trip missing the first retained stop") {
        m.trips[0][0].erase(1);
        CHECK_THROWS_AS(m.check(), ValidationError);
    }
    SUBCASE("arrival beyond the day") {
        m.trips[0][1][4] = 86400.0;
        CHECK_THROWS_AS(m.check(), ValidationError);
    }
}

TEST_CASE("arrival matrix filtering") {
    ArrivalMatrix m;
    m.route_id = "425";
    m.days = {Date{2018, 10, 1}, Date{2018, 10, 2}};
    m.stop_seqs = {1, 4, 7};
    m.trips = {
        {{{1, 100.0}, {4, 200.0}, {7, 300.0}}},
        {{{1, 150.0}, {4, 260.0}, {7, 370.0}}},
    };

    auto day1 = m.filter_days({Date{2018, 10, 2}});
    CHECK(day1.day_count() == 1);
    CHECK(day1.days[0] == Date{2018, 10, 2});
    CHECK(day1.trips_on(0) == 1);

    auto first = m.filter_stops({1});
    CHECK(first.stop_seqs == std::vector<int>{1});
    CHECK(first.arrivals_at(1).size() == 2);
    CHECK(first.arrivals_at(4).empty());
}

TEST_CASE("timetable column and checks") {
    Timetable t;
    t.route_id = "425";
    t.published_stops = {1, 4};
    t.rows = {TimetableRow{{{1, 21600}, {4, 22200}}}, TimetableRow{{{1, 23400}, {4, 24100}}}};
    CHECK(t.column(1) == std::vector<int>{21600, 23400});
    CHECK_NOTHROW(t.check(1800.0));
    CHECK_THROWS_AS(t.check(1801.0), ValidationError);

    t.rows[0].scheduled[4] = 21600; // equal to the start, not strictly increasing
    CHECK_THROWS_AS(t.check(), ValidationError);
}
