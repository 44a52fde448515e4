#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "transit/ingest.hpp"
#include "transit/util.hpp"

namespace fs = std::filesystem;
using namespace transit;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(CLI_BIN) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("transit_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& name = "") const { return (path / name).string(); }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

constexpr const char* kSimArgs =
    " --route 425 --sim-stops 4 --sim-spacing-m 500 --sim-leg-s 240 --sim-days 10"
    " --sim-trips 4 --sim-headway-s 1800 --seed 3";

} // namespace

TEST_CASE("cli: simulate writes files that parse back through ingest") {
    TempDir dir("simulate");
    REQUIRE(run_cli("simulate --out " + dir.str() + kSimArgs) == 0);
    auto stops = load_stops(dir.str("stops.csv"));
    CHECK(stops.size() == 4);
    auto points = load_trace(dir.str("trace.csv"));
    CHECK(!points.empty());
    auto truth = load_timetable(dir.str("truth_timetable.csv"));
    CHECK(truth.rows.size() == 4);
}

TEST_CASE("cli: the noiseless self-test chain reports zero post wait") {
    TempDir dir("all_zero");
    REQUIRE(run_cli("all --protocol B --sample-every 1 --t1 900 --t2 4 --out " + dir.str() +
                    kSimArgs) == 0);

    std::ifstream report(dir.str("report.csv"));
    REQUIRE(report.good());
    std::string line;
    std::getline(report, line);
    CHECK(line == "protocol,stop_seq,slot,pre_wt_min,post_wt_min,n_pre,n_post,n_skipped");
    int rows = 0;
    while (std::getline(report, line)) {
        auto fields = split_csv(line);
        REQUIRE(fields.size() == 8);
        CHECK(fields[0] == "B");
        if (!fields[4].empty()) CHECK(std::stod(fields[4]) == 0.0);
        CHECK(fields[7] == "0");
        ++rows;
    }
    CHECK(rows > 0);

    auto tt = load_timetable(dir.str("timetable.csv"));
    CHECK(tt.rows.size() == 4);
}

TEST_CASE("cli: reruns with the same config are byte-identical") {
    TempDir a("rerun_a");
    TempDir b("rerun_b");
    std::string args = std::string("all --protocol B --sample-every 1 --t1 600 --t2 3 ") + kSimArgs +
                       " --sigma-start-s 120 --sigma-travel-s 30 --gps-noise-m 5";
    REQUIRE(run_cli(args + " --out " + a.str()) == 0);
    REQUIRE(run_cli(args + " --out " + b.str()) == 0);
    for (const char* name : {"stops.csv", "trace.csv", "truth_timetable.csv", "timetable.csv",
                             "report.csv", "plotdata.csv", "diagnostics.csv"}) {
        CAPTURE(name);
        std::string fa = read_file(a.path / name);
        REQUIRE(!fa.empty());
        CHECK(fa == read_file(b.path / name));
    }
}

TEST_CASE("cli: a missing input file exits with 2") {
    TempDir dir("missing");
    write_file(dir.path / "stops.csv", "route_id,direction,seq,lat,lon,name\n");
    CHECK(run_cli("ingest --stops " + dir.str("stops.csv") + " --trace " + dir.str("nope.csv")) == 2);
}

TEST_CASE("cli: an empty trace exits with 4") {
    TempDir dir("empty_trace");
    write_file(dir.path / "stops.csv",
               "route_id,direction,seq,lat,lon,name\n"
               "425,UP,1,28.600000,77.200000,A\n"
               "425,UP,2,28.610000,77.200000,B\n");
    write_file(dir.path / "trace.csv", "timestamp,route_id,bus_id,direction,lat,lon\n");
    CHECK(run_cli("timetable --route 425 --stops " + dir.str("stops.csv") + " --trace " +
                  dir.str("trace.csv") + " --out " + dir.str()) == 4);
}

TEST_CASE("cli: a month protocol on single-month data exits with 3") {
    TempDir dir("one_month");
    REQUIRE(run_cli("simulate --out " + dir.str() + kSimArgs) == 0);
    CHECK(run_cli("evaluate --protocol C --route 425 --sample-every 1 --t2 2 --stops " +
                  dir.str("stops.csv") + " --trace " + dir.str("trace.csv") + " --out " +
                  dir.str()) == 3);
}

TEST_CASE("cli: a malformed input exits with 3") {
    TempDir dir("bad_stops");
    write_file(dir.path / "stops.csv",
               "route_id,direction,seq,lat,lon,name\n"
               "425,UP,1,91.5,77.200000,A\n");
    write_file(dir.path / "trace.csv", "timestamp,route_id,bus_id,direction,lat,lon\n");
    CHECK(run_cli("ingest --stops " + dir.str("stops.csv") + " --trace " + dir.str("trace.csv")) == 3);
}

TEST_CASE("cli: flags override config file values") {
    TempDir dir("config");
    write_file(dir.path / "run.cfg", "sim-days=10\nsim-trips=3\nseed=3\nroute=534\n");
    REQUIRE(run_cli("simulate --config " + dir.str("run.cfg") + " --out " + dir.str() +
                    " --sim-stops 3 --sim-trips 2") == 0);
    auto truth = load_timetable(dir.str("truth_timetable.csv"));
    CHECK(truth.route_id == "534");    // from the config file
    CHECK(truth.rows.size() == 2);     // flag wins over sim-trips=3
    CHECK(load_stops(dir.str("stops.csv")).size() == 3);
}
