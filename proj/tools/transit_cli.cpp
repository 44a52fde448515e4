#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "transit/clustering.hpp"
#include "transit/ingest.hpp"
#include "transit/simulator.hpp"
#include "transit/snap.hpp"
#include "transit/timetable.hpp"
#include "transit/types.hpp"
#include "transit/util.hpp"
#include "transit/waiting.hpp"

namespace fs = std::filesystem;
using namespace transit;

namespace {

struct Options {
    std::string stops_path;
    std::string trace_path;
    std::string out_dir = ".";
    std::string route_id = "R1";
    std::string direction = "up";
    std::string protocol = "C";
    std::uint64_t seed = 1;

    // snapping / matrix
    double radius_m = 50.0;
    int min_trip_stops = 3;
    double trip_gap_s = 1800.0;
    int sample_every = 3;

    // clustering / timetable
    double t1 = 900.0;
    int t2 = 10;
    std::string t1_grid; // comma-separated candidates; enables grid search
    int slot_minutes = 15;
    bool dump_events = false;
    bool dump_clusters = false;
    bool dump_slots = false;

    // simulator
    int sim_stops = 8;
    double sim_spacing_m = 500.0;
    double sim_leg_s = 300.0;
    int sim_days = 61;
    std::string sim_start_date = "2018-10-01";
    std::string sim_first_start = "06:00:00";
    double sim_headway_s = 1800.0;
    int sim_trips = 16;
    double sigma_start_s = 0.0;
    double sigma_travel_s = 0.0;
    double sigma_growth_s_per_h = 0.0;
    double gps_noise_m = 0.0;
    double sample_period_s = 10.0;
};

Direction direction_of(const Options& opt) {
    auto d = parse_direction(opt.direction);
    if (!d) throw ValidationError("bad direction \"" + opt.direction + "\" (use up or down)");
    return *d;
}

Protocol protocol_of(const Options& opt) {
    auto p = parse_protocol(opt.protocol);
    if (!p) throw ValidationError("bad protocol \"" + opt.protocol + "\" (use A, B or C)");
    return *p;
}

SnapConfig snap_config(const Options& opt) {
    SnapConfig cfg;
    cfg.radius_m = opt.radius_m;
    cfg.min_trip_stops = opt.min_trip_stops;
    cfg.trip_gap_s = opt.trip_gap_s;
    return cfg;
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    if (csv.empty()) return out;
    for (const auto& field : split_csv(csv)) {
        if (field.empty()) continue;
        try {
            out.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw ValidationError("bad t1 grid value \"" + field + "\"");
        }
    }
    return out;
}

SimConfig sim_config(const Options& opt) {
    SimConfig cfg;
    cfg.route_id = opt.route_id;
    cfg.direction = direction_of(opt);
    if (opt.sim_stops < 2) throw ValidationError("need at least 2 simulated stops");
    cfg.stops = make_line_route(opt.route_id, cfg.direction, opt.sim_stops, opt.sim_spacing_m);
    cfg.leg_travel_s.assign(static_cast<std::size_t>(opt.sim_stops) - 1, opt.sim_leg_s);
    int first = parse_hms(opt.sim_first_start);
    if (first < 0) throw ValidationError("bad sim first start \"" + opt.sim_first_start + "\"");
    cfg.true_starts = make_starts(first, opt.sim_headway_s, opt.sim_trips);
    cfg.days = opt.sim_days;
    auto date = Date::parse(opt.sim_start_date);
    if (!date) throw ValidationError("bad sim start date \"" + opt.sim_start_date + "\"");
    cfg.start_date = *date;
    cfg.sigma_start_s = opt.sigma_start_s;
    cfg.sigma_travel_base_s = opt.sigma_travel_s;
    cfg.sigma_growth_s_per_h = opt.sigma_growth_s_per_h;
    cfg.gps_noise_m = opt.gps_noise_m;
    cfg.sample_period_s = opt.sample_period_s;
    cfg.seed = opt.seed;
    return cfg;
}

fs::path ensure_out_dir(const Options& opt) {
    fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + dir.string());
    return dir;
}

void save_to(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    writer(out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct PipelineResult {
    ArrivalMatrix matrix;
    std::vector<std::string> warnings;
};

PipelineResult load_matrix(const Options& opt) {
    auto stops = load_stops(opt.stops_path);
    auto points = load_trace(opt.trace_path);
    PipelineResult r;
    r.matrix = extract_matrix(points, stops, opt.route_id, direction_of(opt), snap_config(opt),
                              opt.sample_every, &r.warnings);
    return r;
}

struct TrainedTimetable {
    double t1 = 0.0;
    ClusterState clusters;
    TimetableBuild build;
};

TrainedTimetable train_timetable(const Options& opt, const ArrivalMatrix& train) {
    auto starts = collect_starts(train);
    if (starts.empty()) throw EmptyResultError("no viable trips");

    TrainedTimetable out;
    auto grid = parse_grid(opt.t1_grid);
    if (grid.size() > 1) {
        // in-sample selection: validation is the training first-stop slice
        auto validation = train.filter_stops({train.stop_seqs.front()});
        auto result = grid_search_t1(starts, grid, validation, opt.t2);
        out.t1 = result.t1;
        out.clusters = std::move(result.state);
    } else {
        ClusterConfig cfg;
        cfg.t1 = grid.size() == 1 ? grid[0] : opt.t1;
        cfg.t2 = opt.t2;
        out.t1 = cfg.t1;
        out.clusters = cluster_starts(starts, cfg);
        if (out.clusters.empty())
            throw EmptyResultError("no start clusters above support threshold");
    }
    out.build = build_timetable(train, out.clusters, opt.slot_minutes);
    return out;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// flat key=value lines; '#' starts a comment
std::vector<std::pair<std::string, std::string>> load_config_file(const std::string& path) {
    if (!fs::exists(path)) throw MissingFileError("no such file: " + path);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t");
        line = line.substr(first, last - first + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ParseError(line_no, "config line is not key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        auto vfirst = value.find_first_not_of(" \t");
        value = vfirst == std::string::npos ? std::string() : value.substr(vfirst);
        entries.emplace_back(std::move(key), std::move(value));
    }
    return entries;
}

// injects config values as options right after the subcommand token, so
// anything the user typed later takes precedence
void merge_config(std::vector<std::string>& args, CLI::App& app) {
    std::string config_path;
    std::size_t sub_pos = std::string::npos;
    CLI::App* sub = nullptr;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else if (sub_pos == std::string::npos && !args[i].empty() && args[i][0] != '-') {
            auto* match = app.get_subcommand_no_throw(args[i]);
            if (match != nullptr) {
                sub_pos = i;
                sub = match;
            }
        }
    }
    if (config_path.empty() || sub == nullptr) return;

    std::vector<std::string> injected;
    for (const auto& [key, value] : load_config_file(config_path)) {
        if (key == "config") continue;
        if (sub->get_option_no_throw("--" + key) == nullptr) {
            std::cerr << "warning: config key \"" << key << "\" does not apply to "
                      << sub->get_name() << "\n";
            continue;
        }
        injected.push_back("--" + key + "=" + value);
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, injected.begin(),
                injected.end());
}

int cmd_ingest(const Options& opt) {
    auto stops = load_stops(opt.stops_path);
    auto points = load_trace(opt.trace_path);
    auto summary = validate_dataset(stops, points);
    auto manifest = make_manifest(fs::path(opt.trace_path).stem().string(), points);

    std::cout << "dataset " << manifest.name << ": " << manifest.point_count << " points";
    if (manifest.point_count > 0)
        std::cout << ", " << manifest.first_date.str() << " .. " << manifest.last_date.str();
    std::cout << "\n";
    std::cout << "routes:";
    for (const auto& r : manifest.routes) std::cout << ' ' << r;
    std::cout << "\n";
    for (const auto& [key, count] : summary.points_per_route_day)
        std::cout << "  " << key.first << ' ' << key.second.str() << ": " << count << " points\n";
    for (const auto& [route, gaps] : summary.gap_flags)
        std::cout << "  " << route << ": " << gaps << " sampling gaps over 10x the nominal period\n";
    for (const auto& v : summary.seq_violations) std::cout << "  " << v << "\n";
    return 0;
}

int cmd_timetable(const Options& opt) {
    auto dir = ensure_out_dir(opt);
    auto r = load_matrix(opt);
    print_warnings(r.warnings);
    if (r.matrix.day_count() == 0) throw EmptyResultError("no viable trips");

    auto trained = train_timetable(opt, r.matrix);
    print_warnings(trained.build.warnings);
    save_timetable(trained.build.timetable, (dir / "timetable.csv").string());

    if (opt.dump_events) {
        auto stops = load_stops(opt.stops_path);
        auto points = load_trace(opt.trace_path);
        auto events =
            collect_events(points, stops, opt.route_id, direction_of(opt), snap_config(opt));
        save_to(dir / "events.csv", [&](std::ostream& o) { write_events_csv(events, o); });
    }
    if (opt.dump_clusters)
        save_to(dir / "clusters.csv",
                [&](std::ostream& o) { write_clusters_csv(trained.t1, trained.clusters, o); });
    if (opt.dump_slots)
        save_to(dir / "slots.csv",
                [&](std::ostream& o) { write_slots_csv(trained.build.slots, o); });

    std::cout << "timetable: " << trained.build.timetable.rows.size() << " trips over "
              << trained.build.timetable.published_stops.size() << " published stops (T1="
              << format_fixed(trained.t1, 0) << "s, trained on " << r.matrix.day_count()
              << " days)\n";
    return 0;
}

int run_evaluation(const Options& opt, const ArrivalMatrix& matrix, const fs::path& dir) {
    auto split = make_split(matrix, protocol_of(opt));
    if (split.train.day_count() == 0 || split.test.day_count() == 0)
        throw EmptyResultError("no viable trips");

    auto trained = train_timetable(opt, split.train);
    print_warnings(trained.build.warnings);
    auto report = evaluate(trained.build.timetable, split.test, opt.slot_minutes);

    const std::string name = to_string(split.protocol);
    save_timetable(trained.build.timetable, (dir / "timetable.csv").string());
    save_to(dir / "report.csv", [&](std::ostream& o) { write_report_csv(name, report, o); });
    save_to(dir / "plotdata.csv", [&](std::ostream& o) { write_plotdata_csv(name, report, o); });
    save_to(dir / "diagnostics.csv", [&](std::ostream& o) {
        write_diagnostics_csv(name, report, trained.build.timetable, o);
    });

    std::cout << "protocol " << name << ": trained " << split.train.day_count()
              << " days, tested " << split.test.day_count() << " days\n";
    for (const auto& [seq, s] : report.per_stop) {
        std::cout << "  stop " << seq;
        if (s.pre_wt_min) std::cout << ": pre " << format_fixed(*s.pre_wt_min, 2) << " min";
        if (s.post_wt_min) std::cout << ", post " << format_fixed(*s.post_wt_min, 2) << " min";
        std::cout << " (" << s.n_post << " arrivals, " << s.n_skipped << " skipped)\n";
    }
    return 0;
}

int cmd_evaluate(const Options& opt) {
    auto dir = ensure_out_dir(opt);
    auto r = load_matrix(opt);
    print_warnings(r.warnings);
    if (r.matrix.day_count() == 0) throw EmptyResultError("no viable trips");
    return run_evaluation(opt, r.matrix, dir);
}

int cmd_simulate(const Options& opt) {
    auto dir = ensure_out_dir(opt);
    auto out = simulate(sim_config(opt));
    print_warnings(out.warnings);
    save_stops(out.stops, (dir / "stops.csv").string());
    save_trace(out.trace, (dir / "trace.csv").string());
    save_timetable(out.truth, (dir / "truth_timetable.csv").string());
    std::cout << "simulated " << out.trace.size() << " points over "
              << out.truth_arrivals.day_count() << " days (" << out.truth.rows.size()
              << " scheduled trips/day)\n";
    return 0;
}

int cmd_all(Options opt) {
    int rc = cmd_simulate(opt);
    if (rc != 0) return rc;
    auto dir = ensure_out_dir(opt);
    opt.stops_path = (dir / "stops.csv").string();
    opt.trace_path = (dir / "trace.csv").string();
    auto r = load_matrix(opt);
    print_warnings(r.warnings);
    if (r.matrix.day_count() == 0) throw EmptyResultError("no viable trips");
    return run_evaluation(opt, r.matrix, dir);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bus GPS traces to timetables, with waiting-time evaluation"};
    app.require_subcommand(1);

    Options opt;
    std::string config_path;
    app.add_option("--config", config_path, "flat key=value config file; flags win");
    auto add_common = [&](CLI::App* cmd) {
        cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        cmd->add_option("--config", config_path, "flat key=value config file; flags win");
        cmd->add_option("--out", opt.out_dir, "output directory");
        cmd->add_option("--route", opt.route_id, "route identifier");
        cmd->add_option("--direction", opt.direction, "up or down");
        cmd->add_option("--seed", opt.seed, "random seed");
    };
    auto add_inputs = [&](CLI::App* cmd) {
        cmd->add_option("--stops", opt.stops_path, "stops.csv path")->required();
        cmd->add_option("--trace", opt.trace_path, "trace.csv path")->required();
    };
    auto add_pipeline = [&](CLI::App* cmd) {
        cmd->add_option("--radius-m", opt.radius_m, "stop snap radius, meters");
        cmd->add_option("--min-trip-stops", opt.min_trip_stops, "minimum distinct stops per trip");
        cmd->add_option("--trip-gap-s", opt.trip_gap_s, "silence that starts a new trip, seconds");
        cmd->add_option("--sample-every", opt.sample_every,
                        "publish every k-th stop (and the terminus)");
        cmd->add_option("--t1", opt.t1, "minimum start separation, seconds");
        cmd->add_option("--t2", opt.t2, "minimum supporting trips per start");
        cmd->add_option("--t1-grid", opt.t1_grid, "comma-separated T1 candidates; grid-searched");
        cmd->add_option("--slot-minutes", opt.slot_minutes, "travel-time slot width, minutes");
    };
    auto add_sim = [&](CLI::App* cmd) {
        cmd->add_option("--sim-stops", opt.sim_stops, "stops on the synthetic route");
        cmd->add_option("--sim-spacing-m", opt.sim_spacing_m, "stop spacing, meters");
        cmd->add_option("--sim-leg-s", opt.sim_leg_s, "nominal travel per leg, seconds");
        cmd->add_option("--sim-days", opt.sim_days, "days to simulate");
        cmd->add_option("--sim-start-date", opt.sim_start_date, "first simulated day (YYYY-MM-DD)");
        cmd->add_option("--sim-first-start", opt.sim_first_start, "first departure (hh:mm:ss)");
        cmd->add_option("--sim-headway-s", opt.sim_headway_s, "scheduled headway, seconds");
        cmd->add_option("--sim-trips", opt.sim_trips, "scheduled trips per day");
        cmd->add_option("--sigma-start-s", opt.sigma_start_s, "start jitter std dev, seconds");
        cmd->add_option("--sigma-travel-s", opt.sigma_travel_s,
                        "per-leg travel jitter std dev, seconds");
        cmd->add_option("--sigma-growth-s-per-h", opt.sigma_growth_s_per_h,
                        "travel jitter added per hour of service");
        cmd->add_option("--gps-noise-m", opt.gps_noise_m, "positional noise std dev, meters");
        cmd->add_option("--sample-period-s", opt.sample_period_s, "fix emission period, seconds");
    };

    auto* ingest = app.add_subcommand("ingest", "validate and summarize a dataset");
    add_inputs(ingest);
    add_common(ingest);

    auto* timetable = app.add_subcommand("timetable", "build a timetable from a trace");
    add_inputs(timetable);
    add_common(timetable);
    add_pipeline(timetable);
    timetable->add_flag("--dump-events", opt.dump_events, "also write events.csv");
    timetable->add_flag("--dump-clusters", opt.dump_clusters, "also write clusters.csv");
    timetable->add_flag("--dump-slots", opt.dump_slots, "also write slots.csv");

    auto* evaluate = app.add_subcommand("evaluate", "train on a protocol split and report waits");
    add_inputs(evaluate);
    add_common(evaluate);
    add_pipeline(evaluate);
    evaluate->add_option("--protocol", opt.protocol,
                         "A (first node), B (alternate days), C (inter-month)");

    auto* simulate = app.add_subcommand("simulate", "write a synthetic dataset with ground truth");
    add_common(simulate);
    add_sim(simulate);

    auto* all = app.add_subcommand("all", "simulate, then build and evaluate on the synthetic data");
    add_common(all);
    add_pipeline(all);
    add_sim(all);
    all->add_option("--protocol", opt.protocol, "evaluation protocol (A, B or C)");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        merge_config(args, app);
        std::reverse(args.begin(), args.end()); // CLI11 consumes args back to front
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const MissingFileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    try {
        if (app.got_subcommand(ingest)) return cmd_ingest(opt);
        if (app.got_subcommand(timetable)) return cmd_timetable(opt);
        if (app.got_subcommand(evaluate)) return cmd_evaluate(opt);
        if (app.got_subcommand(simulate)) return cmd_simulate(opt);
        if (app.got_subcommand(all)) return cmd_all(opt);
    } catch (const MissingFileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const EmptyResultError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
