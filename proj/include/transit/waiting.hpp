#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "transit/types.hpp"

namespace transit {

/// Expected wait in minutes for a passenger arriving uniformly at random,
/// from one day's sorted arrivals at one stop: each consecutive headway
/// of N whole minutes (rounded half-up) contributes (N+1)/2, averaged
/// unweighted. Needs at least 2 arrivals, else nullopt.
std::optional<double> pre_timetable_wait(std::span<const double> day_arrivals);

/// Length-biased variant E[N^2] / (2 E[N]) over the same whole-minute
/// headways; reported as a diagnostic only.
std::optional<double> pre_timetable_wait_biased(std::span<const double> day_arrivals);

/// Seconds from the latest scheduled time strictly before t to t.
/// nullopt ("skipped") when no scheduled time precedes t.
std::optional<double> wait_past_schedule(double t, std::span<const int> scheduled);

/// Evaluation-side wait: an arrival exactly on a scheduled time scores 0;
/// otherwise identical to wait_past_schedule.
std::optional<double> timetable_wait(double t, std::span<const int> scheduled);

struct WaitStats {
    std::optional<double> pre_wt_min;
    std::optional<double> post_wt_min;
    std::optional<double> pre_wt_biased_min;
    int n_pre = 0;     // headway samples
    int n_post = 0;    // non-skipped arrivals
    int n_skipped = 0; // arrivals preceding every scheduled time
};

struct EvalReport {
    std::string route_id;
    Direction direction = Direction::Up;
    int slot_minutes = 15;
    std::map<int, WaitStats> per_stop;                       // stop seq ->
    std::map<std::pair<int, int>, WaitStats> per_slot_stop;  // (slot, seq) ->
};

/// Pre- and post-timetable waiting per published stop (and per time slot)
/// over the test matrix. Pre pools Eq-of-headway waits across days; post
/// averages timetable_wait over all non-skipped arrivals. Minutes.
EvalReport evaluate(const Timetable& timetable, const ArrivalMatrix& test, int slot_minutes = 15);

enum class Protocol {
    FirstNode,     // A: train month 1, test month 2, stop 1 only
    AlternateDays, // B: train odd days-of-month, test even days
    InterMonth,    // C: train month 1, test month 2, all stops
};

std::string to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view s); // "A"/"B"/"C"

struct ProtocolSplit {
    Protocol protocol = Protocol::InterMonth;
    ArrivalMatrix train;
    ArrivalMatrix test;
    std::optional<int> only_stop; // set for FirstNode
};

/// Splits the matrix for one protocol. Month-based protocols require the
/// matrix to span at least two calendar months (ValidationError).
ProtocolSplit make_split(const ArrivalMatrix& m, Protocol p);

/// All protocols applicable to the matrix's date span.
std::vector<ProtocolSplit> split_protocols(const ArrivalMatrix& m);

// report.csv: protocol,stop_seq,slot,pre_wt_min,post_wt_min,n_pre,n_post,n_skipped
// (slot -1 = whole day). plotdata.csv holds per-stop and per-slot bar pairs.
// diagnostics.csv carries the length-biased pre-wait and schedule gap stats.
void write_report_csv(const std::string& protocol, const EvalReport& report, std::ostream& out);
void write_plotdata_csv(const std::string& protocol, const EvalReport& report, std::ostream& out);
void write_diagnostics_csv(const std::string& protocol, const EvalReport& report,
                           const Timetable& timetable, std::ostream& out);

} // namespace transit
