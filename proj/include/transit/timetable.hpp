#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "transit/clustering.hpp"
#include "transit/types.hpp"

namespace transit {

/// Travel-offset statistics for one (time slot, stop) cell.
struct SlotStats {
    int slot = 0;      // slot index within the day
    int stop_seq = 0;
    double mean_offset = 0.0; // seconds from the scheduled start
    int n = 0;
    double variance = 0.0; // population variance of the offsets, s^2
};

/// Index of the half-open slot [slot*60*slot_minutes, ...) containing t.
int slot_of(double sec_of_day, int slot_minutes);

struct TimetableBuild {
    Timetable timetable;
    std::vector<SlotStats> slots;
    std::vector<std::string> warnings;
};

/// Builds the timetable: one row per start cluster, start = centroid,
/// downstream stops = start + mean offset of the trips whose cluster
/// centroid falls in the same time slot. Falls back to the all-day mean
/// offset for slots with no samples at a stop; omits the stop from the
/// row (with a warning) when no samples exist at all or monotonicity
/// would break. Scheduled times are rounded to whole seconds.
TimetableBuild build_timetable(const ArrivalMatrix& training,
                               const ClusterState& starts,
                               int slot_minutes = 15);

/// Debug dump, header: slot,stop_seq,mean_offset,n,variance
void write_slots_csv(const std::vector<SlotStats>& slots, std::ostream& out);

} // namespace transit
