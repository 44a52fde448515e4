#include "transit/waiting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <set>

#include "transit/timetable.hpp"
#include "transit/util.hpp"

namespace transit {

namespace {

// consecutive headways in whole minutes, rounded half-up
std::vector<long> headway_minutes(std::span<const double> sorted_arrivals) {
    std::vector<long> out;
    for (std::size_t i = 1; i < sorted_arrivals.size(); ++i) {
        double dt = sorted_arrivals[i] - sorted_arrivals[i - 1];
        out.push_back(static_cast<long>(std::floor(dt / 60.0 + 0.5)));
    }
    return out;
}

double headway_wait_min(long n0) { return (static_cast<double>(n0) + 1.0) / 2.0; }

struct Accum {
    double pre_sum = 0.0;
    long pre_n0_sum = 0;
    long pre_n0_sq_sum = 0;
    int n_pre = 0;
    double post_sum = 0.0;
    int n_post = 0;
    int n_skipped = 0;

    void add_headway(long n0) {
        pre_sum += headway_wait_min(n0);
        pre_n0_sum += n0;
        pre_n0_sq_sum += n0 * n0;
        ++n_pre;
    }
    void add_wait(std::optional<double> w) {
        if (w) {
            post_sum += *w / 60.0;
            ++n_post;
        } else {
            ++n_skipped;
        }
    }
    WaitStats finish() const {
        WaitStats s;
        s.n_pre = n_pre;
        s.n_post = n_post;
        s.n_skipped = n_skipped;
        if (n_pre > 0) {
            s.pre_wt_min = pre_sum / n_pre;
            s.pre_wt_biased_min = pre_n0_sum > 0
                ? static_cast<double>(pre_n0_sq_sum) / (2.0 * static_cast<double>(pre_n0_sum))
                : 0.5;
        }
        if (n_post > 0) s.post_wt_min = post_sum / n_post;
        return s;
    }
};

} // namespace

std::optional<double> pre_timetable_wait(std::span<const double> day_arrivals) {
    if (day_arrivals.size() < 2) return std::nullopt;
    auto headways = headway_minutes(day_arrivals);
    double sum = 0.0;
    for (long n0 : headways) sum += headway_wait_min(n0);
    return sum / static_cast<double>(headways.size());
}

std::optional<double> pre_timetable_wait_biased(std::span<const double> day_arrivals) {
    if (day_arrivals.size() < 2) return std::nullopt;
    auto headways = headway_minutes(day_arrivals);
    long sum = 0, sq = 0;
    for (long n0 : headways) {
        sum += n0;
        sq += n0 * n0;
    }
    if (sum == 0) return 0.5;
    return static_cast<double>(sq) / (2.0 * static_cast<double>(sum));
}

std::optional<double> wait_past_schedule(double t, std::span<const int> scheduled) {
    auto it = std::lower_bound(scheduled.begin(), scheduled.end(), t);
    if (it == scheduled.begin()) return std::nullopt; // precedes every scheduled time
    return t - static_cast<double>(*(it - 1));
}

std::optional<double> timetable_wait(double t, std::span<const int> scheduled) {
    auto it = std::lower_bound(scheduled.begin(), scheduled.end(), t);
    if (it != scheduled.end() && static_cast<double>(*it) == t) return 0.0; // on time
    if (it == scheduled.begin()) return std::nullopt;
    return t - static_cast<double>(*(it - 1));
}

EvalReport evaluate(const Timetable& timetable, const ArrivalMatrix& test, int slot_minutes) {
    EvalReport report;
    report.route_id = test.route_id;
    report.direction = test.direction;
    report.slot_minutes = slot_minutes;

    std::vector<int> stops;
    for (int seq : test.stop_seqs)
        if (std::find(timetable.published_stops.begin(), timetable.published_stops.end(), seq) !=
            timetable.published_stops.end())
            stops.push_back(seq);
    if (stops.empty())
        throw ValidationError("timetable and test data share no published stops");

    for (int seq : stops) {
        const std::vector<int> schedule = timetable.column(seq);
        Accum stop_acc;
        std::map<int, Accum> slot_acc;

        for (int k = 0; k < test.day_count(); ++k) {
            std::vector<double> arrivals;
            for (int i = 0; i < test.trips_on(k); ++i)
                if (auto t = test.arrival(k, i, seq)) arrivals.push_back(*t);
            std::sort(arrivals.begin(), arrivals.end());

            for (std::size_t i = 1; i < arrivals.size(); ++i) {
                double dt = arrivals[i] - arrivals[i - 1];
                long n0 = static_cast<long>(std::floor(dt / 60.0 + 0.5));
                stop_acc.add_headway(n0);
                slot_acc[slot_of(arrivals[i - 1], slot_minutes)].add_headway(n0);
            }
            for (double t : arrivals) {
                auto w = timetable_wait(t, schedule);
                stop_acc.add_wait(w);
                slot_acc[slot_of(t, slot_minutes)].add_wait(w);
            }
        }

        report.per_stop.emplace(seq, stop_acc.finish());
        for (const auto& [slot, acc] : slot_acc)
            report.per_slot_stop.emplace(std::make_pair(slot, seq), acc.finish());
    }
    return report;
}

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::FirstNode: return "A";
        case Protocol::AlternateDays: return "B";
        case Protocol::InterMonth: return "C";
    }
    return "?";
}

std::optional<Protocol> parse_protocol(std::string_view s) {
    if (s == "A" || s == "a") return Protocol::FirstNode;
    if (s == "B" || s == "b") return Protocol::AlternateDays;
    if (s == "C" || s == "c") return Protocol::InterMonth;
    return std::nullopt;
}

ProtocolSplit make_split(const ArrivalMatrix& m, Protocol p) {
    ProtocolSplit split;
    split.protocol = p;

    std::set<int> months;
    for (const Date& d : m.days) months.insert(d.month_key());

    if (p == Protocol::AlternateDays) {
        std::vector<Date> odd, even;
        for (const Date& d : m.days) (d.day % 2 == 1 ? odd : even).push_back(d);
        split.train = m.filter_days(odd);
        split.test = m.filter_days(even);
        return split;
    }

    if (months.size() < 2)
        throw ValidationError("protocol " + to_string(p) +
                              " needs data spanning two calendar months");
    auto it = months.begin();
    const int first_month = *it;
    const int second_month = *std::next(it);
    std::vector<Date> train_days, test_days;
    for (const Date& d : m.days) {
        if (d.month_key() == first_month) train_days.push_back(d);
        else if (d.month_key() == second_month) test_days.push_back(d);
    }
    split.train = m.filter_days(train_days);
    split.test = m.filter_days(test_days);

    if (p == Protocol::FirstNode && !m.stop_seqs.empty()) {
        const int first_seq = m.stop_seqs.front();
        split.only_stop = first_seq;
        split.train = split.train.filter_stops({first_seq});
        split.test = split.test.filter_stops({first_seq});
    }
    return split;
}

std::vector<ProtocolSplit> split_protocols(const ArrivalMatrix& m) {
    std::set<int> months;
    for (const Date& d : m.days) months.insert(d.month_key());

    std::vector<ProtocolSplit> out;
    if (months.size() >= 2) out.push_back(make_split(m, Protocol::FirstNode));
    out.push_back(make_split(m, Protocol::AlternateDays));
    if (months.size() >= 2) out.push_back(make_split(m, Protocol::InterMonth));
    return out;
}

namespace {

std::string opt_min(const std::optional<double>& v) {
    return v ? format_fixed(*v, 4) : std::string();
}

void report_row(std::ostream& out, const std::string& protocol, int seq, int slot,
                const WaitStats& s) {
    out << protocol << ',' << seq << ',' << slot << ',' << opt_min(s.pre_wt_min) << ','
        << opt_min(s.post_wt_min) << ',' << s.n_pre << ',' << s.n_post << ',' << s.n_skipped
        << "\n";
}

} // namespace

void write_report_csv(const std::string& protocol, const EvalReport& report, std::ostream& out) {
    out << "protocol,stop_seq,slot,pre_wt_min,post_wt_min,n_pre,n_post,n_skipped\n";
    for (const auto& [seq, s] : report.per_stop) report_row(out, protocol, seq, -1, s);
    for (const auto& [key, s] : report.per_slot_stop) report_row(out, protocol, key.second, key.first, s);
}

void write_plotdata_csv(const std::string& protocol, const EvalReport& report, std::ostream& out) {
    out << "protocol,figure,x,pre_wt_min,post_wt_min\n";
    for (const auto& [seq, s] : report.per_stop)
        out << protocol << ",per_stop," << seq << ',' << opt_min(s.pre_wt_min) << ','
            << opt_min(s.post_wt_min) << "\n";

    // slot view pooled across stops, weighted by sample counts
    std::map<int, std::array<double, 4>> slots; // pre_sum, n_pre, post_sum, n_post
    for (const auto& [key, s] : report.per_slot_stop) {
        auto& a = slots[key.first];
        if (s.pre_wt_min) {
            a[0] += *s.pre_wt_min * s.n_pre;
            a[1] += s.n_pre;
        }
        if (s.post_wt_min) {
            a[2] += *s.post_wt_min * s.n_post;
            a[3] += s.n_post;
        }
    }
    for (const auto& [slot, a] : slots) {
        std::string pre = a[1] > 0 ? format_fixed(a[0] / a[1], 4) : std::string();
        std::string post = a[3] > 0 ? format_fixed(a[2] / a[3], 4) : std::string();
        out << protocol << ",per_slot," << slot << ',' << pre << ',' << post << "\n";
    }
}

void write_diagnostics_csv(const std::string& protocol, const EvalReport& report,
                           const Timetable& timetable, std::ostream& out) {
    std::vector<int> starts;
    for (const auto& row : timetable.rows) starts.push_back(Timetable::start_of(row));
    std::sort(starts.begin(), starts.end());
    long min_gap = -1;
    for (std::size_t i = 1; i < starts.size(); ++i) {
        long gap = starts[i] - starts[i - 1];
        if (min_gap < 0 || gap < min_gap) min_gap = gap;
    }

    out << "protocol,stop_seq,pre_wt_biased_min,min_start_gap_s\n";
    for (const auto& [seq, s] : report.per_stop)
        out << protocol << ',' << seq << ',' << opt_min(s.pre_wt_biased_min) << ',' << min_gap
            << "\n";
}

} // namespace transit
