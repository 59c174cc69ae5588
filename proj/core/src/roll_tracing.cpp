#include "mcprox/roll_tracing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "mcprox/error.hpp"

namespace mcprox {

std::size_t BleTrace::record_count() const {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.records.size();
    return n;
}

namespace {

std::vector<TraceSegment> build_segments(std::span<const SignalRecord> records) {
    std::map<MacAddress, std::size_t> slot;
    std::vector<TraceSegment> segments;
    std::vector<double> rssi_sum;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        auto [it, fresh] = slot.emplace(r.address, segments.size());
        if (fresh) {
            TraceSegment s;
            s.address = r.address;
            s.first_seen_us = r.timestamp_us;
            segments.push_back(std::move(s));
            rssi_sum.push_back(0.0);
        }
        auto& s = segments[it->second];
        s.last_seen_us = r.timestamp_us;
        s.records.push_back(i);
        rssi_sum[it->second] += r.rssi_dbm;
    }
    for (std::size_t k = 0; k < segments.size(); ++k)
        segments[k].mean_rssi_dbm = rssi_sum[k] / double(segments[k].records.size());
    // Insertion order is first-seen order; stable for equal first sightings.
    return segments;
}

struct Link {
    double rssi_gap;
    std::int64_t successor_first_seen;
    std::size_t ending;
    std::size_t successor;
};

}  // namespace

RollTraceResult trace_address_rolls(std::span<const SignalRecord> records, const RollTraceOptions& options) {
    RollTraceResult result;
    if (records.empty()) return result;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].run_id != records[0].run_id)
            throw DataError("roll tracing expects a single run, saw " + records[0].run_id + " and " +
                            records[i].run_id);
        if (i > 0 && records[i].timestamp_us < records[i - 1].timestamp_us)
            throw DataError("roll tracing expects records sorted by time");
    }

    auto segments = build_segments(records);
    const auto horizon_us = static_cast<std::int64_t>(
        std::llround(std::min(options.successor_horizon_s, options.filter_window_s) * 1e6));

    // Every (ending segment, candidate successor) pair.
    std::vector<Link> pairs;
    for (std::size_t e = 0; e < segments.size(); ++e) {
        const auto roll = segments[e].last_seen_us;
        for (std::size_t c = 0; c < segments.size(); ++c) {
            const auto first = segments[c].first_seen_us;
            if (first <= roll || first > roll + horizon_us) continue;
            pairs.push_back({std::abs(segments[e].mean_rssi_dbm - segments[c].mean_rssi_dbm), first, e, c});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Link& a, const Link& b) {
        return std::tie(a.rssi_gap, a.successor_first_seen, a.ending, a.successor) <
               std::tie(b.rssi_gap, b.successor_first_seen, b.ending, b.successor);
    });

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> next(segments.size(), kNone);
    std::vector<bool> has_prev(segments.size(), false);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        if (next[p.ending] != kNone || has_prev[p.successor]) continue;
        for (std::size_t j = i + 1; j < pairs.size() && pairs[j].rssi_gap == p.rssi_gap; ++j) {
            if (pairs[j].ending == p.ending && !has_prev[pairs[j].successor]) {
                ++result.ambiguous_links;
                break;
            }
        }
        next[p.ending] = p.successor;
        has_prev[p.successor] = true;
        ++result.links;
    }

    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (has_prev[s]) continue;
        BleTrace trace;
        trace.device = "trace-" + std::to_string(result.traces.size() + 1);
        for (auto k = s; k != kNone; k = next[k]) trace.segments.push_back(std::move(segments[k]));
        result.traces.push_back(std::move(trace));
    }
    return result;
}

}  // namespace mcprox
