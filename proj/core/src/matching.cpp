#include "mcprox/matching.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "mcprox/error.hpp"
#include "mcprox/fingerprint.hpp"
#include "mcprox/signal_model.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

namespace {

struct ProbeIndex {
    std::vector<std::int64_t> times;
    std::vector<const SignalRecord*> records;

    explicit ProbeIndex(std::span<const SignalRecord> probes) {
        for (const auto& p : probes) records.push_back(&p);
        std::stable_sort(records.begin(), records.end(),
                         [](auto* a, auto* b) { return a->timestamp_us < b->timestamp_us; });
        for (auto* p : records) times.push_back(p->timestamp_us);
    }

    const SignalRecord* nearest(std::int64_t t, std::int64_t window_us) const {
        const auto it = std::lower_bound(times.begin(), times.end(), t);
        const SignalRecord* best = nullptr;
        std::int64_t best_gap = 0;
        if (it != times.begin()) {
            const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
            // Earliest of the equal timestamps at k.
            auto first = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), times[k]) -
                                                  times.begin());
            best = records[first];
            best_gap = t - times[k];
        }
        if (it != times.end()) {
            const auto gap = *it - t;
            if (!best || gap < best_gap) {
                best = records[static_cast<std::size_t>(it - times.begin())];
                best_gap = gap;
            }
        }
        return best && best_gap <= window_us ? best : nullptr;
    }
};

}  // namespace

MatchResult match_signals(std::span<const SignalRecord> ble, std::span<const SignalRecord> wifi24,
                          std::span<const SignalRecord> wifi5, const MatchContext& context,
                          const MatchOptions& options) {
    const ProbeIndex index24(wifi24);
    const ProbeIndex index5(wifi5);
    const auto window_us = static_cast<std::int64_t>(std::llround(options.window_s * 1e6));
    std::optional<DistanceClass> label;
    if (context.distance_cm) label = distance_to_class(*context.distance_cm);

    MatchResult result;
    for (const auto& b : ble) {
        ++result.stats.ble_rows;
        const auto* p24 = index24.nearest(b.timestamp_us, window_us);
        if (!p24) {
            ++result.stats.dropped_missing_24;
            continue;
        }
        const auto* p5 = index5.nearest(b.timestamp_us, window_us);
        if (!p5) {
            ++result.stats.dropped_missing_5;
            continue;
        }
        MatchedSample s;
        s.run_id = context.run_id;
        s.device = context.device;
        s.environment = context.environment;
        s.distance_cm = context.distance_cm;
        s.label = label;
        s.t_us = b.timestamp_us;
        s.ble_rssi = b.rssi_dbm;
        s.wifi24_rssi = p24->rssi_dbm;
        s.wifi24_freq = p24->frequency_mhz.value_or(0);
        s.wifi5_rssi = p5->rssi_dbm;
        s.wifi5_freq = p5->frequency_mhz.value_or(0);
        result.samples.push_back(std::move(s));
        ++result.stats.matched;
    }
    return result;
}

std::size_t assign_trace_devices(std::vector<BleTrace>& traces, const std::vector<std::string>& run_devices,
                                 const std::map<std::string, std::string>& ble_address_to_device) {
    std::vector<bool> assigned(traces.size(), false);
    for (std::size_t t = 0; t < traces.size(); ++t) {
        for (const auto& seg : traces[t].segments) {
            auto it = ble_address_to_device.find(seg.address.to_string());
            if (it == ble_address_to_device.end()) continue;
            traces[t].device = it->second;
            assigned[t] = true;
            break;
        }
    }
    if (run_devices.size() == 1 &&
        std::none_of(traces.begin(), traces.end(), [&](const BleTrace& tr) { return tr.device == run_devices[0]; })) {
        std::size_t best = traces.size();
        for (std::size_t t = 0; t < traces.size(); ++t) {
            if (assigned[t]) continue;
            if (best == traces.size() || traces[t].record_count() > traces[best].record_count()) best = t;
        }
        if (best != traces.size()) {
            traces[best].device = run_devices[0];
            assigned[best] = true;
        }
    }
    return static_cast<std::size_t>(std::count(assigned.begin(), assigned.end(), false));
}

namespace {

std::map<std::string, std::vector<SignalRecord>> by_run(std::span<const SignalRecord> records) {
    std::map<std::string, std::vector<SignalRecord>> runs;
    for (const auto& r : records) runs[r.run_id].push_back(r);
    for (auto& [_, rs] : runs)
        std::stable_sort(rs.begin(), rs.end(),
                         [](const auto& a, const auto& b) { return a.timestamp_us < b.timestamp_us; });
    return runs;
}

}  // namespace

AssemblyResult assemble_matched(std::span<const SignalRecord> ble, std::span<const SignalRecord> wifi,
                                const RunMetadata& metadata, const AssemblyOptions& options) {
    auto ble_runs = by_run(ble);
    auto wifi_runs = by_run(wifi);
    std::vector<std::string> run_ids;
    for (const auto& [id, _] : ble_runs) run_ids.push_back(id);
    for (const auto& [id, _] : wifi_runs)
        if (!ble_runs.contains(id)) run_ids.push_back(id);
    std::sort(run_ids.begin(), run_ids.end());

    AssemblyResult result;
    for (const auto& run_id : run_ids) {
        const auto placements = metadata.run(run_id);
        if (placements.empty()) throw DataError("run " + run_id + " is not listed in the run metadata");
        const auto& run_ble = ble_runs[run_id];
        const auto& run_wifi = wifi_runs[run_id];

        RunReport report;
        report.run_id = run_id;
        report.ble_records = run_ble.size();
        report.wifi_records = run_wifi.size();

        auto traced = trace_address_rolls(run_ble, options.tracing);
        std::vector<std::string> devices;
        for (const auto* p : placements) devices.push_back(p->device);
        report.traces = traced.traces.size();
        report.links = traced.links;
        report.ambiguous_links = traced.ambiguous_links;
        report.unassigned_traces =
            assign_trace_devices(traced.traces, devices, options.ble_address_to_device);

        const auto grouping = group_wifi_by_device(run_wifi, options.fingerprint_to_device);
        report.unknown_probe_records = grouping.unknown.size();

        for (const auto* placement : placements) {
            std::vector<SignalRecord> device_ble;
            for (const auto& trace : traced.traces) {
                if (trace.device != placement->device) continue;
                for (const auto& seg : trace.segments)
                    for (auto i : seg.records) device_ble.push_back(run_ble[i]);
            }
            std::stable_sort(device_ble.begin(), device_ble.end(),
                             [](const auto& a, const auto& b) { return a.timestamp_us < b.timestamp_us; });
            std::vector<SignalRecord> w24, w5;
            if (auto it = grouping.by_device.find(placement->device); it != grouping.by_device.end()) {
                for (const auto& r : it->second) (r.kind == SignalKind::Wifi24 ? w24 : w5).push_back(r);
            }
            const MatchContext ctx{run_id, placement->device, placement->environment, placement->distance_cm};
            auto matched = match_signals(device_ble, w24, w5, ctx, options.matching);
            report.match.ble_rows += matched.stats.ble_rows;
            report.match.matched += matched.stats.matched;
            report.match.dropped_missing_24 += matched.stats.dropped_missing_24;
            report.match.dropped_missing_5 += matched.stats.dropped_missing_5;
            for (auto& s : matched.samples) result.samples.push_back(std::move(s));
        }
        result.runs.push_back(report);
    }
    return result;
}

void export_matched(std::ostream& out, std::span<const MatchedSample> samples) {
    out << kMatchedHeader << '\n';
    for (const auto& s : samples) {
        out << s.run_id << ',' << s.device << ',' << s.environment << ','
            << (s.distance_cm ? format_double(*s.distance_cm) : std::string()) << ','
            << (s.label ? std::string(to_string(*s.label)) : std::string()) << ',' << s.t_us << ',' << s.ble_rssi
            << ',' << s.wifi24_rssi << ',' << s.wifi24_freq << ',' << s.wifi5_rssi << ',' << s.wifi5_freq << '\n';
    }
}

void export_matched(const std::filesystem::path& path, std::span<const MatchedSample> samples) {
    auto out = open_output(path);
    export_matched(out, samples);
}

std::vector<MatchedSample> import_matched(std::istream& in, std::string_view source) {
    const auto table = CsvTable::read(in, source);
    std::size_t col[11];
    std::size_t k = 0;
    for (auto name : split_fields(kMatchedHeader)) col[k++] = table.require(name);

    std::vector<MatchedSample> samples;
    samples.reserve(table.rows());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& row = table.row(i);
        const auto where = std::string(source) + ":" + std::to_string(table.line_of(i)) + ": ";
        auto as_int = [&](std::size_t c) {
            const auto v = parse_int(row[col[c]]);
            if (!v) throw DataError(where + "bad integer \"" + row[col[c]] + "\"");
            return *v;
        };
        MatchedSample s;
        s.run_id = row[col[0]];
        s.device = row[col[1]];
        s.environment = row[col[2]];
        if (!row[col[3]].empty()) {
            const auto d = parse_double(row[col[3]]);
            if (!d || *d <= 0.0) throw DataError(where + "bad distance_cm");
            s.distance_cm = *d;
        }
        if (!row[col[4]].empty()) {
            s.label = parse_distance_class(row[col[4]]);
            if (!s.label) throw DataError(where + "bad label \"" + row[col[4]] + "\"");
        }
        if (s.distance_cm && s.label && distance_to_class(*s.distance_cm) != *s.label)
            throw DataError(where + "label disagrees with distance_cm");
        s.t_us = as_int(5);
        s.ble_rssi = static_cast<int>(as_int(6));
        s.wifi24_rssi = static_cast<int>(as_int(7));
        s.wifi24_freq = static_cast<int>(as_int(8));
        s.wifi5_rssi = static_cast<int>(as_int(9));
        s.wifi5_freq = static_cast<int>(as_int(10));
        if (band_of_frequency(s.wifi24_freq) != SignalKind::Wifi24 ||
            band_of_frequency(s.wifi5_freq) != SignalKind::Wifi5)
            throw DataError(where + "frequency outside its band");
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<MatchedSample> import_matched(const std::filesystem::path& path) {
    auto in = open_input(path);
    return import_matched(in, path.string());
}

}  // namespace mcprox
