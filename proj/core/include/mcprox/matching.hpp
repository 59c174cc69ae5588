#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mcprox/ingest.hpp"
#include "mcprox/roll_tracing.hpp"
#include "mcprox/types.hpp"

namespace mcprox {

struct MatchOptions {
    double window_s = 5.0;
};

/// Labels copied onto every matched row.
struct MatchContext {
    std::string run_id;
    std::string device;
    std::string environment;
    std::optional<double> distance_cm;
};

struct MatchStats {
    std::size_t ble_rows = 0;
    std::size_t matched = 0;
    std::size_t dropped_missing_24 = 0;
    std::size_t dropped_missing_5 = 0;  // counted only when 2.4 GHz was found
};

struct MatchResult {
    std::vector<MatchedSample> samples;
    MatchStats stats;
};

/// Pairs every BLE record with the nearest-in-time 2.4 GHz and 5 GHz probe within
/// the window. Probes may be reused by several BLE rows; equidistant probes resolve
/// to the earlier one. Rows lacking either band are dropped and counted.
MatchResult match_signals(std::span<const SignalRecord> ble, std::span<const SignalRecord> wifi24,
                          std::span<const SignalRecord> wifi5, const MatchContext& context,
                          const MatchOptions& options = {});

/// Everything needed to turn raw logs of many runs into matched rows.
struct AssemblyOptions {
    RollTraceOptions tracing;
    MatchOptions matching;
    std::map<std::string, std::string> fingerprint_to_device;
    /// Known BLE addresses (upper-case "AA:BB:..") -> device.
    std::map<std::string, std::string> ble_address_to_device;
};

struct RunReport {
    std::string run_id;
    std::size_t ble_records = 0;
    std::size_t wifi_records = 0;
    std::size_t traces = 0;
    std::size_t unassigned_traces = 0;
    std::size_t links = 0;
    std::size_t ambiguous_links = 0;
    std::size_t unknown_probe_records = 0;
    MatchStats match;
};

struct AssemblyResult {
    std::vector<MatchedSample> samples;
    std::vector<RunReport> runs;
};

/// Assigns device labels to traces: a trace containing a known address gets that
/// address's device; otherwise, if the run has a single device, the largest trace
/// still unassigned gets it. Returns the number of traces left unassigned.
std::size_t assign_trace_devices(std::vector<BleTrace>& traces, const std::vector<std::string>& run_devices,
                                 const std::map<std::string, std::string>& ble_address_to_device);

/// Runs roll tracing, fingerprint grouping and matching for every run in the logs.
/// Runs missing from the metadata are a DataError.
AssemblyResult assemble_matched(std::span<const SignalRecord> ble, std::span<const SignalRecord> wifi,
                                const RunMetadata& metadata, const AssemblyOptions& options);

inline constexpr std::string_view kMatchedHeader =
    "run_id,device,environment,distance_cm,label,t_us,ble_rssi,wifi24_rssi,wifi24_freq,wifi5_rssi,wifi5_freq";

void export_matched(std::ostream& out, std::span<const MatchedSample> samples);
void export_matched(const std::filesystem::path& path, std::span<const MatchedSample> samples);
/// Columns are looked up by name; a missing column is a DataError naming it.
std::vector<MatchedSample> import_matched(std::istream& in, std::string_view source = "<matched>");
std::vector<MatchedSample> import_matched(const std::filesystem::path& path);

}  // namespace mcprox
