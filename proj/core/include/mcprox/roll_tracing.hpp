#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcprox/types.hpp"

namespace mcprox {

/// All records a single address was seen with, between two rolls.
struct TraceSegment {
    MacAddress address;
    std::int64_t first_seen_us = 0;
    std::int64_t last_seen_us = 0;
    std::vector<std::size_t> records;  // indices into the traced input
    double mean_rssi_dbm = 0.0;
};

/// One device's BLE transmissions across address rolls.
struct BleTrace {
    std::string device;  // "trace-N" until assigned
    std::vector<TraceSegment> segments;  // time ordered, non-overlapping

    std::size_t record_count() const;
};

struct RollTraceOptions {
    /// Addresses first seen later than this after a roll are never successors.
    double filter_window_s = 30.0;
    /// Successors must appear within this many seconds after the roll.
    double successor_horizon_s = 10.0;
};

struct RollTraceResult {
    std::vector<BleTrace> traces;
    std::size_t links = 0;
    /// Links decided by the first-seen tie break after an exact mean-RSSI tie.
    std::size_t ambiguous_links = 0;
};

/// Recovers per-device traces from one run of BLE advertisements under address
/// randomization.
///
/// A roll is the last sighting of an address. Its successor candidates are
/// addresses never seen at or before the roll whose first sighting falls inside
/// (roll, roll + min(horizon, filter window)]. When several rolls compete for
/// candidates (simultaneous rolls), pairs are linked greedily by smallest
/// difference of segment mean RSSI; exact ties go to the earliest first sighting
/// and are counted as ambiguous. A roll without candidates ends its trace.
///
/// Throws DataError if records are unsorted or span more than one run.
RollTraceResult trace_address_rolls(std::span<const SignalRecord> records, const RollTraceOptions& options = {});

}  // namespace mcprox
