#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mcprox/types.hpp"

namespace mcprox {

/// Canonical capability set of a probe request. Fields are sorted so equal
/// capability sets compare and hash equal regardless of IE parse order.
struct ProbeFingerprint {
    std::vector<std::uint16_t> supported_rates;  // sorted, 500 kb/s units
    std::vector<std::uint8_t> extended_capabilities;
    std::vector<std::string> other_ies;  // sorted

    /// Stable textual key, e.g. "1-2-5.5-11_0400000000000040". Never contains ','.
    std::string key() const;

    friend auto operator<=>(const ProbeFingerprint&, const ProbeFingerprint&) = default;
};

/// Throws DataError("unfingerprintable record") without capabilities or supported rates.
ProbeFingerprint fingerprint_probe(const SignalRecord& record);

struct WifiGrouping {
    std::map<std::string, std::vector<SignalRecord>> by_device;
    std::vector<SignalRecord> unknown;
    std::map<std::string, std::size_t> unknown_fingerprints;  // key -> record count
};

/// Partitions probe records by device through a fingerprint-key -> device table.
/// Table misses land in `unknown`.
WifiGrouping group_wifi_by_device(std::span<const SignalRecord> records,
                                  const std::map<std::string, std::string>& fingerprint_to_device);

/// `fingerprint,device` table.
std::map<std::string, std::string> read_fingerprint_table(const std::filesystem::path& path);
void write_fingerprint_table(std::ostream& out, const std::map<std::string, std::string>& table);

}  // namespace mcprox
