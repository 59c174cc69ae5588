#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcprox/types.hpp"

namespace mcprox {

/// Parsed capture log. Records keep file order; lines whose timestamp goes
/// backwards are listed (1-based) rather than rejected.
struct ParsedLog {
    std::vector<SignalRecord> records;
    std::vector<std::size_t> out_of_order_lines;
};

inline constexpr std::string_view kBleLogHeader = "timestamp_us,addr,rssi_dbm,run_id";
inline constexpr std::string_view kWifiLogHeader =
    "timestamp_us,mac,rssi_dbm,freq_mhz,supported_rates,ext_caps,run_id";

/// BLE log: `timestamp_us,addr,rssi_dbm,run_id`, header row required.
/// Throws DataError with the line number on any malformed line.
ParsedLog parse_ble_log(std::istream& in, std::string_view source = "<ble>");
ParsedLog parse_ble_log(const std::filesystem::path& path);

/// 802.11 probe log: `timestamp_us,mac,rssi_dbm,freq_mhz,supported_rates,ext_caps,run_id`.
/// supported_rates is `;`-separated Mb/s values, ext_caps is hex. The band is derived
/// from the frequency.
ParsedLog parse_wifi_log(std::istream& in, std::string_view source = "<wifi>");
ParsedLog parse_wifi_log(const std::filesystem::path& path);

void write_ble_log(std::ostream& out, const std::vector<SignalRecord>& records);
void write_wifi_log(std::ostream& out, const std::vector<SignalRecord>& records);

/// Rate list in 500 kb/s units <-> "1;2;5.5;11".
std::vector<std::uint16_t> parse_rates(std::string_view text);
std::string format_rates(const std::vector<std::uint16_t>& rates, char delim = ';');
std::vector<std::uint8_t> parse_hex(std::string_view text);
std::string format_hex(const std::vector<std::uint8_t>& bytes);

enum class Setup { GroundTruth, Scenario };

std::string_view to_string(Setup setup);

/// One (run, device) placement from the run metadata file.
struct RunPlacement {
    std::string run_id;
    std::string device;
    std::string environment;
    std::optional<double> distance_cm;
    Setup setup = Setup::GroundTruth;

    friend bool operator==(const RunPlacement&, const RunPlacement&) = default;
};

inline constexpr std::string_view kKnownEnvironments[] = {"office", "bus", "parking", "train"};

/// Run metadata: `run_id,device,environment,distance_cm[,setup]`.
///
/// Scenario runs list one row per participating device with that device's
/// placement distance. Without a `setup` column, runs in the train environment or
/// with more than one device are scenario runs; an empty `setup` cell is an error.
class RunMetadata {
public:
    RunMetadata() = default;
    explicit RunMetadata(std::vector<RunPlacement> placements);

    static RunMetadata parse(std::istream& in, std::string_view source = "<metadata>");
    static RunMetadata read_file(const std::filesystem::path& path);
    void write(std::ostream& out) const;

    const std::vector<RunPlacement>& placements() const { return placements_; }
    const RunPlacement* find(std::string_view run_id, std::string_view device) const;
    std::vector<const RunPlacement*> run(std::string_view run_id) const;
    /// Throws DataError when the run is not listed.
    Setup setup_of(std::string_view run_id) const;

private:
    std::vector<RunPlacement> placements_;
};

}  // namespace mcprox
