#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcprox/ingest.hpp"
#include "mcprox/propagation.hpp"
#include "mcprox/types.hpp"

namespace mcprox {

struct SynthDevice {
    std::string id;
    /// Either an explicit distance to the receiver or an (x, y) position in metres.
    std::optional<double> distance_cm;
    std::optional<std::pair<double, double>> position_m;
    /// Offset of this device's actual BLE output from the profile's tx power.
    double ble_tx_offset_db = 0.0;
    double roll_period_s = 600.0;
    double roll_offset_s = 0.0;  // first roll at offset + period
    double ble_interval_s = 0.25;
    double probe_interval_s = 3.0;
    double ble_loss = 0.0;  // probability an advertisement is not received
    ProbeCapabilities capabilities;
};

struct SynthRun {
    std::string run_id;
    std::string environment = "office";
    Setup setup = Setup::GroundTruth;
    double duration_s = 60.0;
    std::int64_t start_us = 1'600'000'000'000'000;
    std::pair<double, double> receiver_m{0.0, 0.0};
    std::vector<SynthDevice> devices;
};

struct SynthScenario {
    std::vector<SynthRun> runs;
    ChannelProfile profile = ChannelProfile::defaults();
    std::uint64_t seed = 1;
};

/// One BLE address lifetime as generated.
struct TruthSegment {
    std::string run_id;
    std::string device;
    MacAddress address;
    std::int64_t first_us = 0;
    std::int64_t last_us = 0;
};

struct SynthOutput {
    std::vector<SignalRecord> ble;   // sorted by time
    std::vector<SignalRecord> wifi;  // sorted by time
    RunMetadata metadata;
    std::vector<TruthSegment> truth;  // per run and device, in roll order
    std::map<std::string, std::string> fingerprint_to_device;
    /// First BLE address of every device in every scenario run.
    std::map<std::string, std::string> ble_address_to_device;
};

/// Distance of a device to the run's receiver in centimetres.
double device_distance_cm(const SynthRun& run, const SynthDevice& device);

/// Emits logs with scheduled address rolls and probe bursts, plus the hidden
/// ground truth. Deterministic for a fixed scenario (seeded per run and device).
SynthOutput generate_synthetic(const SynthScenario& scenario);

/// Three devices with distinct capability sets.
std::vector<SynthDevice> default_devices();

struct CampaignOptions {
    std::vector<std::string> environments{"office", "bus", "parking"};
    double seconds_per_distance = 60.0;
    bool scenario_runs = true;
    double scenario_duration_s = 120.0;
    std::uint64_t seed = 1;
};

/// Ground-truth runs for every device, environment and distance (50-400 cm in
/// 50 cm steps, plus 500 and 600 cm outside the office) and, optionally, one
/// multi-device scenario run per environment including the train.
SynthScenario default_campaign(const CampaignOptions& options = {});

/// Scenario JSON:
/// { "seed": 1, "runs": [ { "run_id": "r1", "environment": "office", "setup": "ground_truth",
///   "duration_s": 60, "receiver": [0, 0], "devices": [ { "id": "oneplus", "distance_cm": 150,
///   "ble_tx_offset_db": 0, "roll_period_s": 600, "rates": [1, 2, 5.5, 11], "ext_caps": "0400" } ] } ],
///   "profile": { "ble": { "pl0": 45, "exponent": 1.5, "sigma": 5, "interference": 3, "tx_power": 0 }, ... } }
/// Missing fields take the defaults above.
SynthScenario parse_scenario(std::istream& in, std::string_view source = "<scenario>");
SynthScenario load_scenario(const std::filesystem::path& path);

/// Joint rows drawn straight from the channel model, no logs or matching involved.
/// `distances_cm` x `rows_per_distance` rows with labels from distance_to_class.
std::vector<MatchedSample> synthesize_matched(const ChannelProfile& profile, const std::string& device,
                                              const std::string& environment,
                                              const std::vector<double>& distances_cm, std::size_t rows_per_distance,
                                              std::uint64_t seed, double ble_tx_offset_db = 0.0);

void write_truth(std::ostream& out, const std::vector<TruthSegment>& truth);
void write_address_table(std::ostream& out, const std::map<std::string, std::string>& table);
std::map<std::string, std::string> read_address_table(const std::filesystem::path& path);

}  // namespace mcprox
