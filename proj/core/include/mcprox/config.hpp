#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mcprox/dataset_prep.hpp"
#include "mcprox/grid_search.hpp"
#include "mcprox/roster.hpp"
#include "mcprox/signal_model.hpp"

namespace mcprox {

/// Settings shared by every pipeline stage.
///
/// The file format is one `key = value` per line; `#` starts a comment.
/// Lists are comma separated. Unknown keys are rejected.
struct PipelineConfig {
    // inputs; empty means "the output of the synth stage"
    std::filesystem::path ble_log;
    std::filesystem::path wifi_log;
    std::filesystem::path metadata;
    std::filesystem::path fingerprint_table;
    std::filesystem::path ble_address_table;
    std::filesystem::path attenuation_log;  // gaen input; empty uses the matched samples
    std::filesystem::path scenario;         // synth layout; empty uses the default campaign
    std::filesystem::path out_dir = "mcprox-out";

    double d_vc = 55.0;
    double d_c = 63.0;
    double warn_threshold = kDefaultWarnThreshold;
    double match_window_s = 5.0;
    double filter_window_s = 30.0;
    double successor_horizon_s = 10.0;
    std::size_t n_per_class = 100000;
    std::size_t per_cell_target = 0;
    SplitRatios split;
    bool split_first = false;
    std::uint64_t seed = 42;

    double tx_power_default = 0.0;
    std::map<std::string, double> tx_power;  // tx_power.<device>

    ParamGrid grid;
    CombineMode combine_mode = CombineMode::OneHot;
    std::vector<int> models{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
    std::vector<std::string> devices;  // empty = every device with ground-truth data

    double gaen_window_s = 300.0;
    WindowAggregate gaen_aggregate = WindowAggregate::Minimum;

    std::vector<std::string> synth_environments{"office", "bus", "parking"};
    double synth_seconds_per_distance = 60.0;
    double synth_scenario_duration_s = 120.0;
    bool synth_scenarios = true;

    /// Applies one `key = value` setting. Throws ConfigError naming the key.
    void set(std::string_view key, std::string_view value);
    /// Cross-field checks; parse() runs it, callers that set() afterwards run it again.
    void validate() const;

    static PipelineConfig parse(std::istream& in, std::string_view source = "<config>");
    static PipelineConfig read_file(const std::filesystem::path& path);

    AttenuationThresholds thresholds() const { return {d_vc, d_c}; }
    double tx_power_of(const std::string& device) const;

    /// Every setting except out_dir, one sorted `key = value` line each.
    std::string canonical() const;
    /// SHA-256 of canonical().
    std::string digest() const;
};

}  // namespace mcprox
