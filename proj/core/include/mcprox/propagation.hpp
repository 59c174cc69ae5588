#pragma once

#include <vector>

#include "mcprox/random.hpp"
#include "mcprox/types.hpp"

namespace mcprox {

/// Log-normal shadowing: PL(d) = pl0 + 10 n log10(d / d0) + sigma * X, X ~ N(0, 1).
struct LnsmParams {
    double pl0_db = 40.0;
    double d0_m = 1.0;
    double exponent = 2.0;
    double sigma_db = 0.0;
};

/// Throws DataError for d <= 0 or invalid parameters.
double lnsm_path_loss(double distance_m, const LnsmParams& p, double standard_normal_draw = 0.0);

/// Two-ray ground reflection.
struct TrgParams {
    double tx_height_m = 1.0;
    double rx_height_m = 1.0;
    double frequency_mhz = 2480.0;
    double tx_power_dbm = 0.0;
};

/// 20 log10(4 pi d / lambda).
double free_space_path_loss(double distance_m, double frequency_mhz);
/// 4 pi h_t h_r / lambda; beyond it the two-ray far-field law applies.
double trg_crossover_distance(const TrgParams& p);
/// Free space below the crossover, 40 log10 d - 20 log10(h_t h_r) beyond. The two
/// branches meet exactly at the crossover.
double trg_path_loss(double distance_m, const TrgParams& p);

/// Per-signal synthetic channel: LNSM loss plus additive interference noise.
/// 802.11 losses also grow with 20 log10(f / reference) so frequency is informative.
struct ChannelModel {
    LnsmParams lnsm;
    double interference_sigma_db = 0.0;
    double tx_power_dbm = 0.0;
    double reference_mhz = 2440.0;
    std::vector<int> channels_mhz;  // empty for BLE

    /// Mean received power at distance and frequency (0 MHz = no frequency term).
    double mean_rssi(double distance_m, int frequency_mhz = 0) const;
    /// Integer dBm draw, clamped to the valid RSSI range.
    int sample_rssi(double distance_m, int frequency_mhz, Rng& rng) const;
    /// Combined per-sample standard deviation.
    double total_sigma() const;
};

struct ChannelProfile {
    ChannelModel ble;
    ChannelModel wifi24;
    ChannelModel wifi5;

    /// BLE flat and noisy, 2.4 GHz correlated with distance, 5 GHz cleanest.
    /// Test fixtures, not fitted to any measurement.
    static ChannelProfile defaults();
    const ChannelModel& of(SignalKind kind) const;
};

}  // namespace mcprox
