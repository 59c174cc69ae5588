#include "mcprox/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mcprox/error.hpp"

namespace mcprox {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

double wavelength_m(double frequency_mhz) { return kSpeedOfLight / (frequency_mhz * 1e6); }

}  // namespace

double lnsm_path_loss(double distance_m, const LnsmParams& p, double draw) {
    if (!(distance_m > 0.0)) throw DataError("path loss needs a positive distance");
    if (!(p.d0_m > 0.0) || !(p.exponent > 0.0) || !(p.sigma_db >= 0.0)) throw DataError("invalid LNSM parameters");
    return p.pl0_db + 10.0 * p.exponent * std::log10(distance_m / p.d0_m) + p.sigma_db * draw;
}

double free_space_path_loss(double distance_m, double frequency_mhz) {
    if (!(distance_m > 0.0)) throw DataError("path loss needs a positive distance");
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m / wavelength_m(frequency_mhz));
}

double trg_crossover_distance(const TrgParams& p) {
    return 4.0 * std::numbers::pi * p.tx_height_m * p.rx_height_m / wavelength_m(p.frequency_mhz);
}

double trg_path_loss(double distance_m, const TrgParams& p) {
    if (!(distance_m > 0.0)) throw DataError("path loss needs a positive distance");
    if (!(p.tx_height_m > 0.0) || !(p.rx_height_m > 0.0)) throw DataError("antenna heights must be positive");
    if (!band_of_frequency(static_cast<int>(std::lround(p.frequency_mhz))))
        throw DataError("two-ray frequency outside the known bands");
    if (distance_m < trg_crossover_distance(p)) return free_space_path_loss(distance_m, p.frequency_mhz);
    return 40.0 * std::log10(distance_m) - 20.0 * std::log10(p.tx_height_m * p.rx_height_m);
}

double ChannelModel::mean_rssi(double distance_m, int frequency_mhz) const {
    double loss = lnsm_path_loss(distance_m, {lnsm.pl0_db, lnsm.d0_m, lnsm.exponent, 0.0});
    if (frequency_mhz > 0) loss += 20.0 * std::log10(double(frequency_mhz) / reference_mhz);
    return tx_power_dbm - loss;
}

int ChannelModel::sample_rssi(double distance_m, int frequency_mhz, Rng& rng) const {
    const double shadow = lnsm.sigma_db * standard_normal(rng);
    const double interference = interference_sigma_db * standard_normal(rng);
    const double rssi = mean_rssi(distance_m, frequency_mhz) - shadow + interference;
    return static_cast<int>(std::clamp<long>(std::lround(rssi), kMinRssiDbm, kMaxRssiDbm));
}

double ChannelModel::total_sigma() const {
    return std::hypot(lnsm.sigma_db, interference_sigma_db);
}

ChannelProfile ChannelProfile::defaults() {
    ChannelProfile p;
    p.ble.lnsm = {45.0, 1.0, 1.5, 5.0};
    p.ble.interference_sigma_db = 3.0;
    p.ble.tx_power_dbm = 0.0;

    p.wifi24.lnsm = {40.0, 1.0, 2.5, 3.0};
    p.wifi24.interference_sigma_db = 2.0;
    p.wifi24.tx_power_dbm = 15.0;
    p.wifi24.reference_mhz = 2437.0;
    p.wifi24.channels_mhz = {2412, 2437, 2462};

    p.wifi5.lnsm = {47.0, 1.0, 3.2, 1.5};
    p.wifi5.interference_sigma_db = 0.5;
    p.wifi5.tx_power_dbm = 15.0;
    p.wifi5.reference_mhz = 5180.0;
    p.wifi5.channels_mhz = {5180, 5200, 5220, 5240};
    return p;
}

const ChannelModel& ChannelProfile::of(SignalKind kind) const {
    switch (kind) {
        case SignalKind::Ble: return ble;
        case SignalKind::Wifi24: return wifi24;
        case SignalKind::Wifi5: return wifi5;
    }
    return ble;
}

}  // namespace mcprox
