#pragma once

#include <span>
#include <vector>

#include "mcprox/types.hpp"

namespace mcprox {

/// GAEN attenuation bucket edges in dB. Defaults are the German Corona-Warn-App values.
class AttenuationThresholds {
public:
    AttenuationThresholds() = default;
    /// Throws ConfigError unless very_close_db < close_db.
    AttenuationThresholds(double very_close_db, double close_db);

    double very_close_db() const { return very_close_; }
    double close_db() const { return close_; }

private:
    double very_close_ = 55.0;
    double close_ = 63.0;
};

struct ScanWindowStats {
    double min_attenuation_db = 0.0;
    double avg_attenuation_db = 0.0;
    double duration_s = 0.0;
};

/// Minutes spent in each close bucket.
struct ExposureDurations {
    double very_close_min = 0.0;
    double close_min = 0.0;
};

inline constexpr double kDefaultWarnThreshold = 15.0;

/// tx_power - (rssi_measured + rssi_correction).
constexpr double attenuation(double tx_power_dbm, double rssi_measured_dbm, double rssi_correction_db) {
    return tx_power_dbm - (rssi_measured_dbm + rssi_correction_db);
}

/// Strict less-than at both edges.
DistanceClass classify_attenuation(double attenuation_db, const AttenuationThresholds& t = {});

/// Throws DataError("empty scan window") on an empty span.
ScanWindowStats scan_window_stats(std::span<const double> attenuations_db, double duration_s);

/// ES = B1 + 0.5 B2.
constexpr double exposure_score(const ExposureDurations& d) { return d.very_close_min + 0.5 * d.close_min; }

bool should_warn(double score, double threshold = kDefaultWarnThreshold);

/// Ground-truth class of a distance in centimetres: < 150 very close, <= 300 close, else safe.
DistanceClass distance_to_class(double distance_cm);

enum class WindowAggregate { Minimum, Average };

/// Accumulates window durations into the bucket of each window's (min or avg) attenuation.
/// Durations are taken verbatim; safe windows contribute nothing.
ExposureDurations accumulate_exposure(std::span<const ScanWindowStats> windows,
                                      const AttenuationThresholds& t = {},
                                      WindowAggregate aggregate = WindowAggregate::Minimum);

}  // namespace mcprox
