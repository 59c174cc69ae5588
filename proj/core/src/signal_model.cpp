#include "mcprox/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcprox/error.hpp"

namespace mcprox {

AttenuationThresholds::AttenuationThresholds(double very_close_db, double close_db)
    : very_close_(very_close_db), close_(close_db) {
    if (!std::isfinite(very_close_db) || !std::isfinite(close_db) || !(very_close_db < close_db))
        throw ConfigError("attenuation thresholds require d_vc < d_c");
}

DistanceClass classify_attenuation(double attenuation_db, const AttenuationThresholds& t) {
    if (attenuation_db < t.very_close_db()) return DistanceClass::VeryClose;
    if (attenuation_db < t.close_db()) return DistanceClass::Close;
    return DistanceClass::Safe;
}

ScanWindowStats scan_window_stats(std::span<const double> attenuations_db, double duration_s) {
    if (attenuations_db.empty()) throw DataError("empty scan window");
    ScanWindowStats stats;
    stats.min_attenuation_db = *std::min_element(attenuations_db.begin(), attenuations_db.end());
    stats.avg_attenuation_db =
        std::accumulate(attenuations_db.begin(), attenuations_db.end(), 0.0) / double(attenuations_db.size());
    // The mean of values >= m can round below m by an ulp.
    stats.avg_attenuation_db = std::max(stats.avg_attenuation_db, stats.min_attenuation_db);
    stats.duration_s = duration_s;
    return stats;
}

bool should_warn(double score, double threshold) {
    if (!(score >= 0.0)) throw DataError("exposure score must be non-negative");
    return score >= threshold;
}

DistanceClass distance_to_class(double distance_cm) {
    if (!(distance_cm > 0.0) || !std::isfinite(distance_cm))
        throw DataError("distance must be positive, got " + std::to_string(distance_cm));
    if (distance_cm < 150.0) return DistanceClass::VeryClose;
    if (distance_cm <= 300.0) return DistanceClass::Close;
    return DistanceClass::Safe;
}

ExposureDurations accumulate_exposure(std::span<const ScanWindowStats> windows, const AttenuationThresholds& t,
                                      WindowAggregate aggregate) {
    ExposureDurations d;
    for (const auto& w : windows) {
        const double a = aggregate == WindowAggregate::Minimum ? w.min_attenuation_db : w.avg_attenuation_db;
        const double minutes = w.duration_s / 60.0;
        switch (classify_attenuation(a, t)) {
            case DistanceClass::VeryClose: d.very_close_min += minutes; break;
            case DistanceClass::Close: d.close_min += minutes; break;
            case DistanceClass::Safe: break;
        }
    }
    return d;
}

}  // namespace mcprox
