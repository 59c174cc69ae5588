#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mcprox/signal_model.hpp"
#include "mcprox/types.hpp"

namespace mcprox {

struct ProfileEntry {
    double distance_cm = 0.0;
    double mean_rssi_dbm = 0.0;
    std::size_t count = 0;
};

/// Mean RSSI per distance for one device in one environment.
struct DistanceProfile {
    std::string device;
    std::string environment;
    std::vector<ProfileEntry> entries;  // ascending distance, unique
};

/// Groups rows with a ground-truth distance by (device, environment, distance) and
/// averages the RSSI of `channel`. Throws DataError when no row has a distance.
std::vector<DistanceProfile> average_rssi_per_distance(std::span<const MatchedSample> samples, SignalKind channel);

/// Per-device RSSI correction in dB.
class CorrectionTable {
public:
    void set(const std::string& device, double correction_db);
    /// Throws DataError naming the device when absent.
    double at(const std::string& device) const;
    bool contains(const std::string& device) const { return values_.contains(device); }
    const std::map<std::string, double>& values() const { return values_; }

    /// `device,correction_db`.
    void write(std::ostream& out) const;
    static CorrectionTable read(std::istream& in, std::string_view source = "<corrections>");
    static CorrectionTable read_file(const std::filesystem::path& path);

    friend bool operator==(const CorrectionTable&, const CorrectionTable&) = default;

private:
    std::map<std::string, double> values_;
};

/// Strict "< d_vc" is enforced as "<= d_vc - epsilon".
inline constexpr double kCalibrationEpsilonDb = 1e-6;

struct DeviceCorrection {
    double correction_db = 0.0;
    /// Total deviation of close/safe attenuations from their target bands.
    double objective = 0.0;
    /// Correction interval that attains the same objective (upper may be +inf).
    double optimum_lower = 0.0;
    double optimum_upper = 0.0;
};

/// Solves the one-variable calibration program for one device.
///
/// Every very-close entry (distance < 150 cm) must satisfy
///   attenuation(tx, rssi, c) <= d_vc - epsilon        (hard)
/// and the objective sums, per remaining entry, how far its attenuation lies
/// outside [d_vc, d_c] (close) or below d_c (safe). The objective is convex and
/// piecewise linear in c, so the optimum is found exactly among the hard lower
/// bound and the kinks. A bounded flat optimum returns its midpoint; an unbounded
/// one (no soft entries) returns the feasible value closest to zero.
///
/// Throws InfeasibleCalibration without very-close entries.
DeviceCorrection solve_device_correction(std::span<const ProfileEntry> entries, double tx_power_dbm,
                                         const AttenuationThresholds& t = {},
                                         double epsilon_db = kCalibrationEpsilonDb);

/// Pools each device's profiles over environments and solves per device.
/// Devices missing from `tx_power_dbm` use `default_tx_power_dbm`.
CorrectionTable solve_corrections(std::span<const DistanceProfile> profiles,
                                  const std::map<std::string, double>& tx_power_dbm,
                                  const AttenuationThresholds& t = {}, double default_tx_power_dbm = 0.0,
                                  double epsilon_db = kCalibrationEpsilonDb);

/// Copies the samples with each device's correction attached; the raw RSSI is kept.
/// Throws DataError listing every device absent from the table.
std::vector<MatchedSample> apply_corrections(std::span<const MatchedSample> samples, const CorrectionTable& table);

}  // namespace mcprox
