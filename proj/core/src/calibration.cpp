#include "mcprox/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>

#include "mcprox/error.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

namespace {

int channel_rssi(const MatchedSample& s, SignalKind channel) {
    switch (channel) {
        case SignalKind::Ble: return s.ble_rssi;
        case SignalKind::Wifi24: return s.wifi24_rssi;
        case SignalKind::Wifi5: return s.wifi5_rssi;
    }
    return 0;
}

}  // namespace

std::vector<DistanceProfile> average_rssi_per_distance(std::span<const MatchedSample> samples, SignalKind channel) {
    std::map<std::tuple<std::string, std::string, double>, std::pair<double, std::size_t>> sums;
    for (const auto& s : samples) {
        if (!s.distance_cm) continue;
        auto& [sum, n] = sums[{s.device, s.environment, *s.distance_cm}];
        sum += channel_rssi(s, channel);
        ++n;
    }
    if (sums.empty()) throw DataError("no ground-truth rows to build distance profiles from");

    std::vector<DistanceProfile> profiles;
    for (const auto& [key, acc] : sums) {
        const auto& [device, environment, distance] = key;
        if (profiles.empty() || profiles.back().device != device || profiles.back().environment != environment)
            profiles.push_back({device, environment, {}});
        profiles.back().entries.push_back({distance, acc.first / double(acc.second), acc.second});
    }
    return profiles;
}

void CorrectionTable::set(const std::string& device, double correction_db) {
    if (!std::isfinite(correction_db)) throw DataError("non-finite correction for " + device);
    values_[device] = correction_db;
}

double CorrectionTable::at(const std::string& device) const {
    auto it = values_.find(device);
    if (it == values_.end()) throw DataError("no correction for device " + device);
    return it->second;
}

void CorrectionTable::write(std::ostream& out) const {
    out << "device,correction_db\n";
    for (const auto& [device, c] : values_) out << device << ',' << format_double(c) << '\n';
}

CorrectionTable CorrectionTable::read(std::istream& in, std::string_view source) {
    const auto table = CsvTable::read(in, source);
    const auto c_dev = table.require("device");
    const auto c_val = table.require("correction_db");
    CorrectionTable out;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto v = parse_double(table.row(i)[c_val]);
        if (!v)
            throw DataError(std::string(source) + ":" + std::to_string(table.line_of(i)) + ": bad correction_db");
        out.set(table.row(i)[c_dev], *v);
    }
    return out;
}

CorrectionTable CorrectionTable::read_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read(in, path.string());
}

DeviceCorrection solve_device_correction(std::span<const ProfileEntry> entries, double tx_power_dbm,
                                         const AttenuationThresholds& t, double epsilon_db) {
    // With a = tx - rssi - c, each soft term is a hinge in c:
    //   close: max(0, c - (tx - rssi - d_vc)) + max(0, (tx - rssi - d_c) - c)
    //   safe:  max(0, c - (tx - rssi - d_c))
    double lower = -std::numeric_limits<double>::infinity();
    bool have_hard = false;
    std::vector<double> rising;   // slope +1 once c passes the kink
    std::vector<double> falling;  // slope -1 until c reaches the kink
    for (const auto& e : entries) {
        if (!std::isfinite(e.mean_rssi_dbm) || !std::isfinite(e.distance_cm))
            throw DataError("non-finite calibration profile entry");
        const double base = tx_power_dbm - e.mean_rssi_dbm;
        switch (distance_to_class(e.distance_cm)) {
            case DistanceClass::VeryClose:
                lower = std::max(lower, base - t.very_close_db() + epsilon_db);
                have_hard = true;
                break;
            case DistanceClass::Close:
                rising.push_back(base - t.very_close_db());
                falling.push_back(base - t.close_db());
                break;
            case DistanceClass::Safe: rising.push_back(base - t.close_db()); break;
        }
    }
    if (!have_hard) throw InfeasibleCalibration("calibration needs at least one very-close profile entry");

    auto objective = [&](double c) {
        double f = 0.0;
        for (double k : rising) f += std::max(0.0, c - k);
        for (double k : falling) f += std::max(0.0, k - c);
        return f;
    };
    // Slope just right of x.
    auto right_slope = [&](double x) {
        long s = 0;
        for (double k : rising) s += (x >= k);
        for (double k : falling) s -= (x < k);
        return s;
    };

    DeviceCorrection out;
    if (rising.empty() && falling.empty()) {
        out.optimum_lower = lower;
        out.optimum_upper = std::numeric_limits<double>::infinity();
        out.correction_db = std::max(lower, 0.0);
        out.objective = 0.0;
        return out;
    }

    std::vector<double> kinks;
    kinks.push_back(lower);
    for (double k : rising)
        if (k > lower) kinks.push_back(k);
    for (double k : falling)
        if (k > lower) kinks.push_back(k);
    std::sort(kinks.begin(), kinks.end());
    kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

    // Rising hinges make the slope positive far right, so both searches terminate.
    std::size_t p = 0;
    while (right_slope(kinks[p]) < 0) ++p;
    std::size_t q = p;
    while (right_slope(kinks[q]) == 0) ++q;

    out.optimum_lower = kinks[p];
    out.optimum_upper = kinks[q];
    out.correction_db = p == q ? kinks[p] : 0.5 * (kinks[p] + kinks[q]);
    out.objective = objective(out.correction_db);
    return out;
}

CorrectionTable solve_corrections(std::span<const DistanceProfile> profiles,
                                  const std::map<std::string, double>& tx_power_dbm, const AttenuationThresholds& t,
                                  double default_tx_power_dbm, double epsilon_db) {
    std::map<std::string, std::vector<ProfileEntry>> pooled;
    for (const auto& p : profiles)
        pooled[p.device].insert(pooled[p.device].end(), p.entries.begin(), p.entries.end());

    CorrectionTable table;
    for (const auto& [device, entries] : pooled) {
        auto it = tx_power_dbm.find(device);
        const double tx = it != tx_power_dbm.end() ? it->second : default_tx_power_dbm;
        try {
            table.set(device, solve_device_correction(entries, tx, t, epsilon_db).correction_db);
        } catch (const InfeasibleCalibration& e) {
            throw InfeasibleCalibration("device " + device + ": " + e.what());
        }
    }
    return table;
}

std::vector<MatchedSample> apply_corrections(std::span<const MatchedSample> samples, const CorrectionTable& table) {
    std::set<std::string> missing;
    for (const auto& s : samples)
        if (!table.contains(s.device)) missing.insert(s.device);
    if (!missing.empty()) {
        std::string list;
        for (const auto& d : missing) list += (list.empty() ? "" : ", ") + d;
        throw DataError("no correction for devices: " + list);
    }
    std::vector<MatchedSample> out(samples.begin(), samples.end());
    for (auto& s : out) s.ble_correction_db = table.at(s.device);
    return out;
}

}  // namespace mcprox
