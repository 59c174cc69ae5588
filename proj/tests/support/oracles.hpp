#pragma once
// Reference implementations used only by tests. They favour obviousness over
// speed and share no code with the library routines they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mcprox/features.hpp"
#include "mcprox/metrics.hpp"
#include "mcprox/types.hpp"

namespace oracle {

using mcprox::DistanceClass;

// The OnePlus BLE-threshold confusion matrix on ground truth (rows true, columns predicted).
inline mcprox::ConfusionMatrix reference_matrix() {
    return mcprox::ConfusionMatrix({{{12393, 6715, 891}, {5651, 8433, 5916}, {1842, 4326, 13833}}});
}

inline double gini_of(const std::vector<int>& labels) {
    if (labels.empty()) return 0.0;
    std::array<double, 3> p{};
    for (int l : labels) p[std::size_t(l)] += 1.0;
    double s = 1.0;
    for (double c : p) s -= (c / double(labels.size())) * (c / double(labels.size()));
    return s;
}

struct SplitAnswer {
    std::size_t feature;
    double threshold;
    double gain;
};

// Every midpoint of every feature, children recounted from scratch.
inline std::optional<SplitAnswer> best_split(const mcprox::Dataset& data, const std::vector<std::size_t>& rows,
                                             std::size_t min_leaf = 1) {
    std::vector<int> all;
    for (auto r : rows) all.push_back(int(data.label(r)));
    const double parent = gini_of(all);
    std::vector<SplitAnswer> candidates;
    for (std::size_t f = 0; f < data.n_features(); ++f) {
        std::set<double> values;
        for (auto r : rows) values.insert(data.value(r, f));
        std::vector<double> v(values.begin(), values.end());
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const double thr = (v[i] + v[i + 1]) / 2;
            std::vector<int> left, right;
            for (auto r : rows) (data.value(r, f) <= thr ? left : right).push_back(int(data.label(r)));
            if (left.size() < min_leaf || right.size() < min_leaf) continue;
            const double n = double(rows.size());
            const double gain =
                parent - (double(left.size()) / n) * gini_of(left) - (double(right.size()) / n) * gini_of(right);
            if (gain > 1e-9) candidates.push_back({f, thr, gain});
        }
    }
    if (candidates.empty()) return std::nullopt;
    double top = 0;
    for (const auto& c : candidates) top = std::max(top, c.gain);
    for (const auto& c : candidates)  // already ordered by (feature, threshold)
        if (c.gain >= top - 1e-9) return c;
    return std::nullopt;
}

struct CalibEntry {
    double distance_cm;
    double rssi;
};

// Penalty of a correction c, stated in attenuation terms.
inline double calibration_objective(const std::vector<CalibEntry>& entries, double tx, double c, double d_vc = 55,
                                    double d_c = 63) {
    double f = 0;
    for (const auto& e : entries) {
        const double a = tx - (e.rssi + c);
        if (e.distance_cm < 150) continue;
        if (e.distance_cm <= 300) f += std::max(0.0, d_vc - a) + std::max(0.0, a - d_c);
        else f += std::max(0.0, d_c - a);
    }
    return f;
}

inline double calibration_lower_bound(const std::vector<CalibEntry>& entries, double tx, double d_vc = 55,
                                      double eps = 1e-6) {
    double lo = -std::numeric_limits<double>::infinity();
    for (const auto& e : entries)
        if (e.distance_cm < 150) lo = std::max(lo, tx - e.rssi - d_vc + eps);
    return lo;
}

// Grid minimum over [lo, lo + span] at the given step.
inline double calibration_grid_min(const std::vector<CalibEntry>& entries, double tx, double lo, double span,
                                   double step) {
    double best = std::numeric_limits<double>::infinity();
    for (double c = lo; c <= lo + span; c += step) best = std::min(best, calibration_objective(entries, tx, c));
    return best;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("mcprox-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace oracle
