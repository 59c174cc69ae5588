#include "mcprox/features.hpp"

#include <algorithm>

#include "mcprox/error.hpp"

namespace mcprox {

namespace {

constexpr std::string_view kBle[] = {"ble_rssi"};
constexpr std::string_view kWifi24[] = {"wifi24_rssi", "wifi24_freq"};
constexpr std::string_view kWifi5[] = {"wifi5_rssi", "wifi5_freq"};
constexpr std::string_view kFull[] = {"ble_rssi", "wifi24_rssi", "wifi24_freq", "wifi5_rssi", "wifi5_freq"};

}  // namespace

std::string_view to_string(FeatureSet set) {
    switch (set) {
        case FeatureSet::Ble: return "ble";
        case FeatureSet::Wifi24: return "wifi24";
        case FeatureSet::Wifi5: return "wifi5";
        case FeatureSet::Full: return "full";
    }
    return "?";
}

std::optional<FeatureSet> parse_feature_set(std::string_view text) {
    for (auto s : {FeatureSet::Ble, FeatureSet::Wifi24, FeatureSet::Wifi5, FeatureSet::Full})
        if (to_string(s) == text) return s;
    return std::nullopt;
}

std::span<const std::string_view> feature_names(FeatureSet set) {
    switch (set) {
        case FeatureSet::Ble: return kBle;
        case FeatureSet::Wifi24: return kWifi24;
        case FeatureSet::Wifi5: return kWifi5;
        case FeatureSet::Full: return kFull;
    }
    return {};
}

void extract_features(const MatchedSample& s, FeatureSet set, std::span<double> out) {
    switch (set) {
        case FeatureSet::Ble: out[0] = s.ble_rssi; break;
        case FeatureSet::Wifi24:
            out[0] = s.wifi24_rssi;
            out[1] = s.wifi24_freq;
            break;
        case FeatureSet::Wifi5:
            out[0] = s.wifi5_rssi;
            out[1] = s.wifi5_freq;
            break;
        case FeatureSet::Full:
            out[0] = s.ble_rssi;
            out[1] = s.wifi24_rssi;
            out[2] = s.wifi24_freq;
            out[3] = s.wifi5_rssi;
            out[4] = s.wifi5_freq;
            break;
    }
}

Dataset Dataset::from_samples(std::span<const MatchedSample> samples, FeatureSet set) {
    Dataset d(feature_count(set));
    std::vector<double> buf(d.n_features());
    for (const auto& s : samples) {
        if (!s.label) continue;
        extract_features(s, set, buf);
        d.add(buf, *s.label);
    }
    return d;
}

void Dataset::add(std::span<const double> features, DistanceClass label) {
    if (features.size() != n_features_) throw DataError("feature row has the wrong width");
    values_.insert(values_.end(), features.begin(), features.end());
    labels_.push_back(label);
}

}  // namespace mcprox
