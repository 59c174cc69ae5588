#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mcprox/types.hpp"

namespace mcprox {

/// Feature subsets used by the model roster. BLE carries no frequency because the
/// receiver cannot tell which advertising channel was used.
enum class FeatureSet { Ble, Wifi24, Wifi5, Full };

std::string_view to_string(FeatureSet set);
std::optional<FeatureSet> parse_feature_set(std::string_view text);
std::span<const std::string_view> feature_names(FeatureSet set);
inline std::size_t feature_count(FeatureSet set) { return feature_names(set).size(); }

/// Writes the features of `sample` selected by `set` into `out` (size feature_count(set)).
void extract_features(const MatchedSample& sample, FeatureSet set, std::span<double> out);

/// Dense row-major feature matrix with class labels.
class Dataset {
public:
    explicit Dataset(std::size_t n_features) : n_features_(n_features) {}

    /// Rows without a label are skipped.
    static Dataset from_samples(std::span<const MatchedSample> samples, FeatureSet set);

    void add(std::span<const double> features, DistanceClass label);

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    std::size_t n_features() const { return n_features_; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_features_, n_features_}; }
    double value(std::size_t i, std::size_t feature) const { return values_[i * n_features_ + feature]; }
    DistanceClass label(std::size_t i) const { return labels_[i]; }
    std::span<const DistanceClass> labels() const { return labels_; }

private:
    std::size_t n_features_;
    std::vector<double> values_;
    std::vector<DistanceClass> labels_;
};

}  // namespace mcprox
