#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcprox/decision_tree.hpp"
#include "mcprox/random_forest.hpp"

namespace mcprox {

enum class ModelFamily { DecisionTree, RandomForest };
enum class FeatureSubset { All, Sqrt };

std::string_view to_string(ModelFamily family);

struct HyperParams {
    std::optional<std::size_t> max_depth;  // nullopt = unlimited
    std::size_t min_samples_leaf = 1;
    std::size_t n_trees = 1;  // forests only
    FeatureSubset features = FeatureSubset::All;  // forests only

    std::string to_string() const;
    /// Parses the to_string() form.
    static HyperParams parse(std::string_view text);

    friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

TreeParams tree_params(const HyperParams& hp, std::size_t n_features);
ForestParams forest_params(const HyperParams& hp, std::size_t n_features, std::uint64_t seed);

struct ParamGrid {
    std::vector<std::optional<std::size_t>> max_depth{3, 5, 8, 12, std::nullopt};
    std::vector<std::size_t> min_samples_leaf{1, 5, 20};
    std::vector<std::size_t> n_trees{10, 50, 100};
    std::vector<FeatureSubset> features{FeatureSubset::All, FeatureSubset::Sqrt};

    /// Cartesian product in declaration order; trees ignore the forest-only axes.
    std::vector<HyperParams> points(ModelFamily family) const;
};

struct GridScore {
    HyperParams params;
    double accuracy = 0.0;
};

struct GridSearchResult {
    HyperParams best;
    double best_accuracy = 0.0;
    std::vector<GridScore> table;
};

/// Fits every grid point on `train` and scores accuracy on `test`. Ties go to the
/// smaller model: lower max_depth (unlimited counts as largest), then fewer trees,
/// then the earlier grid point. Throws ConfigError on an empty grid.
GridSearchResult grid_search(ModelFamily family, const ParamGrid& grid, const Dataset& train, const Dataset& test,
                             std::uint64_t seed);

}  // namespace mcprox
