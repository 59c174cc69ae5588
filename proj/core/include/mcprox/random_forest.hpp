#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mcprox/decision_tree.hpp"

namespace mcprox {

struct ForestParams {
    std::size_t n_trees = 100;
    TreeParams tree;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

/// Bagged CART ensemble with per-split feature subsampling.
class RandomForest {
public:
    /// Tree k draws its bootstrap sample and feature subsets from its own stream
    /// seeded by (seed, k), so the fit is a pure function of (data, params).
    static RandomForest fit(const Dataset& data, const ForestParams& params);
    static RandomForest from_trees(std::vector<DecisionTree> trees);

    /// Majority vote over trees; ties go to the closer class.
    DistanceClass predict(std::span<const double> x) const;
    /// Per-tree votes, one count per class.
    ClassCounts votes(std::span<const double> x) const;
    /// Mean of the trees' leaf class distributions.
    ClassScores predict_proba(std::span<const double> x) const;

    const std::vector<DecisionTree>& trees() const { return trees_; }
    std::size_t n_features() const { return trees_.empty() ? 0 : trees_.front().n_features(); }

    friend bool operator==(const RandomForest&, const RandomForest&) = default;

private:
    std::vector<DecisionTree> trees_;
};

}  // namespace mcprox
