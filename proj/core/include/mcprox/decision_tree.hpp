#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcprox/features.hpp"
#include "mcprox/random.hpp"
#include "mcprox/types.hpp"

namespace mcprox {

using ClassCounts = std::array<std::uint64_t, kNumClasses>;
using ClassScores = std::array<double, kNumClasses>;

/// 1 - sum p_i^2. Throws DataError on an all-zero count vector.
double gini(std::span<const std::uint64_t> counts);

/// Scores closer than this are ties.
inline constexpr double kScoreTolerance = 1e-12;

/// Highest score wins; ties go to the closer (more cautious) class.
DistanceClass argmax_closer(const ClassScores& scores);

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;  // rows with value <= threshold go left
    double gain = 0.0;       // parent impurity minus size-weighted child impurity
};

/// Gains closer than this are ties.
inline constexpr double kGainTolerance = 1e-12;

/// Best Gini split over midpoints between consecutive distinct values of the
/// candidate features. Ties keep the lowest feature index, then the lowest
/// threshold. Returns nullopt when no split improves impurity.
std::optional<Split> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidate_features, std::size_t min_samples_leaf = 1);

struct TreeParams {
    std::optional<std::size_t> max_depth;  // nullopt = unlimited
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    /// Features drawn per split; 0 means all.
    std::size_t features_per_split = 0;
};

/// CART classifier stored as a flat node array (node 0 is the root).
class DecisionTree {
public:
    struct Node {
        std::int32_t feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        ClassCounts counts{};

        bool is_leaf() const { return feature < 0; }
        friend bool operator==(const Node&, const Node&) = default;
    };

    /// Greedy recursive fit. `rng` is only used when features_per_split subsamples.
    static DecisionTree fit(const Dataset& data, const TreeParams& params, Rng* rng = nullptr);
    static DecisionTree fit(const Dataset& data, std::span<const std::size_t> rows, const TreeParams& params,
                            Rng* rng = nullptr);

    /// Rebuilds a tree from persisted nodes; throws DataError if they do not form a tree.
    static DecisionTree from_nodes(std::size_t n_features, std::vector<Node> nodes);

    DistanceClass predict(std::span<const double> x) const;
    ClassScores predict_proba(std::span<const double> x) const;

    /// Root split, from which single-value thresholds can be read off.
    std::optional<Split> root_split() const;

    std::size_t n_features() const { return n_features_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t depth() const;
    std::size_t leaf_count() const;

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    const Node& leaf_for(std::span<const double> x) const;

    std::size_t n_features_ = 0;
    std::vector<Node> nodes_;
};

}  // namespace mcprox
