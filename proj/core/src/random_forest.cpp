#include "mcprox/random_forest.hpp"

#include <numeric>

#include "mcprox/error.hpp"

namespace mcprox {

RandomForest RandomForest::fit(const Dataset& data, const ForestParams& params) {
    if (params.n_trees == 0) throw ConfigError("a forest needs at least one tree");
    if (data.empty()) throw DataError("cannot fit a forest on zero rows");
    RandomForest forest;
    forest.trees_.reserve(params.n_trees);
    std::vector<std::size_t> rows(data.size());
    for (std::size_t k = 0; k < params.n_trees; ++k) {
        Rng rng(mix_seed(params.seed, k));
        if (params.bootstrap) {
            for (auto& r : rows) r = uniform_index(rng, data.size());
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        forest.trees_.push_back(DecisionTree::fit(data, rows, params.tree, &rng));
    }
    return forest;
}

RandomForest RandomForest::from_trees(std::vector<DecisionTree> trees) {
    if (trees.empty()) throw DataError("forest without trees");
    for (const auto& t : trees)
        if (t.n_features() != trees.front().n_features()) throw DataError("forest trees disagree on feature count");
    RandomForest forest;
    forest.trees_ = std::move(trees);
    return forest;
}

ClassCounts RandomForest::votes(std::span<const double> x) const {
    ClassCounts v{};
    for (const auto& t : trees_) ++v[index_of(t.predict(x))];
    return v;
}

DistanceClass RandomForest::predict(std::span<const double> x) const {
    const auto v = votes(x);
    return argmax_closer({double(v[0]), double(v[1]), double(v[2])});
}

ClassScores RandomForest::predict_proba(std::span<const double> x) const {
    ClassScores sum{};
    for (const auto& t : trees_) {
        const auto p = t.predict_proba(x);
        for (std::size_t c = 0; c < kNumClasses; ++c) sum[c] += p[c];
    }
    for (auto& s : sum) s /= double(trees_.size());
    return sum;
}

}  // namespace mcprox
