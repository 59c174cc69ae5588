#include "mcprox/grid_search.hpp"

#include <cmath>
#include <limits>

#include "mcprox/error.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

std::string_view to_string(ModelFamily family) { return family == ModelFamily::DecisionTree ? "dt" : "rf"; }

std::string HyperParams::to_string() const {
    return "max_depth=" + (max_depth ? std::to_string(*max_depth) : std::string("none")) +
           " min_samples_leaf=" + std::to_string(min_samples_leaf) + " n_trees=" + std::to_string(n_trees) +
           " features=" + (features == FeatureSubset::All ? "all" : "sqrt");
}

HyperParams HyperParams::parse(std::string_view text) {
    HyperParams hp;
    for (auto tok : split_fields(trim(text), ' ')) {
        if (tok.empty()) continue;
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) throw DataError("bad hyperparameter \"" + std::string(tok) + "\"");
        const auto key = tok.substr(0, eq);
        const auto value = tok.substr(eq + 1);
        auto count = [&] {
            const auto v = parse_int(value);
            if (!v || *v < 0) throw DataError("bad hyperparameter value \"" + std::string(tok) + "\"");
            return static_cast<std::size_t>(*v);
        };
        if (key == "max_depth") hp.max_depth = value == "none" ? std::nullopt : std::optional(count());
        else if (key == "min_samples_leaf") hp.min_samples_leaf = count();
        else if (key == "n_trees") hp.n_trees = count();
        else if (key == "features") {
            if (value == "all") hp.features = FeatureSubset::All;
            else if (value == "sqrt") hp.features = FeatureSubset::Sqrt;
            else throw DataError("bad features value \"" + std::string(value) + "\"");
        } else {
            throw DataError("unknown hyperparameter \"" + std::string(key) + "\"");
        }
    }
    return hp;
}

TreeParams tree_params(const HyperParams& hp, std::size_t n_features) {
    TreeParams p;
    p.max_depth = hp.max_depth;
    p.min_samples_leaf = std::max<std::size_t>(hp.min_samples_leaf, 1);
    p.min_samples_split = 2 * p.min_samples_leaf;
    if (hp.features == FeatureSubset::Sqrt)
        p.features_per_split = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(n_features))));
    return p;
}

ForestParams forest_params(const HyperParams& hp, std::size_t n_features, std::uint64_t seed) {
    ForestParams p;
    p.n_trees = hp.n_trees;
    p.tree = tree_params(hp, n_features);
    p.seed = seed;
    return p;
}

std::vector<HyperParams> ParamGrid::points(ModelFamily family) const {
    std::vector<HyperParams> out;
    for (const auto& depth : max_depth) {
        for (auto leaf : min_samples_leaf) {
            if (family == ModelFamily::DecisionTree) {
                out.push_back({depth, leaf, 1, FeatureSubset::All});
                continue;
            }
            for (auto trees : n_trees)
                for (auto f : features) out.push_back({depth, leaf, trees, f});
        }
    }
    return out;
}

namespace {

template <typename Model>
std::size_t count_correct(const Model& model, const Dataset& test) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) correct += model.predict(test.row(i)) == test.label(i);
    return correct;
}

// True when a is a strictly smaller model than b under the tie rule.
bool smaller(const HyperParams& a, const HyperParams& b) {
    const auto da = a.max_depth.value_or(std::numeric_limits<std::size_t>::max());
    const auto db = b.max_depth.value_or(std::numeric_limits<std::size_t>::max());
    if (da != db) return da < db;
    return a.n_trees < b.n_trees;
}

}  // namespace

GridSearchResult grid_search(ModelFamily family, const ParamGrid& grid, const Dataset& train, const Dataset& test,
                             std::uint64_t seed) {
    const auto points = grid.points(family);
    if (points.empty()) throw ConfigError("empty hyperparameter grid");
    if (test.empty()) throw DataError("grid search needs a non-empty test split");

    GridSearchResult result;
    std::size_t best_correct = 0;
    for (const auto& hp : points) {
        std::size_t correct;
        if (family == ModelFamily::DecisionTree) {
            correct = count_correct(DecisionTree::fit(train, tree_params(hp, train.n_features())), test);
        } else {
            correct = count_correct(RandomForest::fit(train, forest_params(hp, train.n_features(), seed)), test);
        }
        result.table.push_back({hp, double(correct) / double(test.size())});
        const bool first = result.table.size() == 1;
        if (first || correct > best_correct || (correct == best_correct && smaller(hp, result.best))) {
            best_correct = correct;
            result.best = hp;
        }
    }
    result.best_accuracy = double(best_correct) / double(test.size());
    return result;
}

}  // namespace mcprox
