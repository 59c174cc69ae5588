#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "mcprox/decision_tree.hpp"
#include "mcprox/error.hpp"
#include "mcprox/grid_search.hpp"
#include "mcprox/random_forest.hpp"

using namespace mcprox;
using DC = DistanceClass;

namespace {

Dataset noisy_dataset(Rng& rng, std::size_t n, std::size_t k, int value_range) {
    Dataset d(k);
    std::vector<double> x(k);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x) v = double(uniform_index(rng, std::uint64_t(value_range)));
        d.add(x, class_at(uniform_index(rng, 3)));
    }
    return d;
}

std::vector<std::size_t> all_rows(const Dataset& d) {
    std::vector<std::size_t> r(d.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = i;
    return r;
}

}  // namespace

TEST_CASE("gini impurity") {
    CHECK(gini(std::array<std::uint64_t, 3>{10, 0, 0}) == 0);
    CHECK(gini(std::array<std::uint64_t, 3>{1, 1, 1}) == doctest::Approx(2.0 / 3));
    CHECK(gini(std::array<std::uint64_t, 3>{2, 1, 1}) == doctest::Approx(0.625));
    CHECK_THROWS(gini(std::array<std::uint64_t, 3>{0, 0, 0}));
}

TEST_CASE("best split on the one-dimensional example") {
    Dataset d(1);
    d.add(std::array{-40.0}, DC::VeryClose);
    d.add(std::array{-80.0}, DC::Safe);
    const auto rows = all_rows(d);
    const std::vector<std::size_t> f{0};
    const auto s = best_split(d, rows, f);
    REQUIRE(s);
    CHECK(s->threshold == -60);
    CHECK(s->gain == doctest::Approx(0.5));

    Dataset same(2);
    for (int i = 0; i < 4; ++i) same.add(std::array{1.0, 2.0}, class_at(std::size_t(i % 3)));
    const std::vector<std::size_t> f2{0, 1};
    CHECK_FALSE(best_split(same, all_rows(same), f2));
}

TEST_CASE("best split ties go to the lowest feature then threshold") {
    Dataset d(2);
    d.add(std::array{1.0, 1.0}, DC::VeryClose);
    d.add(std::array{2.0, 2.0}, DC::Safe);
    const std::vector<std::size_t> f{1, 0};
    const auto s = best_split(d, all_rows(d), f);
    REQUIRE(s);
    CHECK(s->feature == 0);
}

TEST_CASE("best split equals exhaustive enumeration") {
    Rng rng(2024);
    for (int c = 0; c < 100; ++c) {
        const auto n = 2 + uniform_index(rng, 99);
        const auto k = 1 + uniform_index(rng, 5);
        const auto d = noisy_dataset(rng, n, k, 2 + int(uniform_index(rng, 12)));
        const auto leaf = 1 + uniform_index(rng, 3);
        std::vector<std::size_t> feats(k);
        for (std::size_t i = 0; i < k; ++i) feats[i] = i;
        const auto rows = all_rows(d);
        const auto got = best_split(d, rows, feats, leaf);
        const auto want = oracle::best_split(d, rows, leaf);
        REQUIRE(bool(got) == bool(want));
        if (!got) continue;
        CHECK(got->feature == want->feature);
        CHECK(got->threshold == want->threshold);
        CHECK(got->gain == doctest::Approx(want->gain).epsilon(1e-9));
    }
}

TEST_CASE("tree memorizes consistent labels") {
    Rng rng(5);
    Dataset d(3);
    std::vector<double> x(3);
    for (int i = 0; i < 300; ++i) {
        for (auto& v : x) v = std::round(uniform_unit(rng) * 1000);
        d.add(x, class_at(std::size_t(x[0] + 2 * x[1] + 3 * x[2]) % 3));
    }
    const auto t = DecisionTree::fit(d, TreeParams{});
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(t.predict(d.row(i)) == d.label(i));
}

TEST_CASE("depth zero is the majority leaf and boundaries go left") {
    Dataset d(1);
    d.add(std::array{1.0}, DC::Close);
    d.add(std::array{2.0}, DC::Close);
    d.add(std::array{3.0}, DC::Safe);
    TreeParams p;
    p.max_depth = 0;
    const auto stump = DecisionTree::fit(d, p);
    CHECK(stump.leaf_count() == 1);
    CHECK(stump.predict(std::array{3.0}) == DC::Close);

    const auto t = DecisionTree::fit(d, TreeParams{});
    REQUIRE(t.root_split());
    CHECK(t.root_split()->threshold == 2.5);
    CHECK(t.predict(std::array{2.5}) == DC::Close);
    CHECK(t.predict(std::array{2.5000001}) == DC::Safe);
}

TEST_CASE("class ties favour the closer class") {
    CHECK(argmax_closer({0.5, 0.0, 0.5}) == DC::VeryClose);
    CHECK(argmax_closer({0.0, 0.5, 0.5}) == DC::Close);
    CHECK(argmax_closer({0.2, 0.3, 0.5}) == DC::Safe);
    Dataset d(1);
    d.add(std::array{1.0}, DC::Safe);
    d.add(std::array{1.0}, DC::VeryClose);
    CHECK(DecisionTree::fit(d, TreeParams{}).predict(std::array{1.0}) == DC::VeryClose);
}

TEST_CASE("forest voting") {
    auto leaf = [](DC c) {
        DecisionTree::Node n;
        n.counts[index_of(c)] = 1;
        return DecisionTree::from_nodes(1, {n});
    };
    const std::array x{0.0};
    CHECK(RandomForest::from_trees({leaf(DC::VeryClose), leaf(DC::VeryClose), leaf(DC::Safe)}).predict(x) ==
          DC::VeryClose);
    CHECK(RandomForest::from_trees({leaf(DC::Safe), leaf(DC::VeryClose)}).predict(x) == DC::VeryClose);
    CHECK(RandomForest::from_trees({leaf(DC::Safe), leaf(DC::Close), leaf(DC::Safe)}).votes(x) ==
          ClassCounts{0, 1, 2});
}

TEST_CASE("degenerate forest equals a tree") {
    Rng rng(8);
    const auto d = noisy_dataset(rng, 200, 4, 30);
    ForestParams fp;
    fp.n_trees = 1;
    fp.bootstrap = false;
    const auto forest = RandomForest::fit(d, fp);
    const auto tree = DecisionTree::fit(d, TreeParams{});
    CHECK(forest.trees().front() == tree);
    fp.n_trees = 5;
    fp.bootstrap = true;
    fp.seed = 3;
    CHECK(RandomForest::fit(d, fp) == RandomForest::fit(d, fp));
}

TEST_CASE("grid search picks the shallow tree when depth only fits noise") {
    Rng rng(31);
    auto make = [&](std::size_t n) {
        Dataset d(2);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = uniform_unit(rng), b = uniform_unit(rng);
            DC label = a < 0.33 ? DC::VeryClose : (a < 0.66 ? DC::Close : DC::Safe);
            if (uniform_unit(rng) < 0.2) label = class_at(uniform_index(rng, 3));
            d.add(std::array{a, b}, label);
        }
        return d;
    };
    const auto train = make(400), test = make(400);
    ParamGrid g;
    g.max_depth = {2, std::nullopt};
    g.min_samples_leaf = {1};
    const auto r = grid_search(ModelFamily::DecisionTree, g, train, test, 1);
    CHECK(r.table.size() == 2);
    CHECK(r.best.max_depth == std::optional<std::size_t>{2});

    ParamGrid single;
    single.max_depth = {3};
    single.min_samples_leaf = {5};
    const auto one = grid_search(ModelFamily::DecisionTree, single, train, test, 1);
    CHECK(one.table.size() == 1);
    CHECK(one.best.min_samples_leaf == 5);
}

TEST_CASE("hyper-parameter text round trip") {
    HyperParams hp{8, 5, 50, FeatureSubset::Sqrt};
    CHECK(HyperParams::parse(hp.to_string()) == hp);
    HyperParams unlimited{std::nullopt, 1, 1, FeatureSubset::All};
    CHECK(HyperParams::parse(unlimited.to_string()) == unlimited);
    CHECK(forest_params(hp, 5, 1).tree.features_per_split == 2);
}
