#include <doctest.h>

#include <map>
#include <set>

#include "mcprox/dataset_prep.hpp"
#include "mcprox/error.hpp"
#include "mcprox/signal_model.hpp"
#include "mcprox/synth.hpp"

using namespace mcprox;

namespace {

MatchedSample labeled(double d, const std::string& env = "office", int tag = 0) {
    MatchedSample s;
    s.device = "p";
    s.environment = env;
    s.run_id = env + std::to_string(int(d));
    s.distance_cm = d;
    s.label = distance_to_class(d);
    s.t_us = tag;
    return s;
}

std::vector<MatchedSample> grid(std::map<double, int> sizes, const std::string& env = "office") {
    std::vector<MatchedSample> out;
    int tag = 0;
    for (auto [d, n] : sizes)
        for (int i = 0; i < n; ++i) out.push_back(labeled(d, env, tag++));
    return out;
}

}  // namespace

TEST_CASE("upsampling fills cells to the target") {
    const auto rows = grid({{100, 10}, {200, 10}, {400, 10}});
    Rng rng(1);
    auto pool = upsample_balance(rows, 10, rng);
    CHECK(pool.size() == 30);
    CHECK(std::set<std::size_t>(pool.begin(), pool.end()).size() == 30);

    const auto small = grid({{100, 3}, {200, 9}, {400, 9}});
    pool = upsample_balance(small, 9, rng);
    std::map<double, std::set<std::size_t>> seen;
    std::map<double, int> count;
    for (auto i : pool) {
        seen[*small[i].distance_cm].insert(i);
        ++count[*small[i].distance_cm];
    }
    CHECK(count[100] == 9);
    CHECK(seen[100].size() == 3);  // every original appears, nothing foreign
    for (auto i : pool) CHECK(i < small.size());

    const auto missing = grid({{100, 3}, {200, 3}});
    CHECK_THROWS_AS(upsample_balance(missing, 3, rng), DataError);
}

TEST_CASE("stratified sample keeps distance proportions") {
    const auto rows = grid({{50, 20}, {100, 10}, {200, 3}, {400, 3}});
    std::vector<std::size_t> pool(rows.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    const auto s = stratified_class_sample(rows, pool, 3, 7);
    std::map<double, int> per;
    for (auto i : s) ++per[*rows[i].distance_cm];
    CHECK(per[50] == 2);
    CHECK(per[100] == 1);
    CHECK(s == stratified_class_sample(rows, pool, 3, 7));
    CHECK_THROWS_AS(stratified_class_sample(rows, pool, 4, 7), DataError);
}

TEST_CASE("split sizes and stratification") {
    const auto rows = grid({{100, 10}});
    std::vector<std::size_t> idx(10);
    for (std::size_t i = 0; i < 10; ++i) idx[i] = i;
    const auto sp = split_train_test_eval(rows, idx, 3);
    CHECK(sp.train.size() == 6);
    CHECK(sp.test.size() == 2);
    CHECK(sp.eval.size() == 2);
    const auto again = split_train_test_eval(rows, idx, 3);
    CHECK(sp.train == again.train);

    const auto mixed = grid({{100, 50}, {200, 30}, {400, 20}});
    std::vector<std::size_t> all(mixed.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto ms = split_train_test_eval(mixed, all, 9);
    std::map<DistanceClass, int> in_test;
    for (auto i : ms.test) ++in_test[*mixed[i].label];
    CHECK(std::abs(in_test[DistanceClass::VeryClose] - 10) <= 1);
    CHECK(std::abs(in_test[DistanceClass::Close] - 6) <= 1);
    CHECK(std::abs(in_test[DistanceClass::Safe] - 4) <= 1);
}

TEST_CASE("scenario runs are held out") {
    auto rows = grid({{100, 2}, {200, 2}});
    auto train = labeled(100, "train");
    rows.push_back(train);
    std::vector<RunPlacement> p{{"office100", "p", "office", 100, Setup::GroundTruth},
                                {"office200", "p", "office", 200, Setup::Scenario},
                                {"train100", "p", "train", 100, Setup::GroundTruth}};
    const auto h = holdout_scenarios(rows, RunMetadata(p));
    CHECK(h.ground_truth.size() == 2);
    CHECK(h.scenario.size() == 3);
    for (const auto& s : h.ground_truth) CHECK(s.environment != "train");
}

TEST_CASE("prepared dataset is balanced and reproducible") {
    std::vector<MatchedSample> rows;
    for (const auto* env : {"office", "bus"}) {
        const auto part = synthesize_matched(ChannelProfile::defaults(), "p", env, {50, 100, 200, 300, 400, 500}, 40, 3);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    PrepOptions opt;
    opt.n_per_class = 200;
    const auto a = prepare_dataset(rows, opt);
    const auto b = prepare_dataset(rows, opt);
    CHECK(a.train == b.train);
    CHECK(a.eval == b.eval);
    std::map<DistanceClass, int> per;
    for (const auto* part : {&a.train, &a.test, &a.eval})
        for (const auto& s : *part) ++per[*s.label];
    CHECK(per[DistanceClass::VeryClose] == 200);
    CHECK(per[DistanceClass::Close] == 200);
    CHECK(per[DistanceClass::Safe] == 200);
    CHECK(a.train.size() == 360);

    opt.split_first = true;
    const auto c = prepare_dataset(rows, opt);
    CHECK(c.leaked_rows == 0);
    CHECK(c.train.size() + c.test.size() + c.eval.size() == 600);
}
