#include <doctest.h>

#include <sstream>

#include "mcprox/error.hpp"
#include "mcprox/model_io.hpp"
#include "mcprox/roster.hpp"
#include "mcprox/synth.hpp"
#include "../support/oracles.hpp"

using namespace mcprox;
using DC = DistanceClass;

namespace {

PreparedDataset small_prepared(std::uint64_t seed) {
    const std::vector<double> d{50, 100, 200, 300, 400, 500};
    PreparedDataset p;
    p.train = synthesize_matched(ChannelProfile::defaults(), "p", "office", d, 60, seed);
    p.test = synthesize_matched(ChannelProfile::defaults(), "p", "office", d, 20, seed + 1);
    p.eval = synthesize_matched(ChannelProfile::defaults(), "p", "office", d, 20, seed + 2);
    return p;
}

RosterOptions small_options() {
    RosterOptions o;
    o.grid.max_depth = {4, std::nullopt};
    o.grid.min_samples_leaf = {1};
    o.grid.n_trees = {5};
    o.grid.features = {FeatureSubset::Sqrt};
    return o;
}

}  // namespace

TEST_CASE("roster layout") {
    CHECK(roster_specs().size() == 13);
    CHECK(roster_spec(8).components == std::array{2, 4, 6});
    CHECK(roster_spec(11).components == std::array{3, 5, 7});
    CHECK(roster_spec(1).kind == ModelKind::BleThreshold);
    CHECK(roster_spec(13).features == FeatureSet::Full);
    CHECK_THROWS(roster_spec(14));
}

TEST_CASE("weighted combination") {
    CHECK(combine_specialized(DC::VeryClose, DC::VeryClose, DC::Safe, kBandWeighted) == DC::VeryClose);
    CHECK(combine_specialized(DC::VeryClose, DC::Close, DC::Safe, kBandWeighted) == DC::Safe);
    for (const auto& w : {kUnweighted, kBandWeighted, CombineWeights{0.1, 0.2, 0.7}})
        CHECK(combine_specialized(DC::Close, DC::Close, DC::Close, w) == DC::Close);
    CHECK_THROWS(combine_specialized(DC::Close, DC::Close, DC::Close, CombineWeights{0.5, 0.5, 0.5}));
}

TEST_CASE("threshold model applies the correction") {
    ThresholdModel m{{}, 0, 16.92};
    MatchedSample s;
    s.ble_rssi = -70;  // attenuation 53.08
    CHECK(m.predict(s) == DC::VeryClose);
    m.correction_db = 0;
    CHECK(m.predict(s) == DC::Safe);
}

TEST_CASE("model 1 needs corrections") {
    const auto p = small_prepared(1);
    auto opt = small_options();
    opt.models = {1};
    CHECK_THROWS_AS(build_roster(p, "p", nullptr, opt), ConfigError);
}

TEST_CASE("combiners pull in their components and models persist") {
    const auto p = small_prepared(4);
    CorrectionTable corr;
    corr.set("p", 0);
    auto opt = small_options();
    opt.models = {1, 8, 13};
    const auto r = build_roster(p, "p", &corr, opt);
    for (int n : {1, 2, 4, 6, 8, 13}) CHECK(r.roster.has(n));
    CHECK_FALSE(r.roster.has(3));
    CHECK_FALSE(r.roster.available(10));
    for (const auto& s : p.eval) {
        const auto expect = combine_specialized(r.roster.predict(2, s), r.roster.predict(4, s),
                                                r.roster.predict(6, s), kUnweighted);
        CHECK(r.roster.predict(8, s) == expect);
    }

    oracle::TempDir dir("roster");
    save_roster(dir.path(), r.roster, "abc");
    const auto back = load_roster(dir.path(), "p");
    for (int n = 1; n <= 13; ++n) {
        REQUIRE(back.has(n) == r.roster.has(n));
        if (!back.has(n)) continue;
        for (const auto& s : p.eval) CHECK(back.predict(n, s) == r.roster.predict(n, s));
    }
    std::ostringstream a, b;
    write_model(a, r.roster.at(13), "p", "abc");
    write_model(b, back.at(13), "p", "abc");
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("mcprox-model 1\n", 0) == 0);

    std::istringstream bad("mcprox-model 99\n");
    CHECK_THROWS_AS(read_model(bad), DataError);
}

TEST_CASE("full-feature forest beats the threshold baseline on synthetic data") {
    const auto p = small_prepared(9);
    CorrectionTable corr;
    corr.set("p", 0);
    auto opt = small_options();
    opt.models = {1, 13};
    const auto r = build_roster(p, "p", &corr, opt);
    CHECK(accuracy(evaluate_model(r.roster, 13, p.eval)) > accuracy(evaluate_model(r.roster, 1, p.eval)));
}
