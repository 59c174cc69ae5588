#include <doctest.h>

#include <vector>

#include "mcprox/signal_model.hpp"

using namespace mcprox;

TEST_CASE("attenuation subtracts corrected rssi from tx power") {
    CHECK(attenuation(0, -55, 0) == 55);
    CHECK(attenuation(8, -60, 5) == 63);
    CHECK(attenuation(0, -70, 16.92) == doctest::Approx(53.08));
}

TEST_CASE("attenuation classes use strict thresholds") {
    CHECK(classify_attenuation(54) == DistanceClass::VeryClose);
    CHECK(classify_attenuation(55) == DistanceClass::Close);
    CHECK(classify_attenuation(62.999) == DistanceClass::Close);
    CHECK(classify_attenuation(63) == DistanceClass::Safe);
    CHECK(classify_attenuation(70) == DistanceClass::Safe);
    CHECK(classify_attenuation(60, AttenuationThresholds(61, 70)) == DistanceClass::VeryClose);
    CHECK_THROWS(AttenuationThresholds(63, 55));
}

TEST_CASE("scan window statistics") {
    std::vector<double> a{60, 58, 64};
    auto s = scan_window_stats(a, 4);
    CHECK(s.min_attenuation_db == 58);
    CHECK(s.avg_attenuation_db == doctest::Approx(60.6667).epsilon(1e-4));
    CHECK(s.duration_s == 4);

    std::vector<double> one{55};
    s = scan_window_stats(one, 1);
    CHECK(s.min_attenuation_db == 55);
    CHECK(s.avg_attenuation_db == 55);

    std::vector<double> flat{70, 70, 70};
    s = scan_window_stats(flat, 2);
    CHECK(s.min_attenuation_db == 70);
    CHECK(s.avg_attenuation_db == 70);

    CHECK_THROWS_WITH(scan_window_stats(std::vector<double>{}, 1), "empty scan window");
}

TEST_CASE("exposure score and warning") {
    CHECK(exposure_score({15, 0}) == 15);
    CHECK(exposure_score({0, 0}) == 0);
    CHECK(exposure_score({10, 8}) == 14);
    CHECK(should_warn(15));
    CHECK_FALSE(should_warn(14.99));
    CHECK_FALSE(should_warn(0));
    CHECK_THROWS(should_warn(-1));
}

TEST_CASE("ground truth classes from distance") {
    CHECK(distance_to_class(149) == DistanceClass::VeryClose);
    CHECK(distance_to_class(150) == DistanceClass::Close);
    CHECK(distance_to_class(300) == DistanceClass::Close);
    CHECK(distance_to_class(301) == DistanceClass::Safe);
    CHECK_THROWS(distance_to_class(0));
}

TEST_CASE("exposure accumulates window minutes by class") {
    std::vector<ScanWindowStats> w{{50, 56, 300}, {58, 58, 300}, {70, 70, 300}};
    auto d = accumulate_exposure(w);
    CHECK(d.very_close_min == 5);
    CHECK(d.close_min == 5);
    d = accumulate_exposure(w, {}, WindowAggregate::Average);
    CHECK(d.very_close_min == 0);
    CHECK(d.close_min == 10);

    // Fifteen minutes below 55 dB is exactly the warning level.
    std::vector<ScanWindowStats> near{{40, 40, 300}, {41, 41, 300}, {54, 54, 300}};
    CHECK(should_warn(exposure_score(accumulate_exposure(near))));
}
