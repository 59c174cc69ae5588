#include <doctest.h>

#include <cmath>

#include "mcprox/propagation.hpp"
#include "mcprox/random.hpp"

using namespace mcprox;

TEST_CASE("log-normal shadowing mean curve") {
    LnsmParams p{40, 1, 2, 0};
    CHECK(lnsm_path_loss(1, p) == doctest::Approx(40));
    CHECK(lnsm_path_loss(10, p) == doctest::Approx(60));
    p.exponent = 3.5;
    CHECK(lnsm_path_loss(4, p) == doctest::Approx(40 + 35 * std::log10(4.0)));
}

TEST_CASE("log-normal shadowing sample mean") {
    LnsmParams p{45, 1, 2.5, 4};
    Rng rng(7);
    const int n = 10000;
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += lnsm_path_loss(3, p, standard_normal(rng));
    const double se = p.sigma_db / std::sqrt(double(n));
    CHECK(std::abs(sum / n - lnsm_path_loss(3, {45, 1, 2.5, 0})) < 3 * se);
}

TEST_CASE("two-ray ground model") {
    TrgParams p{1.5, 1.5, 2440, 0};
    const double dc = trg_crossover_distance(p);
    CHECK(trg_path_loss(4 * dc, p) - trg_path_loss(2 * dc, p) == doctest::Approx(40 * std::log10(2.0)));
    CHECK(std::abs(trg_path_loss(dc * (1 - 1e-9), p) - trg_path_loss(dc * (1 + 1e-9), p)) < 0.5);
    TrgParams q{1.0, 2.0, 2440, 0}, r{2.0, 1.0, 2440, 0};
    for (double d : {0.5, 5.0, 50.0, 500.0}) CHECK(trg_path_loss(d, q) == doctest::Approx(trg_path_loss(d, r)));
    CHECK(trg_path_loss(dc / 4, p) == doctest::Approx(free_space_path_loss(dc / 4, 2440)));
}

TEST_CASE("channel model sampling") {
    const auto prof = ChannelProfile::defaults();
    CHECK(&prof.of(SignalKind::Wifi5) == &prof.wifi5);
    // Higher carrier, more loss at the same distance.
    CHECK(prof.wifi5.mean_rssi(3, 5240) < prof.wifi5.mean_rssi(3, 5180));
    Rng rng(3);
    const int n = 20000;
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += prof.ble.sample_rssi(2.5, 0, rng);
    // Rounding to whole dBm adds at most 0.5 dB of bias.
    CHECK(std::abs(sum / n - prof.ble.mean_rssi(2.5)) < 3 * prof.ble.total_sigma() / std::sqrt(double(n)) + 0.5);
}
