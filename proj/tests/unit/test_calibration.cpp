#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../support/oracles.hpp"
#include "mcprox/calibration.hpp"
#include "mcprox/error.hpp"
#include "mcprox/random.hpp"

using namespace mcprox;

namespace {

std::vector<ProfileEntry> to_entries(const std::vector<oracle::CalibEntry>& e) {
    std::vector<ProfileEntry> out;
    for (const auto& x : e) out.push_back({x.distance_cm, x.rssi, 1});
    return out;
}

MatchedSample row(const std::string& device, double d, int rssi) {
    MatchedSample s;
    s.device = device;
    s.environment = "office";
    s.distance_cm = d;
    s.ble_rssi = rssi;
    return s;
}

}  // namespace

TEST_CASE("profile means per distance") {
    std::vector<MatchedSample> rows{row("p", 100, -60), row("p", 100, -62), row("p", 200, -70)};
    const auto profiles = average_rssi_per_distance(rows, SignalKind::Ble);
    REQUIRE(profiles.size() == 1);
    REQUIRE(profiles[0].entries.size() == 2);
    CHECK(profiles[0].entries[0].mean_rssi_dbm == -61);
    CHECK(profiles[0].entries[0].count == 2);
    CHECK(profiles[0].entries[1].mean_rssi_dbm == -70);
}

TEST_CASE("already feasible single entry keeps zero correction") {
    // Attenuation at c = 0 is d_vc - 1.
    std::vector<ProfileEntry> e{{100, -54, 1}};
    const auto r = solve_device_correction(e, 0);
    CHECK(r.correction_db == 0);
    CHECK(r.objective == 0);
}

TEST_CASE("no very-close entry is infeasible") {
    std::vector<ProfileEntry> e{{200, -60, 1}};
    CHECK_THROWS_AS(solve_device_correction(e, 0), InfeasibleCalibration);
}

TEST_CASE("solver matches a brute-force grid") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<oracle::CalibEntry> e;
        const int n = 2 + int(uniform_index(rng, 10));
        e.push_back({50.0 + 50.0 * double(uniform_index(rng, 2)), -40.0 - 30.0 * uniform_unit(rng)});
        for (int i = 0; i < n; ++i)
            e.push_back({50.0 * double(1 + uniform_index(rng, 12)), -40.0 - 40.0 * uniform_unit(rng)});
        const double tx = double(uniform_index(rng, 10)) - 5;
        const auto r = solve_device_correction(to_entries(e), tx);
        const double lo = oracle::calibration_lower_bound(e, tx);
        CHECK(r.correction_db >= lo);
        const double f = oracle::calibration_objective(e, tx, r.correction_db);
        CHECK(f == doctest::Approx(r.objective).epsilon(1e-9));
        CHECK(f <= oracle::calibration_grid_min(e, tx, lo, 80, 0.01) + 1e-9);
        for (const auto& x : e)
            if (x.distance_cm < 150) CHECK(attenuation(tx, x.rssi, r.correction_db) < 55);
    }
}

TEST_CASE("translation equivariance") {
    std::vector<ProfileEntry> e{{50, -45, 1}, {100, -52, 1}, {200, -58, 1}, {300, -63, 1}, {400, -61, 1}};
    const double base = solve_device_correction(e, 0).correction_db;
    for (double delta : {-7.25, 0.5, 3.0, 12.125}) {
        auto shifted = e;
        for (auto& x : shifted) x.mean_rssi_dbm += delta;
        CHECK(std::abs(solve_device_correction(shifted, 0).correction_db - (base - delta)) <= 1e-9);
    }
}

TEST_CASE("flat optimum returns its midpoint") {
    // One close entry with base 60: zero penalty for c in [60 - 63, 60 - 55] = [-3, 5].
    std::vector<ProfileEntry> e{{100, -40, 1}, {200, -60, 1}};
    const auto r = solve_device_correction(e, 0);
    CHECK(r.optimum_lower == doctest::Approx(-3));
    CHECK(r.optimum_upper == doctest::Approx(5));
    CHECK(r.correction_db == doctest::Approx(1));
    // The very-close entry forces c >= 80 - 55.
    std::vector<ProfileEntry> forced{{100, -80, 1}};
    CHECK(solve_device_correction(forced, 0).correction_db == doctest::Approx(25 + kCalibrationEpsilonDb));
}

TEST_CASE("correction table io and application") {
    CorrectionTable t;
    t.set("iphone", 16.92);
    t.set("oneplus", -1.98);
    std::ostringstream out;
    t.write(out);
    std::istringstream in(out.str());
    CHECK(CorrectionTable::read(in) == t);

    std::vector<MatchedSample> rows{row("iphone", 100, -70)};
    const auto applied = apply_corrections(rows, t);
    CHECK(applied[0].ble_correction_db == 16.92);
    CHECK(attenuation(0, applied[0].ble_rssi, applied[0].ble_correction_db) == doctest::Approx(53.08));

    CorrectionTable zeros;
    zeros.set("iphone", 0);
    CHECK(apply_corrections(rows, zeros)[0].ble_correction_db == 0);

    rows.push_back(row("pi", 100, -70));
    CHECK_THROWS_WITH_AS(apply_corrections(rows, t), doctest::Contains("pi"), DataError);
}
