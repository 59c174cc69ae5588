#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "mcprox/error.hpp"
#include "mcprox/synth.hpp"

using namespace mcprox;

TEST_CASE("address rolls follow the configured period") {
    SynthScenario sc;
    SynthRun run;
    run.run_id = "long";
    run.duration_s = 1800;
    auto dev = default_devices()[0];
    dev.distance_cm = 100;
    dev.ble_interval_s = 5;
    run.devices = {dev};
    sc.runs = {run};
    CHECK(generate_synthetic(sc).truth.size() == 3);

    sc.runs[0].devices[0].roll_period_s = 0;
    const auto none = generate_synthetic(sc);
    CHECK(none.truth.size() == 1);
    for (const auto& r : none.ble) CHECK(r.address == none.ble.front().address);
}

TEST_CASE("generated rssi follows the channel model") {
    const auto prof = ChannelProfile::defaults();
    const std::size_t n = 4000;
    const auto rows = synthesize_matched(prof, "p", "office", {100, 400}, n, 17);
    std::map<double, double> sum;
    for (const auto& r : rows) sum[*r.distance_cm] += r.ble_rssi;
    for (double d : {100.0, 400.0}) {
        const double se = prof.ble.total_sigma() / std::sqrt(double(n));
        CHECK(std::abs(sum[d] / double(n) - prof.ble.mean_rssi(d / 100)) < 3 * se + 0.5);
    }
}

TEST_CASE("output is deterministic and sorted") {
    CampaignOptions o;
    o.environments = {"office"};
    o.seconds_per_distance = 10;
    o.scenario_duration_s = 20;
    const auto a = generate_synthetic(default_campaign(o));
    const auto b = generate_synthetic(default_campaign(o));
    CHECK(a.ble == b.ble);
    CHECK(a.wifi == b.wifi);
    for (std::size_t i = 1; i < a.ble.size(); ++i) CHECK(a.ble[i - 1].timestamp_us <= a.ble[i].timestamp_us);
    CHECK(a.metadata.setup_of("train-scenario") == Setup::Scenario);
    CHECK(a.metadata.setup_of("office-pi-400") == Setup::GroundTruth);
    for (const auto& r : a.wifi) CHECK(r.address.is_locally_administered());
}

TEST_CASE("scenario file") {
    std::istringstream in(R"({
      "seed": 3,
      "runs": [{"run_id": "desk", "environment": "office", "setup": "scenario", "duration_s": 30,
                "receiver": [0, 0],
                "devices": [{"id": "oneplus", "position": [3, 4]},
                            {"id": "tag", "distance_cm": 120, "rates": [1, 2], "roll_period_s": 10}]}]
    })");
    const auto sc = parse_scenario(in);
    REQUIRE(sc.runs.size() == 1);
    CHECK(device_distance_cm(sc.runs[0], sc.runs[0].devices[0]) == doctest::Approx(500));
    CHECK(sc.runs[0].devices[1].capabilities.supported_rates == std::vector<std::uint16_t>{2, 4});
    const auto out = generate_synthetic(sc);
    CHECK(out.fingerprint_to_device.size() == 2);

    std::istringstream bad(R"({"runs": [{"run_id": "x", "devices": [{"id": "nobody"}]}]})");
    CHECK_THROWS_AS(parse_scenario(bad), DataError);
    std::istringstream broken("{");
    CHECK_THROWS_AS(parse_scenario(broken), DataError);
}
