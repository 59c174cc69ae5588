#include <doctest.h>

#include <sstream>

#include "mcprox/error.hpp"
#include "mcprox/matching.hpp"
#include "mcprox/synth.hpp"

using namespace mcprox;

namespace {
SignalRecord rec(SignalKind kind, double t_s, int rssi, int freq = 0) {
    SignalRecord r;
    r.kind = kind;
    r.timestamp_us = std::int64_t(t_s * 1e6);
    r.rssi_dbm = rssi;
    if (freq) r.frequency_mhz = freq;
    r.run_id = "r";
    return r;
}
}  // namespace

TEST_CASE("nearest probes inside the window") {
    std::vector<SignalRecord> ble{rec(SignalKind::Ble, 10.0, -60)};
    std::vector<SignalRecord> w24{rec(SignalKind::Wifi24, 9.2, -40, 2437)};
    std::vector<SignalRecord> w5{rec(SignalKind::Wifi5, 10.5, -55, 5180)};
    const MatchContext ctx{"r", "phone", "office", 100.0};
    auto res = match_signals(ble, w24, w5, ctx);
    REQUIRE(res.samples.size() == 1);
    const auto& s = res.samples[0];
    CHECK(s.ble_rssi == -60);
    CHECK(s.wifi24_rssi == -40);
    CHECK(s.wifi5_freq == 5180);
    CHECK(s.label == DistanceClass::VeryClose);

    std::vector<SignalRecord> far5{rec(SignalKind::Wifi5, 20.0, -55, 5180)};
    res = match_signals(ble, w24, far5, ctx);
    CHECK(res.samples.empty());
    CHECK(res.stats.dropped_missing_5 == 1);
}

TEST_CASE("equidistant probes resolve to the earlier one") {
    std::vector<SignalRecord> ble{rec(SignalKind::Ble, 10.0, -60)};
    std::vector<SignalRecord> w24{rec(SignalKind::Wifi24, 9.0, -41, 2412), rec(SignalKind::Wifi24, 11.0, -42, 2462)};
    std::vector<SignalRecord> w5{rec(SignalKind::Wifi5, 10.0, -55, 5180)};
    const auto res = match_signals(ble, w24, w5, {"r", "p", "office", std::nullopt});
    REQUIRE(res.samples.size() == 1);
    CHECK(res.samples[0].wifi24_rssi == -41);
    CHECK_FALSE(res.samples[0].label);
}

TEST_CASE("synthetic run matches every advertisement to its own probes") {
    SynthScenario sc;
    SynthRun run;
    run.run_id = "solo";
    auto dev = default_devices()[0];
    dev.distance_cm = 200;
    run.devices = {dev};
    sc.runs = {run};
    const auto out = generate_synthetic(sc);
    AssemblyOptions opt;
    opt.fingerprint_to_device = out.fingerprint_to_device;
    const auto res = assemble_matched(out.ble, out.wifi, out.metadata, opt);
    CHECK(res.samples.size() == out.ble.size());
    REQUIRE(res.runs.size() == 1);
    CHECK(res.runs[0].match.matched == out.ble.size());
    for (const auto& s : res.samples) {
        CHECK(s.device == dev.id);
        CHECK(s.distance_cm == 200);
    }
}

TEST_CASE("matched export round trip") {
    const auto rows = synthesize_matched(ChannelProfile::defaults(), "phone", "office", {50, 150, 400}, 334, 5);
    REQUIRE(rows.size() == 1002);
    std::ostringstream out;
    export_matched(out, rows);
    std::istringstream in(out.str());
    CHECK(import_matched(in) == rows);

    std::ostringstream empty;
    export_matched(empty, std::vector<MatchedSample>{});
    CHECK(empty.str() == std::string(kMatchedHeader) + "\n");

    // Drop the last column everywhere.
    std::istringstream full(out.str());
    std::string text, line;
    while (std::getline(full, line)) text += line.substr(0, line.rfind(',')) + "\n";
    std::istringstream broken(text);
    CHECK_THROWS_WITH_AS(import_matched(broken), doctest::Contains("wifi5_freq"), DataError);
}
