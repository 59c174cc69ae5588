#include <doctest.h>

#include <sstream>

#include "mcprox/error.hpp"
#include "mcprox/ingest.hpp"

using namespace mcprox;

namespace {
std::string ble_text(const std::string& body) { return std::string(kBleLogHeader) + "\n" + body; }
std::string wifi_text(const std::string& body) { return std::string(kWifiLogHeader) + "\n" + body; }
}  // namespace

TEST_CASE("ble log line maps to a record") {
    std::istringstream in(ble_text("1618000000000000,AA:BB:CC:DD:EE:FF,-67,run1\n"));
    const auto log = parse_ble_log(in);
    REQUIRE(log.records.size() == 1);
    const auto& r = log.records[0];
    CHECK(r.timestamp_us == 1618000000000000);
    CHECK(r.address.to_string() == "AA:BB:CC:DD:EE:FF");
    CHECK(r.rssi_dbm == -67);
    CHECK(r.run_id == "run1");
    CHECK(r.kind == SignalKind::Ble);
}

TEST_CASE("ble log edge cases") {
    std::istringstream empty("");
    CHECK(parse_ble_log(empty).records.empty());
    std::istringstream header_only(ble_text(""));
    CHECK(parse_ble_log(header_only).records.empty());

    std::istringstream hot(ble_text("1,AA:BB:CC:DD:EE:FF,+30,run1\n"));
    CHECK_THROWS_AS(parse_ble_log(hot, "hot.csv"), DataError);
    std::istringstream bad_mac(ble_text("1,AA:BB:CC,-40,run1\n"));
    CHECK_THROWS_WITH_AS(parse_ble_log(bad_mac, "x.csv"), doctest::Contains("x.csv:2"), DataError);

    std::istringstream shuffled(ble_text("5,AA:BB:CC:DD:EE:FF,-40,r\n3,AA:BB:CC:DD:EE:FF,-41,r\n"));
    const auto log = parse_ble_log(shuffled);
    CHECK(log.records.size() == 2);
    CHECK(log.out_of_order_lines.size() == 1);
}

TEST_CASE("probe frequencies select the band") {
    std::istringstream in(wifi_text("1,02:00:00:00:00:01,-50,2437,1;2;5.5;11,0400,r\n"
                                    "2,02:00:00:00:00:01,-60,5180,12;24,,r\n"));
    const auto log = parse_wifi_log(in);
    REQUIRE(log.records.size() == 2);
    CHECK(log.records[0].kind == SignalKind::Wifi24);
    CHECK(log.records[1].kind == SignalKind::Wifi5);
    CHECK(log.records[0].capabilities->supported_rates == std::vector<std::uint16_t>{2, 4, 11, 22});
    CHECK(log.records[0].capabilities->extended_capabilities == std::vector<std::uint8_t>{0x04, 0x00});

    std::istringstream off(wifi_text("1,02:00:00:00:00:01,-50,3000,2,,r\n"));
    CHECK_THROWS_WITH_AS(parse_wifi_log(off), doctest::Contains("frequency outside known bands"), DataError);
}

TEST_CASE("logs round trip") {
    std::istringstream in(wifi_text("1,02:00:00:00:00:01,-50,2437,1;2;5.5;11,0400,r\n"));
    const auto a = parse_wifi_log(in).records;
    std::ostringstream out;
    write_wifi_log(out, a);
    std::istringstream again(out.str());
    CHECK(parse_wifi_log(again).records == a);
    CHECK(format_rates({2, 11}, '-') == "1-5.5");
}

TEST_CASE("run metadata") {
    std::istringstream in(
        "run_id,device,environment,distance_cm,setup\n"
        "r1,oneplus,office,100,ground_truth\n"
        "r2,oneplus,bus,,scenario\n"
        "r2,pi,bus,250,scenario\n");
    const auto m = RunMetadata::parse(in);
    CHECK(m.placements().size() == 3);
    CHECK(m.setup_of("r1") == Setup::GroundTruth);
    CHECK(m.setup_of("r2") == Setup::Scenario);
    CHECK(m.find("r2", "pi")->distance_cm == 250);
    CHECK(m.run("r2").size() == 2);

    std::istringstream no_setup(
        "run_id,device,environment,distance_cm\nr1,a,office,100\nr2,a,train,100\nr3,a,bus,50\nr3,b,bus,80\n");
    const auto inferred = RunMetadata::parse(no_setup);
    CHECK(inferred.setup_of("r1") == Setup::GroundTruth);
    CHECK(inferred.setup_of("r2") == Setup::Scenario);
    CHECK(inferred.setup_of("r3") == Setup::Scenario);

    std::istringstream missing("run_id,device,environment,distance_cm,setup\nr1,a,office,,ground_truth\n");
    CHECK_THROWS_AS(RunMetadata::parse(missing), DataError);
    std::istringstream unknown_env("run_id,device,environment,distance_cm\nr1,a,moon,10\n");
    CHECK_THROWS_AS(RunMetadata::parse(unknown_env), DataError);
}
