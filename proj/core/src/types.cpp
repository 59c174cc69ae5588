#include "mcprox/types.hpp"

#include <charconv>
#include <cstdio>

#include "mcprox/error.hpp"

namespace mcprox {

std::string_view to_string(SignalKind kind) {
    switch (kind) {
        case SignalKind::Ble: return "ble";
        case SignalKind::Wifi24: return "wifi24";
        case SignalKind::Wifi5: return "wifi5";
    }
    return "?";
}

std::string_view to_string(DistanceClass c) {
    switch (c) {
        case DistanceClass::VeryClose: return "very_close";
        case DistanceClass::Close: return "close";
        case DistanceClass::Safe: return "safe";
    }
    return "?";
}

std::optional<DistanceClass> parse_distance_class(std::string_view text) {
    for (auto c : kAllClasses)
        if (to_string(c) == text) return c;
    return std::nullopt;
}

std::optional<SignalKind> band_of_frequency(int mhz) {
    if (mhz >= kWifi24MinMhz && mhz <= kWifi24MaxMhz) return SignalKind::Wifi24;
    if (mhz >= kWifi5MinMhz && mhz <= kWifi5MaxMhz) return SignalKind::Wifi5;
    return std::nullopt;
}

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
    if (text.size() != 17) return std::nullopt;
    std::uint64_t value = 0;
    for (std::size_t octet = 0; octet < 6; ++octet) {
        const std::size_t pos = octet * 3;
        if (octet > 0 && text[pos - 1] != ':' && text[pos - 1] != '-') return std::nullopt;
        unsigned byte = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + 2, byte, 16);
        if (ec != std::errc{} || ptr != text.data() + pos + 2) return std::nullopt;
        value = (value << 8) | byte;
    }
    return MacAddress(value);
}

std::string MacAddress::to_string() const {
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02X:%02X:%02X:%02X:%02X:%02X", unsigned(value_ >> 40) & 0xFF,
                  unsigned(value_ >> 32) & 0xFF, unsigned(value_ >> 24) & 0xFF, unsigned(value_ >> 16) & 0xFF,
                  unsigned(value_ >> 8) & 0xFF, unsigned(value_) & 0xFF);
    return buf;
}

void validate(const SignalRecord& record) {
    if (record.rssi_dbm < kMinRssiDbm || record.rssi_dbm > kMaxRssiDbm)
        throw DataError("rssi " + std::to_string(record.rssi_dbm) + " dBm out of range");
    if (record.kind == SignalKind::Ble) {
        if (record.frequency_mhz) throw DataError("BLE record carries a frequency");
        return;
    }
    if (!record.frequency_mhz) throw DataError("802.11 record without frequency");
    if (band_of_frequency(*record.frequency_mhz) != record.kind)
        throw DataError("frequency " + std::to_string(*record.frequency_mhz) + " MHz does not match band " +
                        std::string(to_string(record.kind)));
}

}  // namespace mcprox
