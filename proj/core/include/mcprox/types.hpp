#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mcprox {

enum class SignalKind { Ble, Wifi24, Wifi5 };

/// Ordered from most to least cautious: VeryClose < Close < Safe.
enum class DistanceClass : int { VeryClose = 0, Close = 1, Safe = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<DistanceClass, kNumClasses> kAllClasses = {
    DistanceClass::VeryClose, DistanceClass::Close, DistanceClass::Safe};

constexpr std::size_t index_of(DistanceClass c) { return static_cast<std::size_t>(c); }
constexpr DistanceClass class_at(std::size_t i) { return static_cast<DistanceClass>(static_cast<int>(i)); }

std::string_view to_string(SignalKind kind);
std::string_view to_string(DistanceClass c);
std::optional<DistanceClass> parse_distance_class(std::string_view text);

inline constexpr int kWifi24MinMhz = 2400;
inline constexpr int kWifi24MaxMhz = 2500;
inline constexpr int kWifi5MinMhz = 5150;
inline constexpr int kWifi5MaxMhz = 5900;
inline constexpr int kMinRssiDbm = -120;
inline constexpr int kMaxRssiDbm = 20;

/// Band of an 802.11 frequency, or nullopt when outside both bands.
std::optional<SignalKind> band_of_frequency(int mhz);

/// 48-bit link-layer address (randomized MAC or BLE AdvA).
class MacAddress {
public:
    constexpr MacAddress() = default;
    constexpr explicit MacAddress(std::uint64_t value) : value_(value & 0xFFFFFFFFFFFFULL) {}

    /// Parses "AA:BB:CC:DD:EE:FF" (case-insensitive, ':' or '-' separators).
    static std::optional<MacAddress> parse(std::string_view text);

    constexpr std::uint64_t value() const { return value_; }
    std::string to_string() const;

    /// Locally-administered bit, set on randomized addresses.
    constexpr bool is_locally_administered() const { return (value_ >> 40) & 0x02; }

    friend constexpr auto operator<=>(MacAddress, MacAddress) = default;

private:
    std::uint64_t value_ = 0;
};

/// Capability fields carried by a probe request, as logged.
struct ProbeCapabilities {
    std::vector<std::uint16_t> supported_rates;  // units of 500 kb/s, in log order
    std::vector<std::uint8_t> extended_capabilities;
    std::vector<std::string> other_ies;  // free-form IE summaries, parse order

    friend bool operator==(const ProbeCapabilities&, const ProbeCapabilities&) = default;
};

/// One received broadcast: a BLE advertisement or an 802.11 probe request.
struct SignalRecord {
    std::int64_t timestamp_us = 0;
    SignalKind kind = SignalKind::Ble;
    MacAddress address;
    int rssi_dbm = 0;
    std::optional<int> frequency_mhz;  // present iff kind != Ble
    std::optional<double> tx_power_dbm;
    std::string run_id;
    std::optional<ProbeCapabilities> capabilities;

    friend bool operator==(const SignalRecord&, const SignalRecord&) = default;
};

/// Throws DataError when the record violates the kind/frequency/RSSI invariants.
void validate(const SignalRecord& record);

/// One joint BLE + 2.4 GHz + 5 GHz feature row.
struct MatchedSample {
    std::string run_id;
    std::string device;
    std::string environment;
    std::optional<double> distance_cm;
    std::optional<DistanceClass> label;
    std::int64_t t_us = 0;
    int ble_rssi = 0;
    int wifi24_rssi = 0;
    int wifi24_freq = 0;
    int wifi5_rssi = 0;
    int wifi5_freq = 0;
    /// Per-device BLE correction (dB); applied inside the attenuation, never to ble_rssi.
    double ble_correction_db = 0.0;

    friend bool operator==(const MatchedSample&, const MatchedSample&) = default;
};

}  // namespace mcprox
