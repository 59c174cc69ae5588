#include "mcprox/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "mcprox/error.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

namespace {

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
    throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

// Reads the header line and checks it exactly. Returns the line number reached.
std::size_t expect_header(std::istream& in, std::string_view source, std::string_view header) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = trim(line);
        if (view.empty()) continue;
        if (view != header) fail(source, lineno, "expected header \"" + std::string(header) + "\"");
        return lineno;
    }
    return lineno;  // empty file
}

int parse_rssi(std::string_view text, std::string_view source, std::size_t line) {
    const auto v = parse_int(text);
    if (!v) fail(source, line, "bad rssi \"" + std::string(text) + "\"");
    if (*v < kMinRssiDbm || *v > kMaxRssiDbm) fail(source, line, "rssi " + std::string(text) + " out of range");
    return static_cast<int>(*v);
}

template <typename RowFn>
ParsedLog parse_log(std::istream& in, std::string_view source, std::string_view header, std::size_t n_fields,
                    RowFn&& row_fn) {
    ParsedLog log;
    std::size_t lineno = expect_header(in, source, header);
    std::string line;
    std::int64_t last_t = INT64_MIN;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = trim(line);
        if (view.empty()) continue;
        const auto fields = split_fields(view);
        if (fields.size() != n_fields)
            fail(source, lineno, "expected " + std::to_string(n_fields) + " fields, got " +
                                     std::to_string(fields.size()));
        SignalRecord r = row_fn(fields, lineno);
        if (r.timestamp_us < last_t) log.out_of_order_lines.push_back(lineno);
        last_t = std::max(last_t, r.timestamp_us);
        log.records.push_back(std::move(r));
    }
    return log;
}

std::int64_t parse_timestamp(std::string_view text, std::string_view source, std::size_t line) {
    const auto v = parse_int(text);
    if (!v || *v < 0) fail(source, line, "bad timestamp \"" + std::string(text) + "\"");
    return *v;
}

MacAddress parse_address(std::string_view text, std::string_view source, std::size_t line) {
    const auto a = MacAddress::parse(trim(text));
    if (!a) fail(source, line, "bad address \"" + std::string(text) + "\"");
    return *a;
}

std::string parse_run(std::string_view text, std::string_view source, std::size_t line) {
    const auto run = trim(text);
    if (run.empty()) fail(source, line, "empty run_id");
    return std::string(run);
}

}  // namespace

ParsedLog parse_ble_log(std::istream& in, std::string_view source) {
    return parse_log(in, source, kBleLogHeader, 4, [&](const auto& f, std::size_t line) {
        SignalRecord r;
        r.timestamp_us = parse_timestamp(f[0], source, line);
        r.kind = SignalKind::Ble;
        r.address = parse_address(f[1], source, line);
        r.rssi_dbm = parse_rssi(f[2], source, line);
        r.run_id = parse_run(f[3], source, line);
        return r;
    });
}

ParsedLog parse_ble_log(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_ble_log(in, path.string());
}

ParsedLog parse_wifi_log(std::istream& in, std::string_view source) {
    return parse_log(in, source, kWifiLogHeader, 7, [&](const auto& f, std::size_t line) {
        SignalRecord r;
        r.timestamp_us = parse_timestamp(f[0], source, line);
        r.address = parse_address(f[1], source, line);
        r.rssi_dbm = parse_rssi(f[2], source, line);
        const auto freq = parse_int(f[3]);
        if (!freq) fail(source, line, "bad frequency \"" + std::string(f[3]) + "\"");
        const auto band = band_of_frequency(static_cast<int>(*freq));
        if (!band) fail(source, line, "frequency outside known bands (" + std::to_string(*freq) + " MHz)");
        r.kind = *band;
        r.frequency_mhz = static_cast<int>(*freq);
        ProbeCapabilities caps;
        try {
            caps.supported_rates = parse_rates(f[4]);
            caps.extended_capabilities = parse_hex(f[5]);
        } catch (const DataError& e) {
            fail(source, line, e.what());
        }
        r.capabilities = std::move(caps);
        r.run_id = parse_run(f[6], source, line);
        return r;
    });
}

ParsedLog parse_wifi_log(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_wifi_log(in, path.string());
}

void write_ble_log(std::ostream& out, const std::vector<SignalRecord>& records) {
    out << kBleLogHeader << '\n';
    for (const auto& r : records)
        out << r.timestamp_us << ',' << r.address.to_string() << ',' << r.rssi_dbm << ',' << r.run_id << '\n';
}

void write_wifi_log(std::ostream& out, const std::vector<SignalRecord>& records) {
    out << kWifiLogHeader << '\n';
    for (const auto& r : records) {
        const ProbeCapabilities empty;
        const auto& caps = r.capabilities ? *r.capabilities : empty;
        out << r.timestamp_us << ',' << r.address.to_string() << ',' << r.rssi_dbm << ','
            << r.frequency_mhz.value_or(0) << ',' << format_rates(caps.supported_rates) << ','
            << format_hex(caps.extended_capabilities) << ',' << r.run_id << '\n';
    }
}

std::vector<std::uint16_t> parse_rates(std::string_view text) {
    std::vector<std::uint16_t> rates;
    text = trim(text);
    if (text.empty()) return rates;
    for (auto tok : split_fields(text, ';')) {
        const auto mbps = parse_double(tok);
        if (!mbps || *mbps <= 0.0 || *mbps > 10000.0) throw DataError("bad rate \"" + std::string(tok) + "\"");
        const double units = *mbps * 2.0;
        if (std::abs(units - std::round(units)) > 1e-9)
            throw DataError("rate \"" + std::string(tok) + "\" is not a multiple of 0.5 Mb/s");
        rates.push_back(static_cast<std::uint16_t>(std::lround(units)));
    }
    return rates;
}

std::string format_rates(const std::vector<std::uint16_t>& rates, char delim) {
    std::string out;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (i) out.push_back(delim);
        out += std::to_string(rates[i] / 2);
        if (rates[i] % 2) out += ".5";
    }
    return out;
}

std::vector<std::uint8_t> parse_hex(std::string_view text) {
    text = trim(text);
    if (text.size() % 2) throw DataError("odd-length hex \"" + std::string(text) + "\"");
    std::vector<std::uint8_t> bytes;
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw DataError("bad hex \"" + std::string(text) + "\"");
    };
    for (std::size_t i = 0; i < text.size(); i += 2)
        bytes.push_back(static_cast<std::uint8_t>(nibble(text[i]) << 4 | nibble(text[i + 1])));
    return bytes;
}

std::string format_hex(const std::vector<std::uint8_t>& bytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (auto b : bytes) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xF]);
    }
    return out;
}

std::string_view to_string(Setup setup) { return setup == Setup::GroundTruth ? "ground_truth" : "scenario"; }

RunMetadata::RunMetadata(std::vector<RunPlacement> placements) : placements_(std::move(placements)) {
    std::set<std::pair<std::string, std::string>> seen;
    std::map<std::string, std::pair<std::string, Setup>> per_run;
    for (const auto& p : placements_) {
        if (!seen.emplace(p.run_id, p.device).second)
            throw DataError("duplicate metadata row for run " + p.run_id + ", device " + p.device);
        auto [it, fresh] = per_run.emplace(p.run_id, std::pair{p.environment, p.setup});
        if (!fresh && (it->second.first != p.environment || it->second.second != p.setup))
            throw DataError("run " + p.run_id + " has inconsistent environment or setup");
    }
}

RunMetadata RunMetadata::parse(std::istream& in, std::string_view source) {
    const auto table = CsvTable::read(in, source);
    const auto c_run = table.require("run_id");
    const auto c_dev = table.require("device");
    const auto c_env = table.require("environment");
    const auto c_dist = table.require("distance_cm");
    const auto c_setup = table.find("setup");

    std::vector<RunPlacement> placements;
    std::map<std::string, std::size_t> devices_per_run;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& row = table.row(i);
        const auto line = table.line_of(i);
        RunPlacement p;
        p.run_id = row[c_run];
        p.device = row[c_dev];
        p.environment = row[c_env];
        if (p.run_id.empty() || p.device.empty()) fail(source, line, "empty run_id or device");
        if (std::find(std::begin(kKnownEnvironments), std::end(kKnownEnvironments), p.environment) ==
            std::end(kKnownEnvironments))
            fail(source, line, "unknown environment \"" + p.environment + "\"");
        if (!row[c_dist].empty()) {
            const auto d = parse_double(row[c_dist]);
            if (!d || *d <= 0.0) fail(source, line, "bad distance_cm \"" + row[c_dist] + "\"");
            p.distance_cm = *d;
        }
        if (c_setup) {
            const auto& s = row[*c_setup];
            if (s == "ground_truth") p.setup = Setup::GroundTruth;
            else if (s == "scenario") p.setup = Setup::Scenario;
            else if (s.empty()) fail(source, line, "run " + p.run_id + " is not marked with a setup");
            else fail(source, line, "unknown setup \"" + s + "\"");
        }
        ++devices_per_run[p.run_id];
        placements.push_back(std::move(p));
    }
    if (!c_setup) {
        for (auto& p : placements)
            p.setup = (p.environment == "train" || devices_per_run[p.run_id] > 1) ? Setup::Scenario
                                                                                 : Setup::GroundTruth;
    }
    for (const auto& p : placements)
        if (p.setup == Setup::GroundTruth && !p.distance_cm)
            throw DataError(std::string(source) + ": ground-truth run " + p.run_id + " has no distance_cm");
    return RunMetadata(std::move(placements));
}

RunMetadata RunMetadata::read_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse(in, path.string());
}

void RunMetadata::write(std::ostream& out) const {
    out << "run_id,device,environment,distance_cm,setup\n";
    for (const auto& p : placements_)
        out << p.run_id << ',' << p.device << ',' << p.environment << ','
            << (p.distance_cm ? format_double(*p.distance_cm) : std::string()) << ',' << to_string(p.setup)
            << '\n';
}

const RunPlacement* RunMetadata::find(std::string_view run_id, std::string_view device) const {
    for (const auto& p : placements_)
        if (p.run_id == run_id && p.device == device) return &p;
    return nullptr;
}

std::vector<const RunPlacement*> RunMetadata::run(std::string_view run_id) const {
    std::vector<const RunPlacement*> out;
    for (const auto& p : placements_)
        if (p.run_id == run_id) out.push_back(&p);
    return out;
}

Setup RunMetadata::setup_of(std::string_view run_id) const {
    for (const auto& p : placements_)
        if (p.run_id == run_id) return p.setup;
    throw DataError("run " + std::string(run_id) + " is not listed in the run metadata");
}

}  // namespace mcprox
