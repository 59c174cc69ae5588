#include "mcprox/fingerprint.hpp"

#include <algorithm>
#include <ostream>

#include "mcprox/error.hpp"
#include "mcprox/ingest.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

std::string ProbeFingerprint::key() const {
    std::string k = format_rates(supported_rates, '-');
    k += '_';
    k += format_hex(extended_capabilities);
    for (const auto& ie : other_ies) {
        k += '_';
        for (char c : ie) k += (c == ',' || c == '_') ? '.' : c;
    }
    return k;
}

ProbeFingerprint fingerprint_probe(const SignalRecord& record) {
    if (!record.capabilities || record.capabilities->supported_rates.empty())
        throw DataError("unfingerprintable record");
    ProbeFingerprint fp;
    fp.supported_rates = record.capabilities->supported_rates;
    std::sort(fp.supported_rates.begin(), fp.supported_rates.end());
    fp.extended_capabilities = record.capabilities->extended_capabilities;
    fp.other_ies = record.capabilities->other_ies;
    std::sort(fp.other_ies.begin(), fp.other_ies.end());
    return fp;
}

WifiGrouping group_wifi_by_device(std::span<const SignalRecord> records,
                                  const std::map<std::string, std::string>& fingerprint_to_device) {
    WifiGrouping g;
    for (const auto& r : records) {
        const auto key = fingerprint_probe(r).key();
        if (auto it = fingerprint_to_device.find(key); it != fingerprint_to_device.end()) {
            g.by_device[it->second].push_back(r);
        } else {
            g.unknown.push_back(r);
            ++g.unknown_fingerprints[key];
        }
    }
    return g;
}

std::map<std::string, std::string> read_fingerprint_table(const std::filesystem::path& path) {
    const auto table = CsvTable::read_file(path);
    const auto c_fp = table.require("fingerprint");
    const auto c_dev = table.require("device");
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& row = table.row(i);
        if (!out.emplace(row[c_fp], row[c_dev]).second)
            throw DataError(path.string() + ":" + std::to_string(table.line_of(i)) + ": duplicate fingerprint");
    }
    return out;
}

void write_fingerprint_table(std::ostream& out, const std::map<std::string, std::string>& table) {
    out << "fingerprint,device\n";
    for (const auto& [fp, device] : table) out << fp << ',' << device << '\n';
}

}  // namespace mcprox
