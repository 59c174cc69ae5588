#include "mcprox/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "mcprox/error.hpp"
#include "mcprox/fingerprint.hpp"
#include "mcprox/signal_model.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

namespace {

MacAddress random_address(Rng& rng) {
    std::uint64_t v = rng() & 0xFFFFFFFFFFFFULL;
    v |= 0x020000000000ULL;   // locally administered
    v &= ~0x010000000000ULL;  // unicast
    return MacAddress(v);
}

std::int64_t at_us(const SynthRun& run, double t_s) { return run.start_us + std::llround(t_s * 1e6); }

void emit_ble(const SynthRun& run, const SynthDevice& dev, const ChannelProfile& profile, Rng& rng,
              SynthOutput& out, bool record_first_address) {
    const double d_m = device_distance_cm(run, dev) / 100.0;
    ChannelModel ble = profile.ble;
    ble.tx_power_dbm += dev.ble_tx_offset_db;

    double t = uniform_unit(rng) * dev.ble_interval_s;
    double next_roll = dev.roll_offset_s + dev.roll_period_s;
    TruthSegment seg{run.run_id, dev.id, random_address(rng), -1, -1};
    if (record_first_address) out.ble_address_to_device[seg.address.to_string()] = dev.id;
    auto close_segment = [&] {
        if (seg.first_us >= 0) out.truth.push_back(seg);
    };
    while (t < run.duration_s) {
        if (dev.roll_period_s > 0 && t >= next_roll) {
            close_segment();
            seg = {run.run_id, dev.id, random_address(rng), -1, -1};
            next_roll += dev.roll_period_s;
        }
        const int rssi = ble.sample_rssi(d_m, 0, rng);
        const bool lost = dev.ble_loss > 0 && uniform_unit(rng) < dev.ble_loss;
        if (!lost) {
            SignalRecord r;
            r.timestamp_us = at_us(run, t);
            r.kind = SignalKind::Ble;
            r.address = seg.address;
            r.rssi_dbm = rssi;
            r.run_id = run.run_id;
            if (seg.first_us < 0) seg.first_us = r.timestamp_us;
            seg.last_us = r.timestamp_us;
            out.ble.push_back(std::move(r));
        }
        t += dev.ble_interval_s + 0.01 * uniform_unit(rng);
    }
    close_segment();
}

void emit_probes(const SynthRun& run, const SynthDevice& dev, const ChannelProfile& profile, Rng& rng,
                 SynthOutput& out) {
    const double d_m = device_distance_cm(run, dev) / 100.0;
    double t = uniform_unit(rng) * dev.probe_interval_s;
    while (t < run.duration_s) {
        const auto mac = random_address(rng);
        double offset = 0.0;
        for (const auto* model : {&profile.wifi24, &profile.wifi5}) {
            for (int freq : model->channels_mhz) {
                SignalRecord r;
                r.timestamp_us = at_us(run, t + offset);
                r.kind = *band_of_frequency(freq);
                r.address = mac;
                r.rssi_dbm = model->sample_rssi(d_m, freq, rng);
                r.frequency_mhz = freq;
                r.run_id = run.run_id;
                r.capabilities = dev.capabilities;
                out.wifi.push_back(std::move(r));
                offset += 0.02;
            }
        }
        t += dev.probe_interval_s * (0.9 + 0.2 * uniform_unit(rng));
    }
}

ProbeCapabilities caps(std::vector<double> rates_mbps, std::string_view ext_hex) {
    ProbeCapabilities c;
    for (double r : rates_mbps) c.supported_rates.push_back(static_cast<std::uint16_t>(std::lround(r * 2)));
    c.extended_capabilities = parse_hex(ext_hex);
    return c;
}

}  // namespace

double device_distance_cm(const SynthRun& run, const SynthDevice& device) {
    if (device.distance_cm) return *device.distance_cm;
    if (device.position_m) {
        const double dx = device.position_m->first - run.receiver_m.first;
        const double dy = device.position_m->second - run.receiver_m.second;
        return 100.0 * std::hypot(dx, dy);
    }
    throw DataError("device " + device.id + " has neither a distance nor a position");
}

SynthOutput generate_synthetic(const SynthScenario& scenario) {
    SynthOutput out;
    std::vector<RunPlacement> placements;
    for (std::size_t r = 0; r < scenario.runs.size(); ++r) {
        const auto& run = scenario.runs[r];
        for (std::size_t d = 0; d < run.devices.size(); ++d) {
            const auto& dev = run.devices[d];
            const double dist = device_distance_cm(run, dev);
            if (!(dist > 0.0)) throw DataError("device " + dev.id + " sits on the receiver in run " + run.run_id);
            Rng rng(mix_seed(scenario.seed, (r << 16) | d));
            emit_ble(run, dev, scenario.profile, rng, out, run.setup == Setup::Scenario);
            emit_probes(run, dev, scenario.profile, rng, out);
            placements.push_back({run.run_id, dev.id, run.environment, std::round(dist * 1e6) / 1e6, run.setup});
            SignalRecord probe;
            probe.capabilities = dev.capabilities;
            out.fingerprint_to_device[fingerprint_probe(probe).key()] = dev.id;
        }
    }
    auto by_time = [](const SignalRecord& a, const SignalRecord& b) { return a.timestamp_us < b.timestamp_us; };
    std::stable_sort(out.ble.begin(), out.ble.end(), by_time);
    std::stable_sort(out.wifi.begin(), out.wifi.end(), by_time);
    out.metadata = RunMetadata(std::move(placements));
    return out;
}

std::vector<SynthDevice> default_devices() {
    std::vector<SynthDevice> devices(3);
    devices[0].id = "oneplus";
    devices[0].ble_tx_offset_db = 2.0;
    devices[0].capabilities = caps({1, 2, 5.5, 11, 6, 9, 12, 18, 24, 36, 48, 54}, "0400000000000040");
    devices[1].id = "iphone";
    devices[1].ble_tx_offset_db = -17.0;
    devices[1].capabilities = caps({1, 2, 5.5, 11, 6, 9, 12, 18, 24, 36, 48, 54}, "0400080000000040");
    devices[2].id = "pi";
    devices[2].ble_tx_offset_db = -19.5;
    devices[2].capabilities = caps({1, 2, 5.5, 11, 6, 9, 12, 18}, "00");
    return devices;
}

SynthScenario default_campaign(const CampaignOptions& options) {
    SynthScenario scenario;
    scenario.seed = options.seed;
    const auto devices = default_devices();
    std::int64_t start = 1'600'000'000'000'000;
    auto next_start = [&](double duration_s) {
        const auto s = start;
        start += std::llround((duration_s + 60.0) * 1e6);
        return s;
    };

    for (const auto& env : options.environments) {
        if (env == "train") continue;  // scenario-only environment
        std::vector<double> distances;
        for (int d = 50; d <= 400; d += 50) distances.push_back(d);
        if (env != "office") distances.insert(distances.end(), {500, 600});
        for (const auto& base : devices) {
            for (double d : distances) {
                SynthRun run;
                run.run_id = env + "-" + base.id + "-" + std::to_string(int(d));
                run.environment = env;
                run.setup = Setup::GroundTruth;
                run.duration_s = options.seconds_per_distance;
                run.start_us = next_start(run.duration_s);
                SynthDevice dev = base;
                dev.distance_cm = d;
                dev.roll_period_s = 45.0;
                run.devices.push_back(std::move(dev));
                scenario.runs.push_back(std::move(run));
            }
        }
    }

    if (options.scenario_runs) {
        Rng rng(mix_seed(options.seed, 0xC0FFEE));
        std::vector<std::string> envs = options.environments;
        if (std::find(envs.begin(), envs.end(), "train") == envs.end()) envs.push_back("train");
        for (const auto& env : envs) {
            SynthRun run;
            run.run_id = env + "-scenario";
            run.environment = env;
            run.setup = Setup::Scenario;
            run.duration_s = options.scenario_duration_s;
            run.start_us = next_start(run.duration_s);
            for (const auto& base : devices) {
                SynthDevice dev = base;
                dev.distance_cm = 50.0 * double(1 + uniform_index(rng, 8));
                dev.roll_period_s = 40.0 + 10.0 * double(uniform_index(rng, 3));
                dev.roll_offset_s = 20.0 * uniform_unit(rng);
                run.devices.push_back(std::move(dev));
            }
            scenario.runs.push_back(std::move(run));
        }
    }
    return scenario;
}

namespace {

using nlohmann::json;

void read_channel(const json& j, ChannelModel& m) {
    m.lnsm.pl0_db = j.value("pl0", m.lnsm.pl0_db);
    m.lnsm.d0_m = j.value("d0", m.lnsm.d0_m);
    m.lnsm.exponent = j.value("exponent", m.lnsm.exponent);
    m.lnsm.sigma_db = j.value("sigma", m.lnsm.sigma_db);
    m.interference_sigma_db = j.value("interference", m.interference_sigma_db);
    m.tx_power_dbm = j.value("tx_power", m.tx_power_dbm);
    m.reference_mhz = j.value("reference_mhz", m.reference_mhz);
    if (j.contains("channels")) m.channels_mhz = j.at("channels").get<std::vector<int>>();
}

SynthDevice read_device(const json& j) {
    SynthDevice d;
    d.id = j.at("id").get<std::string>();
    for (const auto& known : default_devices())
        if (known.id == d.id) d = known;
    if (j.contains("distance_cm")) d.distance_cm = j.at("distance_cm").get<double>();
    if (j.contains("position")) {
        const auto p = j.at("position").get<std::vector<double>>();
        if (p.size() != 2) throw DataError("device position must be [x, y]");
        d.position_m = std::pair{p[0], p[1]};
    }
    d.ble_tx_offset_db = j.value("ble_tx_offset_db", d.ble_tx_offset_db);
    d.roll_period_s = j.value("roll_period_s", d.roll_period_s);
    d.roll_offset_s = j.value("roll_offset_s", d.roll_offset_s);
    d.ble_interval_s = j.value("ble_interval_s", d.ble_interval_s);
    d.probe_interval_s = j.value("probe_interval_s", d.probe_interval_s);
    d.ble_loss = j.value("ble_loss", d.ble_loss);
    if (j.contains("rates")) d.capabilities = caps(j.at("rates").get<std::vector<double>>(), j.value("ext_caps", ""));
    if (d.capabilities.supported_rates.empty()) throw DataError("device " + d.id + " needs \"rates\"");
    return d;
}

}  // namespace

SynthScenario parse_scenario(std::istream& in, std::string_view source) {
    SynthScenario s;
    try {
        const auto j = json::parse(in);
        s.seed = j.value("seed", s.seed);
        if (j.contains("profile")) {
            const auto& p = j.at("profile");
            if (p.contains("ble")) read_channel(p.at("ble"), s.profile.ble);
            if (p.contains("wifi24")) read_channel(p.at("wifi24"), s.profile.wifi24);
            if (p.contains("wifi5")) read_channel(p.at("wifi5"), s.profile.wifi5);
        }
        std::int64_t start = 1'600'000'000'000'000;
        for (const auto& jr : j.at("runs")) {
            SynthRun run;
            run.run_id = jr.at("run_id").get<std::string>();
            run.environment = jr.value("environment", run.environment);
            const auto setup = jr.value("setup", std::string("ground_truth"));
            if (setup == "scenario") run.setup = Setup::Scenario;
            else if (setup != "ground_truth") throw DataError("unknown setup \"" + setup + "\"");
            run.duration_s = jr.value("duration_s", run.duration_s);
            run.start_us = jr.value("start_us", start);
            start = run.start_us + std::llround((run.duration_s + 60.0) * 1e6);
            if (jr.contains("receiver")) {
                const auto p = jr.at("receiver").get<std::vector<double>>();
                if (p.size() != 2) throw DataError("receiver must be [x, y]");
                run.receiver_m = {p[0], p[1]};
            }
            for (const auto& jd : jr.at("devices")) run.devices.push_back(read_device(jd));
            s.runs.push_back(std::move(run));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string(source) + ": " + e.what());
    }
    return s;
}

SynthScenario load_scenario(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_scenario(in, path.string());
}

std::vector<MatchedSample> synthesize_matched(const ChannelProfile& profile, const std::string& device,
                                              const std::string& environment,
                                              const std::vector<double>& distances_cm, std::size_t rows_per_distance,
                                              std::uint64_t seed, double ble_tx_offset_db) {
    ChannelModel ble = profile.ble;
    ble.tx_power_dbm += ble_tx_offset_db;
    std::vector<MatchedSample> out;
    out.reserve(distances_cm.size() * rows_per_distance);
    for (std::size_t k = 0; k < distances_cm.size(); ++k) {
        const double cm = distances_cm[k];
        const double m = cm / 100.0;
        Rng rng(mix_seed(seed, k));
        for (std::size_t i = 0; i < rows_per_distance; ++i) {
            MatchedSample s;
            s.run_id = environment + "-" + device + "-" + format_double(cm);
            s.device = device;
            s.environment = environment;
            s.distance_cm = cm;
            s.label = distance_to_class(cm);
            s.t_us = std::int64_t(i) * 250'000;
            s.ble_rssi = ble.sample_rssi(m, 0, rng);
            s.wifi24_freq = profile.wifi24.channels_mhz[uniform_index(rng, profile.wifi24.channels_mhz.size())];
            s.wifi24_rssi = profile.wifi24.sample_rssi(m, s.wifi24_freq, rng);
            s.wifi5_freq = profile.wifi5.channels_mhz[uniform_index(rng, profile.wifi5.channels_mhz.size())];
            s.wifi5_rssi = profile.wifi5.sample_rssi(m, s.wifi5_freq, rng);
            out.push_back(std::move(s));
        }
    }
    return out;
}

void write_truth(std::ostream& out, const std::vector<TruthSegment>& truth) {
    out << "run_id,device,addr,first_seen_us,last_seen_us\n";
    for (const auto& t : truth)
        out << t.run_id << ',' << t.device << ',' << t.address.to_string() << ',' << t.first_us << ',' << t.last_us
            << '\n';
}

void write_address_table(std::ostream& out, const std::map<std::string, std::string>& table) {
    out << "addr,device\n";
    for (const auto& [addr, device] : table) out << addr << ',' << device << '\n';
}

std::map<std::string, std::string> read_address_table(const std::filesystem::path& path) {
    const auto table = CsvTable::read_file(path);
    const auto c_addr = table.require("addr");
    const auto c_dev = table.require("device");
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto addr = MacAddress::parse(table.row(i)[c_addr]);
        if (!addr) throw DataError(path.string() + ":" + std::to_string(table.line_of(i)) + ": bad address");
        out[addr->to_string()] = table.row(i)[c_dev];
    }
    return out;
}

}  // namespace mcprox
