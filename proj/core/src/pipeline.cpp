#include "mcprox/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "mcprox/calibration.hpp"
#include "mcprox/digest.hpp"
#include "mcprox/error.hpp"
#include "mcprox/fingerprint.hpp"
#include "mcprox/ingest.hpp"
#include "mcprox/matching.hpp"
#include "mcprox/metrics.hpp"
#include "mcprox/model_io.hpp"
#include "mcprox/synth.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

namespace fs = std::filesystem;

namespace {

class Manifest {
public:
    Manifest(std::string stage, const PipelineConfig& cfg) : stage_(std::move(stage)), cfg_(cfg) {}

    void input(const std::string& name, const fs::path& path) { inputs_.emplace_back(name, sha256_file(path)); }

    const fs::path& output(const fs::path& path) {
        outputs_.push_back(path);
        return outputs_.back();
    }

    void note(const std::string& key, const std::string& value) { notes_.emplace_back(key, value); }

    fs::path write() const {
        const auto path = cfg_.out_dir / stage_ / "manifest.txt";
        auto out = open_output(path);
        out << "mcprox-manifest 1\n";
        out << "stage " << stage_ << '\n';
        out << "config_digest " << cfg_.digest() << '\n';
        out << "seed " << cfg_.seed << '\n';
        for (const auto& [k, v] : notes_) out << "note " << k << ' ' << v << '\n';
        for (const auto& [name, sha] : inputs_) out << "input " << name << ' ' << sha << '\n';
        auto outputs = outputs_;
        std::sort(outputs.begin(), outputs.end());
        for (const auto& p : outputs)
            out << "output " << p.lexically_relative(cfg_.out_dir).generic_string() << ' ' << sha256_file(p) << '\n';
        return path;
    }

private:
    std::string stage_;
    const PipelineConfig& cfg_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<fs::path> outputs_;
    std::vector<std::pair<std::string, std::string>> notes_;
};

fs::path stage_dir(const PipelineConfig& cfg, std::string_view stage) { return cfg.out_dir / stage; }

const fs::path& require_upstream(const fs::path& path, std::string_view stage) {
    if (!fs::exists(path))
        throw ConfigError("missing " + path.string() + "; run the " + std::string(stage) + " stage first");
    return path;
}

// A configured path must exist; an empty one falls back to the synth output.
fs::path resolve_input(const PipelineConfig& cfg, const fs::path& configured, std::string_view file,
                       std::string_view field) {
    if (!configured.empty()) {
        if (!fs::exists(configured))
            throw ConfigError("config field " + std::string(field) + ": " + configured.string() + " does not exist");
        return configured;
    }
    const auto fallback = stage_dir(cfg, "synth") / file;
    if (!fs::exists(fallback))
        throw ConfigError("config field " + std::string(field) + " is unset and " + fallback.string() +
                          " is missing; run the synth stage first");
    return fallback;
}

template <class F>
void write_file(Manifest& manifest, const fs::path& path, F&& body) {
    auto out = open_output(manifest.output(path));
    body(out);
    out.flush();
    if (!out) throw DataError("failed writing " + path.string());
}

std::string model_label(int n) {
    std::string label = n < 10 ? "0" : "";
    return label + std::to_string(n) + " " + std::string(roster_spec(n).name);
}

std::vector<std::string> ground_truth_devices(const PipelineConfig& cfg, std::span<const MatchedSample> gt) {
    std::set<std::string> present;
    for (const auto& s : gt) present.insert(s.device);
    if (cfg.devices.empty()) return {present.begin(), present.end()};
    for (const auto& d : cfg.devices)
        if (!present.contains(d)) throw DataError("device " + d + " has no ground-truth samples");
    return cfg.devices;
}

std::vector<MatchedSample> of_device(std::span<const MatchedSample> samples, const std::string& device) {
    std::vector<MatchedSample> out;
    for (const auto& s : samples)
        if (s.device == device) out.push_back(s);
    return out;
}

}  // namespace

StageResult run_synth(const PipelineConfig& cfg) {
    Manifest manifest("synth", cfg);
    SynthScenario scenario;
    if (!cfg.scenario.empty()) {
        manifest.input("scenario", cfg.scenario);
        scenario = load_scenario(cfg.scenario);
        scenario.seed = cfg.seed;
    } else {
        CampaignOptions options;
        options.environments = cfg.synth_environments;
        options.seconds_per_distance = cfg.synth_seconds_per_distance;
        options.scenario_duration_s = cfg.synth_scenario_duration_s;
        options.scenario_runs = cfg.synth_scenarios;
        options.seed = cfg.seed;
        scenario = default_campaign(options);
    }
    const auto data = generate_synthetic(scenario);
    const auto dir = stage_dir(cfg, "synth");
    write_file(manifest, dir / "ble.csv", [&](std::ostream& o) { write_ble_log(o, data.ble); });
    write_file(manifest, dir / "wifi.csv", [&](std::ostream& o) { write_wifi_log(o, data.wifi); });
    write_file(manifest, dir / "metadata.csv", [&](std::ostream& o) { data.metadata.write(o); });
    write_file(manifest, dir / "truth.csv", [&](std::ostream& o) { write_truth(o, data.truth); });
    write_file(manifest, dir / "fingerprints.csv",
               [&](std::ostream& o) { write_fingerprint_table(o, data.fingerprint_to_device); });
    write_file(manifest, dir / "ble_addresses.csv",
               [&](std::ostream& o) { write_address_table(o, data.ble_address_to_device); });
    StageResult r{"synth", {}, manifest.write()};
    r.lines.push_back(std::to_string(scenario.runs.size()) + " runs, " + std::to_string(data.ble.size()) +
                      " BLE records, " + std::to_string(data.wifi.size()) + " probe records");
    return r;
}

StageResult run_ingest(const PipelineConfig& cfg) {
    Manifest manifest("ingest", cfg);
    const auto ble_path = resolve_input(cfg, cfg.ble_log, "ble.csv", "ble_log");
    const auto wifi_path = resolve_input(cfg, cfg.wifi_log, "wifi.csv", "wifi_log");
    const auto meta_path = resolve_input(cfg, cfg.metadata, "metadata.csv", "metadata");
    manifest.input("ble_log", ble_path);
    manifest.input("wifi_log", wifi_path);
    manifest.input("metadata", meta_path);

    auto ble = parse_ble_log(ble_path);
    auto wifi = parse_wifi_log(wifi_path);
    const auto metadata = RunMetadata::read_file(meta_path);
    for (const auto* log : {&ble.records, &wifi.records})
        for (const auto& rec : *log)
            if (metadata.run(rec.run_id).empty())
                throw DataError("run " + rec.run_id + " appears in the logs but not in the metadata");

    auto by_time = [](const SignalRecord& a, const SignalRecord& b) { return a.timestamp_us < b.timestamp_us; };
    std::stable_sort(ble.records.begin(), ble.records.end(), by_time);
    std::stable_sort(wifi.records.begin(), wifi.records.end(), by_time);

    const auto dir = stage_dir(cfg, "ingest");
    write_file(manifest, dir / "ble.csv", [&](std::ostream& o) { write_ble_log(o, ble.records); });
    write_file(manifest, dir / "wifi.csv", [&](std::ostream& o) { write_wifi_log(o, wifi.records); });
    write_file(manifest, dir / "metadata.csv", [&](std::ostream& o) { metadata.write(o); });
    manifest.note("out_of_order_ble", std::to_string(ble.out_of_order_lines.size()));
    manifest.note("out_of_order_wifi", std::to_string(wifi.out_of_order_lines.size()));

    StageResult r{"ingest", {}, manifest.write()};
    r.lines.push_back(std::to_string(ble.records.size()) + " BLE records, " + std::to_string(wifi.records.size()) +
                      " probe records");
    if (!ble.out_of_order_lines.empty() || !wifi.out_of_order_lines.empty())
        r.lines.push_back("re-sorted " +
                          std::to_string(ble.out_of_order_lines.size() + wifi.out_of_order_lines.size()) +
                          " out-of-order lines");
    return r;
}

StageResult run_match(const PipelineConfig& cfg) {
    Manifest manifest("match", cfg);
    const auto in_dir = stage_dir(cfg, "ingest");
    const auto ble_path = require_upstream(in_dir / "ble.csv", "ingest");
    const auto wifi_path = require_upstream(in_dir / "wifi.csv", "ingest");
    const auto meta_path = require_upstream(in_dir / "metadata.csv", "ingest");
    const auto fp_path = resolve_input(cfg, cfg.fingerprint_table, "fingerprints.csv", "fingerprint_table");
    manifest.input("ble", ble_path);
    manifest.input("wifi", wifi_path);
    manifest.input("metadata", meta_path);
    manifest.input("fingerprint_table", fp_path);

    AssemblyOptions options;
    options.tracing.filter_window_s = cfg.filter_window_s;
    options.tracing.successor_horizon_s = cfg.successor_horizon_s;
    options.matching.window_s = cfg.match_window_s;
    options.fingerprint_to_device = read_fingerprint_table(fp_path);
    fs::path addr_path = cfg.ble_address_table;
    if (addr_path.empty() && fs::exists(stage_dir(cfg, "synth") / "ble_addresses.csv"))
        addr_path = stage_dir(cfg, "synth") / "ble_addresses.csv";
    if (!addr_path.empty()) {
        if (!fs::exists(addr_path))
            throw ConfigError("config field ble_address_table: " + addr_path.string() + " does not exist");
        manifest.input("ble_address_table", addr_path);
        options.ble_address_to_device = read_address_table(addr_path);
    }

    const auto ble = parse_ble_log(ble_path).records;
    const auto wifi = parse_wifi_log(wifi_path).records;
    const auto metadata = RunMetadata::read_file(meta_path);
    const auto result = assemble_matched(ble, wifi, metadata, options);

    const auto dir = stage_dir(cfg, "match");
    export_matched(manifest.output(dir / "matched.csv"), result.samples);
    std::size_t unassigned = 0, ambiguous = 0;
    write_file(manifest, dir / "runs.csv", [&](std::ostream& o) {
        o << "run_id,ble_records,wifi_records,traces,unassigned_traces,links,ambiguous_links,unknown_probe_records,"
             "ble_rows,matched,dropped_missing_24,dropped_missing_5\n";
        for (const auto& run : result.runs) {
            o << run.run_id << ',' << run.ble_records << ',' << run.wifi_records << ',' << run.traces << ','
              << run.unassigned_traces << ',' << run.links << ',' << run.ambiguous_links << ','
              << run.unknown_probe_records << ',' << run.match.ble_rows << ',' << run.match.matched << ','
              << run.match.dropped_missing_24 << ',' << run.match.dropped_missing_5 << '\n';
            unassigned += run.unassigned_traces;
            ambiguous += run.ambiguous_links;
        }
    });
    StageResult r{"match", {}, manifest.write()};
    r.lines.push_back(std::to_string(result.samples.size()) + " matched samples from " +
                      std::to_string(result.runs.size()) + " runs");
    if (unassigned) r.lines.push_back(std::to_string(unassigned) + " BLE traces could not be assigned a device");
    if (ambiguous) r.lines.push_back(std::to_string(ambiguous) + " ambiguous roll links");
    return r;
}

StageResult run_calibrate(const PipelineConfig& cfg) {
    Manifest manifest("calibrate", cfg);
    const auto matched_path = require_upstream(stage_dir(cfg, "match") / "matched.csv", "match");
    const auto meta_path = require_upstream(stage_dir(cfg, "ingest") / "metadata.csv", "ingest");
    manifest.input("matched", matched_path);
    manifest.input("metadata", meta_path);

    const auto samples = import_matched(matched_path);
    const auto gt = holdout_scenarios(samples, RunMetadata::read_file(meta_path)).ground_truth;
    const auto profiles = average_rssi_per_distance(gt, SignalKind::Ble);
    std::map<std::string, std::vector<ProfileEntry>> pooled_input;
    // One correction per device: profiles of all environments are pooled.
    for (const auto& p : profiles)
        for (const auto& e : p.entries) pooled_input[p.device].push_back(e);
    std::vector<DistanceProfile> pooled;
    for (auto& [device, entries] : pooled_input) {
        std::map<double, ProfileEntry> merged;
        for (const auto& e : entries) {
            auto& m = merged[e.distance_cm];
            const double total = double(m.count + e.count);
            m.mean_rssi_dbm = (m.mean_rssi_dbm * double(m.count) + e.mean_rssi_dbm * double(e.count)) / total;
            m.distance_cm = e.distance_cm;
            m.count += e.count;
        }
        DistanceProfile p{device, "all", {}};
        for (const auto& [_, e] : merged) p.entries.push_back(e);
        pooled.push_back(std::move(p));
    }

    std::map<std::string, double> tx;
    for (const auto& p : pooled) tx[p.device] = cfg.tx_power_of(p.device);
    const auto table = solve_corrections(pooled, tx, cfg.thresholds(), cfg.tx_power_default);

    const auto dir = stage_dir(cfg, "calibrate");
    write_file(manifest, dir / "corrections.csv", [&](std::ostream& o) { table.write(o); });
    write_file(manifest, dir / "profiles.csv", [&](std::ostream& o) {
        o << "device,distance_cm,mean_rssi_dbm,count\n";
        for (const auto& p : pooled)
            for (const auto& e : p.entries)
                o << p.device << ',' << format_double(e.distance_cm) << ',' << format_double(e.mean_rssi_dbm) << ','
                  << e.count << '\n';
    });
    StageResult r{"calibrate", {}, manifest.write()};
    for (const auto& [device, c] : table.values())
        r.lines.push_back(device + ": correction " + format_fixed(c, 2) + " dB");
    return r;
}

StageResult run_prep(const PipelineConfig& cfg) {
    Manifest manifest("prep", cfg);
    const auto matched_path = require_upstream(stage_dir(cfg, "match") / "matched.csv", "match");
    const auto meta_path = require_upstream(stage_dir(cfg, "ingest") / "metadata.csv", "ingest");
    manifest.input("matched", matched_path);
    manifest.input("metadata", meta_path);

    const auto samples = import_matched(matched_path);
    const auto held = holdout_scenarios(samples, RunMetadata::read_file(meta_path));
    PrepOptions options;
    options.n_per_class = cfg.n_per_class;
    options.ratios = cfg.split;
    options.seed = cfg.seed;
    options.per_cell_target = cfg.per_cell_target;
    options.split_first = cfg.split_first;

    StageResult r{"prep", {}, {}};
    const auto dir = stage_dir(cfg, "prep");
    for (const auto& device : ground_truth_devices(cfg, held.ground_truth)) {
        const auto gt = of_device(held.ground_truth, device);
        const auto prepared = prepare_dataset(gt, options);
        const auto scenario = of_device(held.scenario, device);
        const auto ddir = dir / device;
        export_matched(manifest.output(ddir / "train.csv"), prepared.train);
        export_matched(manifest.output(ddir / "test.csv"), prepared.test);
        export_matched(manifest.output(ddir / "eval.csv"), prepared.eval);
        export_matched(manifest.output(ddir / "scenario.csv"), scenario);
        write_file(manifest, ddir / "provenance.csv", [&](std::ostream& o) {
            o << "class,environment,distance_cm,count\n";
            for (const auto& [key, n] : prepared.provenance)
                o << to_string(std::get<0>(key)) << ',' << std::get<1>(key) << ',' << format_double(std::get<2>(key))
                  << ',' << n << '\n';
        });
        manifest.note(device + ".train", std::to_string(prepared.train.size()));
        manifest.note(device + ".test", std::to_string(prepared.test.size()));
        manifest.note(device + ".eval", std::to_string(prepared.eval.size()));
        manifest.note(device + ".scenario", std::to_string(scenario.size()));
        manifest.note(device + ".leaked_rows", std::to_string(prepared.leaked_rows));
        r.lines.push_back(device + ": " + std::to_string(prepared.train.size()) + " train, " +
                          std::to_string(prepared.test.size()) + " test, " + std::to_string(prepared.eval.size()) +
                          " eval, " + std::to_string(scenario.size()) + " scenario rows; " +
                          std::to_string(prepared.leaked_rows) + " evaluation rows duplicate a training row");
    }
    manifest.note("split_first", cfg.split_first ? "true" : "false");
    r.manifest = manifest.write();
    return r;
}

namespace {

std::vector<std::string> prepared_devices(const PipelineConfig& cfg) {
    const auto dir = require_upstream(stage_dir(cfg, "prep"), "prep");
    std::vector<std::string> devices;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory()) devices.push_back(entry.path().filename().string());
    std::sort(devices.begin(), devices.end());
    if (!cfg.devices.empty()) {
        for (const auto& d : cfg.devices)
            if (std::find(devices.begin(), devices.end(), d) == devices.end())
                throw ConfigError("missing prepared data for device " + d + "; run the prep stage first");
        return cfg.devices;
    }
    if (devices.empty()) throw ConfigError("no prepared devices in " + dir.string() + "; run the prep stage first");
    return devices;
}

}  // namespace

StageResult run_train(const PipelineConfig& cfg) {
    Manifest manifest("train", cfg);
    const auto digest = cfg.digest();
    const fs::path corr_path = stage_dir(cfg, "calibrate") / "corrections.csv";
    const bool need_corrections = std::find(cfg.models.begin(), cfg.models.end(), 1) != cfg.models.end();
    std::optional<CorrectionTable> corrections;
    if (need_corrections) {
        require_upstream(corr_path, "calibrate");
        manifest.input("corrections", corr_path);
        corrections = CorrectionTable::read_file(corr_path);
    }

    RosterOptions options;
    options.grid = cfg.grid;
    options.seed = cfg.seed;
    options.combine_mode = cfg.combine_mode;
    options.thresholds = cfg.thresholds();
    options.models = cfg.models;

    StageResult r{"train", {}, {}};
    for (const auto& device : prepared_devices(cfg)) {
        const auto pdir = stage_dir(cfg, "prep") / device;
        PreparedDataset data;
        for (auto [name, part] : {std::pair{"train.csv", &data.train}, std::pair{"test.csv", &data.test}}) {
            const auto path = require_upstream(pdir / name, "prep");
            manifest.input(device + "/" + name, path);
            *part = import_matched(path);
        }
        data.seed = cfg.seed;
        options.tx_power_dbm = cfg.tx_power_of(device);
        if (corrections && !corrections->contains(device))
            throw DataError("no correction for device " + device + " in " + corr_path.string());
        const auto training = build_roster(data, device, corrections ? &*corrections : nullptr, options);
        const auto mdir = stage_dir(cfg, "train") / device;
        save_roster(mdir, training.roster, digest);
        for (int n = 1; n <= kRosterSize; ++n)
            if (training.roster.has(n)) manifest.output(model_path(mdir, n));
        write_file(manifest, mdir / "grid.csv", [&](std::ostream& o) {
            o << "model,params,test_accuracy,selected\n";
            for (const auto& [n, search] : training.searches)
                for (const auto& score : search.table)
                    o << n << ',' << score.params.to_string() << ',' << format_double(score.accuracy) << ','
                      << (score.params == search.best ? 1 : 0) << '\n';
        });
        std::string trained;
        for (int n = 1; n <= kRosterSize; ++n)
            if (training.roster.has(n)) trained += (trained.empty() ? "" : ",") + std::to_string(n);
        r.lines.push_back(device + ": trained models " + trained);
    }
    r.manifest = manifest.write();
    return r;
}

StageResult run_eval(const PipelineConfig& cfg) {
    Manifest manifest("eval", cfg);
    std::vector<EvalReport> reports;
    std::vector<std::string> absent_lines;
    std::map<std::string, std::vector<std::string>> confusions;
    StageResult r{"eval", {}, {}};

    for (const auto& device : prepared_devices(cfg)) {
        const auto mdir = require_upstream(stage_dir(cfg, "train") / device, "train");
        const auto roster = load_roster(mdir, device);
        for (int n = 1; n <= kRosterSize; ++n)
            if (roster.has(n)) manifest.input(device + "/" + model_path({}, n).string(), model_path(mdir, n));

        std::vector<std::pair<std::string, std::vector<MatchedSample>>> sets;
        const auto eval_path = require_upstream(stage_dir(cfg, "prep") / device / "eval.csv", "prep");
        const auto scen_path = require_upstream(stage_dir(cfg, "prep") / device / "scenario.csv", "prep");
        manifest.input(device + "/eval.csv", eval_path);
        manifest.input(device + "/scenario.csv", scen_path);
        sets.emplace_back("gt", import_matched(eval_path));
        std::map<std::string, std::vector<MatchedSample>> by_env;
        for (auto& s : import_matched(scen_path))
            if (s.label) by_env[s.environment].push_back(std::move(s));
        for (auto& [env, samples] : by_env) sets.emplace_back("scenario-" + env, std::move(samples));

        std::string absent;
        for (int n = 1; n <= kRosterSize; ++n) {
            if (!roster.available(n)) {
                absent += (absent.empty() ? "" : ",") + std::to_string(n);
                continue;
            }
            for (const auto& [name, samples] : sets) {
                const auto m = evaluate_model(roster, n, samples);
                if (m.total() == 0) continue;
                reports.push_back(make_report(model_label(n), name, device, m));
                if (name == "gt" && (n == 1 || n == kRosterSize))
                    confusions[device].push_back(render_confusion(m, model_label(n) + " on gt"));
            }
        }
        if (!absent.empty()) absent_lines.push_back(device + ": absent models " + absent);
    }

    const auto dir = stage_dir(cfg, "eval");
    write_file(manifest, dir / "report.csv", [&](std::ostream& o) { write_report_csv(o, reports); });
    write_file(manifest, dir / "report.txt", [&](std::ostream& o) {
        o << "config_digest " << cfg.digest() << "\n\n";
        o << "Per-class F1 and accuracy\n\n" << render_f1_tables(reports);
        const auto baseline = model_label(1);
        const auto candidate = model_label(kRosterSize);
        const bool have_both =
            std::any_of(reports.begin(), reports.end(), [&](const auto& x) { return x.model == baseline; }) &&
            std::any_of(reports.begin(), reports.end(), [&](const auto& x) { return x.model == candidate; });
        if (have_both)
            o << "Macro-F1, " << baseline << " vs " << candidate << "\n\n"
              << render_macro_f1_comparison(reports, baseline, candidate) << '\n';
        for (const auto& line : absent_lines) o << line << '\n';
        if (!absent_lines.empty()) o << '\n';
        for (const auto& [device, blocks] : confusions) {
            o << "device " << device << '\n';
            for (const auto& b : blocks) o << b << '\n';
        }
    });
    r.manifest = manifest.write();
    r.lines.push_back(std::to_string(reports.size()) + " evaluations written to " + (dir / "report.txt").string());
    for (const auto& line : absent_lines) r.lines.push_back(line);
    return r;
}

StageResult run_gaen(const PipelineConfig& cfg) {
    Manifest manifest("gaen", cfg);
    // trace -> (time in seconds, attenuation in dB)
    std::map<std::string, std::vector<std::pair<double, double>>> traces;
    if (!cfg.attenuation_log.empty()) {
        if (!fs::exists(cfg.attenuation_log))
            throw ConfigError("config field attenuation_log: " + cfg.attenuation_log.string() + " does not exist");
        manifest.input("attenuation_log", cfg.attenuation_log);
        const auto table = CsvTable::read_file(cfg.attenuation_log);
        const auto c_trace = table.require("trace");
        const auto c_t = table.require("t_s");
        const auto c_att = table.require("attenuation_db");
        for (std::size_t i = 0; i < table.rows(); ++i) {
            const auto& row = table.row(i);
            const auto t = parse_double(row[c_t]);
            const auto a = parse_double(row[c_att]);
            if (!t || !a)
                throw DataError(table.source() + ":" + std::to_string(table.line_of(i)) + ": bad number");
            traces[row[c_trace]].emplace_back(*t, *a);
        }
    } else {
        const auto matched_path = require_upstream(stage_dir(cfg, "match") / "matched.csv", "match");
        const auto corr_path = require_upstream(stage_dir(cfg, "calibrate") / "corrections.csv", "calibrate");
        manifest.input("matched", matched_path);
        manifest.input("corrections", corr_path);
        const auto table = CorrectionTable::read_file(corr_path);
        for (const auto& s : import_matched(matched_path)) {
            if (!table.contains(s.device)) continue;
            traces[s.run_id + "/" + s.device].emplace_back(
                double(s.t_us) / 1e6, attenuation(cfg.tx_power_of(s.device), s.ble_rssi, table.at(s.device)));
        }
    }

    StageResult r{"gaen", {}, {}};
    const auto t = cfg.thresholds();
    const auto dir = stage_dir(cfg, "gaen");
    std::size_t warnings = 0;
    write_file(manifest, dir / "exposure.csv", [&](std::ostream& o) {
        o << "trace,windows,very_close_min,close_min,score,warn\n";
        for (auto& [name, points] : traces) {
            std::stable_sort(points.begin(), points.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<ScanWindowStats> windows;
            const double start = points.front().first;
            std::size_t i = 0;
            while (i < points.size()) {
                const auto index = std::floor((points[i].first - start) / cfg.gaen_window_s);
                std::vector<double> att;
                while (i < points.size() && std::floor((points[i].first - start) / cfg.gaen_window_s) == index)
                    att.push_back(points[i++].second);
                windows.push_back(scan_window_stats(att, cfg.gaen_window_s));
            }
            const auto d = accumulate_exposure(windows, t, cfg.gaen_aggregate);
            const double score = exposure_score(d);
            const bool warn = should_warn(score, cfg.warn_threshold);
            warnings += warn;
            o << name << ',' << windows.size() << ',' << format_double(d.very_close_min) << ','
              << format_double(d.close_min) << ',' << format_double(score) << ',' << (warn ? "true" : "false")
              << '\n';
        }
    });
    r.manifest = manifest.write();
    r.lines.push_back(std::to_string(traces.size()) + " traces scored, " + std::to_string(warnings) + " warnings");
    return r;
}

StageResult run_stage(std::string_view stage, const PipelineConfig& cfg) {
    if (stage == "synth") return run_synth(cfg);
    if (stage == "ingest") return run_ingest(cfg);
    if (stage == "match") return run_match(cfg);
    if (stage == "calibrate") return run_calibrate(cfg);
    if (stage == "prep") return run_prep(cfg);
    if (stage == "train") return run_train(cfg);
    if (stage == "eval") return run_eval(cfg);
    if (stage == "gaen") return run_gaen(cfg);
    throw ConfigError("unknown stage " + std::string(stage));
}

}  // namespace mcprox
