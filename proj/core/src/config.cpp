#include "mcprox/config.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "mcprox/digest.hpp"
#include "mcprox/error.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

namespace {

[[noreturn]] void bad(std::string_view key, std::string_view why) {
    throw ConfigError("config field " + std::string(key) + ": " + std::string(why));
}

double as_double(std::string_view key, std::string_view v) {
    const auto d = parse_double(v);
    if (!d) bad(key, "expected a number, got \"" + std::string(v) + "\"");
    return *d;
}

std::uint64_t as_count(std::string_view key, std::string_view v) {
    const auto n = parse_int(v);
    if (!n || *n < 0) bad(key, "expected a non-negative integer, got \"" + std::string(v) + "\"");
    return static_cast<std::uint64_t>(*n);
}

bool as_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad(key, "expected true or false");
}

std::vector<std::string_view> as_list(std::string_view v) {
    std::vector<std::string_view> out;
    for (auto f : split_fields(v, ',')) {
        f = trim(f);
        if (!f.empty()) out.push_back(f);
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ',';
        out += s;
    }
    return out;
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view raw) {
    const auto value = trim(raw);
    if (key == "ble_log") ble_log = std::string(value);
    else if (key == "wifi_log") wifi_log = std::string(value);
    else if (key == "metadata") metadata = std::string(value);
    else if (key == "fingerprint_table") fingerprint_table = std::string(value);
    else if (key == "ble_address_table") ble_address_table = std::string(value);
    else if (key == "attenuation_log") attenuation_log = std::string(value);
    else if (key == "scenario") scenario = std::string(value);
    else if (key == "out_dir") {
        if (value.empty()) bad(key, "must not be empty");
        out_dir = std::string(value);
    } else if (key == "d_vc") d_vc = as_double(key, value);
    else if (key == "d_c") d_c = as_double(key, value);
    else if (key == "warn_threshold") {
        warn_threshold = as_double(key, value);
        if (warn_threshold < 0) bad(key, "must be non-negative");
    } else if (key == "match_window_s") {
        match_window_s = as_double(key, value);
        if (!(match_window_s >= 0)) bad(key, "must be non-negative");
    } else if (key == "filter_window_s") {
        filter_window_s = as_double(key, value);
        if (!(filter_window_s > 0)) bad(key, "must be positive");
    } else if (key == "successor_horizon_s") {
        successor_horizon_s = as_double(key, value);
        if (!(successor_horizon_s > 0)) bad(key, "must be positive");
    } else if (key == "n_per_class") {
        n_per_class = as_count(key, value);
        if (n_per_class == 0) bad(key, "must be positive");
    } else if (key == "per_cell_target") per_cell_target = as_count(key, value);
    else if (key == "split") {
        const auto parts = as_list(value);
        if (parts.size() != 3) bad(key, "expected train,test,eval fractions");
        SplitRatios r{as_double(key, parts[0]), as_double(key, parts[1]), as_double(key, parts[2])};
        if (r.train <= 0 || r.test <= 0 || r.eval <= 0 || std::abs(r.train + r.test + r.eval - 1.0) > 1e-9)
            bad(key, "fractions must be positive and sum to 1");
        split = r;
    } else if (key == "split_first") split_first = as_bool(key, value);
    else if (key == "seed") seed = as_count(key, value);
    else if (key == "tx_power_default") tx_power_default = as_double(key, value);
    else if (key.starts_with("tx_power.")) {
        const auto device = key.substr(9);
        if (device.empty()) bad(key, "missing device name");
        tx_power[std::string(device)] = as_double(key, value);
    } else if (key == "grid.max_depth") {
        grid.max_depth.clear();
        for (auto v : as_list(value)) {
            if (v == "none") grid.max_depth.push_back(std::nullopt);
            else grid.max_depth.push_back(as_count(key, v));
        }
        if (grid.max_depth.empty()) bad(key, "empty list");
    } else if (key == "grid.min_samples_leaf") {
        grid.min_samples_leaf.clear();
        for (auto v : as_list(value)) {
            const auto n = as_count(key, v);
            if (n == 0) bad(key, "values must be positive");
            grid.min_samples_leaf.push_back(n);
        }
        if (grid.min_samples_leaf.empty()) bad(key, "empty list");
    } else if (key == "grid.n_trees") {
        grid.n_trees.clear();
        for (auto v : as_list(value)) {
            const auto n = as_count(key, v);
            if (n == 0) bad(key, "values must be positive");
            grid.n_trees.push_back(n);
        }
        if (grid.n_trees.empty()) bad(key, "empty list");
    } else if (key == "grid.features") {
        grid.features.clear();
        for (auto v : as_list(value)) {
            if (v == "all") grid.features.push_back(FeatureSubset::All);
            else if (v == "sqrt") grid.features.push_back(FeatureSubset::Sqrt);
            else bad(key, "expected all or sqrt");
        }
        if (grid.features.empty()) bad(key, "empty list");
    } else if (key == "combine_mode") {
        if (value == "onehot") combine_mode = CombineMode::OneHot;
        else if (value == "probability") combine_mode = CombineMode::Probability;
        else bad(key, "expected onehot or probability");
    } else if (key == "models") {
        models.clear();
        for (auto v : as_list(value)) {
            const auto n = as_count(key, v);
            if (n < 1 || n > kRosterSize) bad(key, "model numbers run from 1 to 13");
            models.push_back(int(n));
        }
        std::sort(models.begin(), models.end());
        models.erase(std::unique(models.begin(), models.end()), models.end());
    } else if (key == "devices") {
        devices.clear();
        for (auto v : as_list(value)) devices.emplace_back(v);
    } else if (key == "gaen_window_s") {
        gaen_window_s = as_double(key, value);
        if (!(gaen_window_s > 0)) bad(key, "must be positive");
    } else if (key == "gaen_aggregate") {
        if (value == "min") gaen_aggregate = WindowAggregate::Minimum;
        else if (value == "avg") gaen_aggregate = WindowAggregate::Average;
        else bad(key, "expected min or avg");
    } else if (key == "synth.environments") {
        synth_environments.clear();
        for (auto v : as_list(value)) synth_environments.emplace_back(v);
    } else if (key == "synth.seconds_per_distance") {
        synth_seconds_per_distance = as_double(key, value);
        if (!(synth_seconds_per_distance > 0)) bad(key, "must be positive");
    } else if (key == "synth.scenario_duration_s") {
        synth_scenario_duration_s = as_double(key, value);
        if (!(synth_scenario_duration_s > 0)) bad(key, "must be positive");
    } else if (key == "synth.scenarios") synth_scenarios = as_bool(key, value);
    else throw ConfigError("unknown config field " + std::string(key));
}

void PipelineConfig::validate() const {
    if (!(d_vc < d_c)) bad("d_vc", "must be below d_c");
    if (synth_environments.empty()) bad("synth.environments", "empty list");
}

PipelineConfig PipelineConfig::parse(std::istream& in, std::string_view source) {
    PipelineConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
        cfg.set(trim(text.substr(0, eq)), text.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse(in, path.string());
}

double PipelineConfig::tx_power_of(const std::string& device) const {
    const auto it = tx_power.find(device);
    return it == tx_power.end() ? tx_power_default : it->second;
}

std::string PipelineConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["ble_log"] = ble_log.string();
    kv["wifi_log"] = wifi_log.string();
    kv["metadata"] = metadata.string();
    kv["fingerprint_table"] = fingerprint_table.string();
    kv["ble_address_table"] = ble_address_table.string();
    kv["attenuation_log"] = attenuation_log.string();
    kv["scenario"] = scenario.string();
    kv["d_vc"] = format_double(d_vc);
    kv["d_c"] = format_double(d_c);
    kv["warn_threshold"] = format_double(warn_threshold);
    kv["match_window_s"] = format_double(match_window_s);
    kv["filter_window_s"] = format_double(filter_window_s);
    kv["successor_horizon_s"] = format_double(successor_horizon_s);
    kv["n_per_class"] = std::to_string(n_per_class);
    kv["per_cell_target"] = std::to_string(per_cell_target);
    kv["split"] = format_double(split.train) + "," + format_double(split.test) + "," + format_double(split.eval);
    kv["split_first"] = split_first ? "true" : "false";
    kv["seed"] = std::to_string(seed);
    kv["tx_power_default"] = format_double(tx_power_default);
    for (const auto& [device, tx] : tx_power) kv["tx_power." + device] = format_double(tx);

    std::vector<std::string> items;
    for (const auto& d : grid.max_depth) items.push_back(d ? std::to_string(*d) : "none");
    kv["grid.max_depth"] = join(items);
    items.clear();
    for (auto n : grid.min_samples_leaf) items.push_back(std::to_string(n));
    kv["grid.min_samples_leaf"] = join(items);
    items.clear();
    for (auto n : grid.n_trees) items.push_back(std::to_string(n));
    kv["grid.n_trees"] = join(items);
    items.clear();
    for (auto f : grid.features) items.emplace_back(f == FeatureSubset::All ? "all" : "sqrt");
    kv["grid.features"] = join(items);
    kv["combine_mode"] = combine_mode == CombineMode::OneHot ? "onehot" : "probability";
    items.clear();
    for (int m : models) items.push_back(std::to_string(m));
    kv["models"] = join(items);
    kv["devices"] = join(devices);
    kv["gaen_window_s"] = format_double(gaen_window_s);
    kv["gaen_aggregate"] = gaen_aggregate == WindowAggregate::Minimum ? "min" : "avg";
    kv["synth.environments"] = join(synth_environments);
    kv["synth.seconds_per_distance"] = format_double(synth_seconds_per_distance);
    kv["synth.scenario_duration_s"] = format_double(synth_scenario_duration_s);
    kv["synth.scenarios"] = synth_scenarios ? "true" : "false";

    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::string PipelineConfig::digest() const { return sha256_hex(canonical()); }

}  // namespace mcprox
