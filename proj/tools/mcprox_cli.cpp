// Command-line front end: one subcommand per pipeline stage.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mcprox/config.hpp"
#include "mcprox/error.hpp"
#include "mcprox/pipeline.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;

const char* describe(std::string_view stage) {
    if (stage == "synth") return "Generate synthetic capture logs, metadata and ground truth";
    if (stage == "ingest") return "Validate and normalize the BLE and probe-request logs";
    if (stage == "match") return "Recover device traces and match BLE to 2.4/5 GHz samples";
    if (stage == "calibrate") return "Solve per-device BLE RSSI corrections";
    if (stage == "prep") return "Balance, sample and split the ground-truth data per device";
    if (stage == "train") return "Grid-search and train the 13 models per device";
    if (stage == "eval") return "Evaluate trained models on the eval split and scenario sets";
    return "Score exposure per trace with the attenuation thresholds";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-channel proximity classification pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "Key-value config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Seed for every random step");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--set", overrides, "Override a config field, key=value (repeatable)");

    for (auto stage : mcprox::kStageNames) app.add_subcommand(std::string(stage), describe(stage));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        auto cfg = config_path.empty() ? mcprox::PipelineConfig{} : mcprox::PipelineConfig::read_file(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw mcprox::ConfigError("--set expects key=value, got \"" + kv + "\"");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (seed) cfg.seed = *seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        cfg.validate();

        const auto result = mcprox::run_stage(app.get_subcommands().front()->get_name(), cfg);
        for (const auto& line : result.lines) std::cout << result.stage << ": " << line << '\n';
        std::cout << result.stage << ": manifest " << result.manifest.string() << '\n';
        return 0;
    } catch (const mcprox::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mcprox::InfeasibleCalibration& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
