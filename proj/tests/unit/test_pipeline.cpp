#include <doctest.h>

#include <fstream>
#include <sstream>

#include "../support/oracles.hpp"
#include "mcprox/config.hpp"
#include "mcprox/error.hpp"
#include "mcprox/metrics.hpp"
#include "mcprox/pipeline.hpp"
#include "mcprox/text_io.hpp"

using namespace mcprox;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config(const fs::path& out) {
    std::istringstream in(
        "n_per_class = 300\n"
        "grid.max_depth = 6, none\n"
        "grid.min_samples_leaf = 1\n"
        "grid.n_trees = 5\n"
        "grid.features = sqrt\n"
        "synth.environments = office, bus\n"
        "synth.seconds_per_distance = 15  # short runs\n"
        "synth.scenario_duration_s = 40\n");
    auto cfg = PipelineConfig::parse(in);
    cfg.out_dir = out;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config defaults and overrides") {
    PipelineConfig cfg;
    CHECK(cfg.d_vc == 55);
    CHECK(cfg.d_c == 63);
    CHECK(cfg.warn_threshold == 15);
    CHECK(cfg.filter_window_s == 30);
    CHECK(cfg.n_per_class == 100000);
    CHECK(cfg.split.train == 0.6);
    cfg.set("tx_power.iphone", "-12");
    CHECK(cfg.tx_power_of("iphone") == -12);
    CHECK(cfg.tx_power_of("pi") == 0);
    CHECK_THROWS_WITH_AS(cfg.set("split", "0.5,0.5,0.5"), doctest::Contains("split"), ConfigError);
    CHECK_THROWS_WITH_AS(cfg.set("wat", "1"), doctest::Contains("wat"), ConfigError);
    CHECK_THROWS_WITH_AS(cfg.set("models", "14"), doctest::Contains("models"), ConfigError);

    std::istringstream swapped("d_vc = 70\nd_c = 80\n");
    CHECK(PipelineConfig::parse(swapped).d_vc == 70);
    std::istringstream inverted("d_vc = 70\n");
    CHECK_THROWS_AS(PipelineConfig::parse(inverted), ConfigError);

    PipelineConfig other;
    other.out_dir = "elsewhere";
    CHECK(other.digest() == PipelineConfig{}.digest());
    other.seed = 1;
    CHECK(other.digest() != PipelineConfig{}.digest());
}

TEST_CASE("stages name their missing upstream") {
    oracle::TempDir dir("upstream");
    const auto cfg = small_config(dir.path());
    CHECK_THROWS_WITH_AS(run_match(cfg), doctest::Contains("ingest"), ConfigError);
    CHECK_THROWS_WITH_AS(run_ingest(cfg), doctest::Contains("synth"), ConfigError);
    CHECK_THROWS_WITH_AS(run_train(cfg), doctest::Contains("calibrate"), ConfigError);
    CHECK_THROWS_WITH_AS(run_eval(cfg), doctest::Contains("prep"), ConfigError);
}

TEST_CASE("full synthetic pipeline") {
    oracle::TempDir dir("pipeline");
    auto cfg = small_config(dir.path());
    for (auto stage : kStageNames) run_stage(stage, cfg);

    std::ifstream csv(dir.path() / "eval" / "report.csv");
    const auto reports = read_report_csv(csv);
    bool has1 = false, has13 = false;
    for (const auto& r : reports) {
        has1 |= r.model.starts_with("01 ") && r.dataset == "gt";
        has13 |= r.model.starts_with("13 ") && r.dataset == "gt";
    }
    CHECK(has1);
    CHECK(has13);
    const auto text = slurp(dir.path() / "eval" / "report.txt");
    CHECK(text.find("config_digest " + cfg.digest()) != std::string::npos);
    CHECK(text.find("total") != std::string::npos);
    CHECK(slurp(dir.path() / "train" / "oneplus" / "model_13.txt").find(cfg.digest()) != std::string::npos);
    CHECK(slurp(dir.path() / "prep" / "manifest.txt").find("note oneplus.train") != std::string::npos);

    // Re-running a stage leaves its outputs unchanged.
    const auto before = slurp(dir.path() / "match" / "matched.csv");
    run_match(cfg);
    CHECK(slurp(dir.path() / "match" / "matched.csv") == before);

    SUBCASE("partial roster") {
        auto only = cfg;
        only.models = {1};
        fs::remove_all(dir.path() / "train");
        run_train(only);
        run_eval(only);
        const auto partial = slurp(dir.path() / "eval" / "report.txt");
        CHECK(partial.find("absent models 2,3,4,5,6,7,8,9,10,11,12,13") != std::string::npos);
    }
}

TEST_CASE("gaen scores an attenuation log") {
    oracle::TempDir dir("gaen");
    PipelineConfig cfg;
    cfg.out_dir = dir.path() / "out";
    cfg.attenuation_log = dir.path() / "att.csv";
    {
        std::ofstream f(cfg.attenuation_log);
        f << "trace,t_s,attenuation_db\n";
        for (int t = 0; t < 900; t += 30) f << "near," << t << ",50\n";  // 15 min below 55 dB
        for (int t = 0; t < 840; t += 30) f << "short," << t << ",50\n";
    }
    run_gaen(cfg);
    const auto out = slurp(cfg.out_dir / "gaen" / "exposure.csv");
    CHECK(out.find("near,3,15,0,15,true") != std::string::npos);
    CHECK(out.find("short,3,15,0,15,true") != std::string::npos);
    cfg.gaen_window_s = 60;
    run_gaen(cfg);
    CHECK(slurp(cfg.out_dir / "gaen" / "exposure.csv").find("short,14,14,0,14,false") != std::string::npos);
}
