#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mcprox/config.hpp"

namespace mcprox {

/// What a stage did, for the command-line summary.
struct StageResult {
    std::string stage;
    std::vector<std::string> lines;
    std::filesystem::path manifest;
};

// Each stage reads its inputs from the config or from earlier stages under
// out_dir, writes plain files under out_dir/<stage>/ and a manifest.txt with
// the config digest plus the SHA-256 of every input and output. A missing
// upstream artifact raises ConfigError naming the stage to run first.

StageResult run_synth(const PipelineConfig& cfg);
StageResult run_ingest(const PipelineConfig& cfg);
StageResult run_match(const PipelineConfig& cfg);
StageResult run_calibrate(const PipelineConfig& cfg);
StageResult run_prep(const PipelineConfig& cfg);
StageResult run_train(const PipelineConfig& cfg);
StageResult run_eval(const PipelineConfig& cfg);
StageResult run_gaen(const PipelineConfig& cfg);

inline constexpr std::string_view kStageNames[] = {"synth", "ingest", "match", "calibrate",
                                                   "prep",  "train",  "eval",  "gaen"};

StageResult run_stage(std::string_view stage, const PipelineConfig& cfg);

}  // namespace mcprox
