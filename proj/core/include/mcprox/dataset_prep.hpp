#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mcprox/ingest.hpp"
#include "mcprox/random.hpp"
#include "mcprox/types.hpp"

namespace mcprox {

// The sampling steps work on indices into one base sample list, so repeated
// draws of the same original row stay traceable.

/// Upsamples every (class, environment) cell to `per_cell_target` rows. The target
/// is split evenly over the cell's distances (remainder to the smallest distances).
/// A distance under its quota keeps each original row once and draws the rest with
/// replacement; one over its quota is subsampled without replacement.
/// Rows without a label are ignored. Throws DataError naming an empty cell.
std::vector<std::size_t> upsample_balance(std::span<const MatchedSample> samples, std::size_t per_cell_target,
                                          Rng& rng);

/// Draws exactly `n_per_class` rows of each class from `pool`, keeping each class's
/// distance proportions (largest-remainder rounding, so within one row).
/// Throws DataError if a class has fewer than `n_per_class` pooled rows.
std::vector<std::size_t> stratified_class_sample(std::span<const MatchedSample> samples,
                                                 std::span<const std::size_t> pool, std::size_t n_per_class,
                                                 std::uint64_t seed);

struct SplitRatios {
    double train = 0.6;
    double test = 0.2;
    double eval = 0.2;
};

struct SplitIndices {
    std::vector<std::size_t> train, test, eval;
};

/// Stratified by class: per class, floor(n * test) test rows, floor(n * eval) eval
/// rows and the remainder for training.
SplitIndices split_train_test_eval(std::span<const MatchedSample> samples, std::span<const std::size_t> rows,
                                   std::uint64_t seed, const SplitRatios& ratios = {});

struct HoldoutResult {
    std::vector<MatchedSample> ground_truth;
    std::vector<MatchedSample> scenario;
};

/// Separates scenario-setup runs (including every train-environment run) from
/// ground-truth runs. Throws DataError for a run missing from the metadata.
HoldoutResult holdout_scenarios(std::span<const MatchedSample> samples, const RunMetadata& metadata);

struct PrepOptions {
    std::size_t n_per_class = 100000;
    SplitRatios ratios;
    std::uint64_t seed = 42;
    /// 0 picks max(largest class x environment cell, ceil(n_per_class / environments)).
    std::size_t per_cell_target = 0;
    /// Split the original rows before balancing, so no row can leak across splits.
    bool split_first = false;
};

using ProvenanceKey = std::tuple<DistanceClass, std::string, double>;  // class, environment, distance

struct PreparedDataset {
    std::vector<MatchedSample> train, test, eval;
    std::uint64_t seed = 0;
    bool split_first = false;
    /// Row counts of the sampled pool per (class, environment, distance).
    std::map<ProvenanceKey, std::size_t> provenance;
    /// Test/eval rows that are copies of an original row also present in train.
    std::size_t leaked_rows = 0;
};

/// Balance, sample and split one device's ground-truth rows.
PreparedDataset prepare_dataset(std::span<const MatchedSample> ground_truth, const PrepOptions& options);

/// Default upsampling target for `prepare_dataset`.
std::size_t default_cell_target(std::span<const MatchedSample> samples, std::size_t n_per_class);

}  // namespace mcprox
