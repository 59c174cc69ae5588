#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mcprox/calibration.hpp"
#include "mcprox/dataset_prep.hpp"
#include "mcprox/decision_tree.hpp"
#include "mcprox/features.hpp"
#include "mcprox/grid_search.hpp"
#include "mcprox/metrics.hpp"
#include "mcprox/random_forest.hpp"
#include "mcprox/signal_model.hpp"

namespace mcprox {

enum class ModelKind {
    BleThreshold,
    DecisionTree,
    RandomForest,
    CombinedUnweighted,
    CombinedWeighted,
    CombinedGeneral,
};

std::string_view to_string(ModelKind kind);

inline constexpr int kRosterSize = 13;

/// One row of the model roster.
struct ModelSpec {
    int number;
    ModelKind kind;
    FeatureSet features;
    ModelFamily family;  // unused by the threshold model
    std::array<int, 3> components;  // BLE, 2.4 GHz, 5 GHz sub-models of combiners; zeros otherwise
    std::string_view name;
};

/// Models 1-13: GAEN thresholds; BLE, 2.4 GHz and 5 GHz DT/RF; the four
/// specialised combiners over (2,4,6) and (3,5,7); full-feature DT and RF.
const std::array<ModelSpec, kRosterSize>& roster_specs();
/// Throws ConfigError outside 1..13.
const ModelSpec& roster_spec(int number);

struct CombineWeights {
    double ble = 1.0 / 3.0;
    double wifi24 = 1.0 / 3.0;
    double wifi5 = 1.0 / 3.0;
};

inline constexpr CombineWeights kUnweighted{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
/// Both bands count equally: two 2.4 GHz signals share one half.
inline constexpr CombineWeights kBandWeighted{0.25, 0.25, 0.5};

enum class CombineMode { OneHot, Probability };

/// Each sub-model's predicted class receives that sub-model's weight; the highest
/// total wins and ties go to the closer class. Throws ConfigError unless the
/// weights are non-negative and sum to 1.
DistanceClass combine_specialized(DistanceClass ble, DistanceClass wifi24, DistanceClass wifi5,
                                  const CombineWeights& weights);
/// Weighted mean of class distributions.
DistanceClass combine_specialized(const ClassScores& ble, const ClassScores& wifi24, const ClassScores& wifi5,
                                  const CombineWeights& weights);

struct ThresholdModel {
    AttenuationThresholds thresholds;
    double tx_power_dbm = 0.0;
    double correction_db = 0.0;

    DistanceClass predict(const MatchedSample& s) const;
};

struct TreeModel {
    FeatureSet features;
    DecisionTree tree;
};

struct ForestModel {
    FeatureSet features;
    RandomForest forest;
};

struct CombinedModel {
    std::array<int, 3> components{};
    CombineWeights weights;
    CombineMode mode = CombineMode::OneHot;
};

struct TrainedModel {
    int number = 0;
    std::variant<ThresholdModel, TreeModel, ForestModel, CombinedModel> model;
    std::optional<HyperParams> params;
};

/// Trained models of one sending device.
class Roster {
public:
    explicit Roster(std::string device = {}) : device_(std::move(device)) {}

    const std::string& device() const { return device_; }
    void set(TrainedModel model);
    bool has(int number) const;
    /// True when the model and, for combiners, all of its sub-models are present.
    bool available(int number) const;
    const TrainedModel& at(int number) const;

    /// Throws DataError when the model is not available.
    DistanceClass predict(int number, const MatchedSample& s) const;
    ClassScores predict_proba(int number, const MatchedSample& s) const;

private:
    std::string device_;
    std::array<std::optional<TrainedModel>, kRosterSize> models_;
};

struct RosterOptions {
    ParamGrid grid;
    std::uint64_t seed = 42;
    CombineMode combine_mode = CombineMode::OneHot;
    AttenuationThresholds thresholds;
    double tx_power_dbm = 0.0;
    /// Subset of model numbers to build; combiners pull in their sub-models.
    std::vector<int> models{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
};

struct RosterTraining {
    Roster roster;
    std::map<int, GridSearchResult> searches;
};

/// Grid-searches every DT/RF model on the train/test splits and refits the best
/// point on train. Model 1 needs `corrections` with an entry for the device.
RosterTraining build_roster(const PreparedDataset& data, const std::string& device,
                            const CorrectionTable* corrections, const RosterOptions& options = {});

/// Confusion matrix of one model over labelled samples (unlabelled rows are skipped).
ConfusionMatrix evaluate_model(const Roster& roster, int number, std::span<const MatchedSample> samples);

}  // namespace mcprox
