#include "mcprox/roster.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mcprox/error.hpp"

namespace mcprox {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::BleThreshold: return "ble_threshold";
        case ModelKind::DecisionTree: return "dt";
        case ModelKind::RandomForest: return "rf";
        case ModelKind::CombinedUnweighted: return "comb_special_unweighted";
        case ModelKind::CombinedWeighted: return "comb_special_weighted";
        case ModelKind::CombinedGeneral: return "comb_general";
    }
    return "?";
}

const std::array<ModelSpec, kRosterSize>& roster_specs() {
    using K = ModelKind;
    using F = FeatureSet;
    using M = ModelFamily;
    static const std::array<ModelSpec, kRosterSize> specs{{
        {1, K::BleThreshold, F::Ble, M::DecisionTree, {}, "BLE threshold based (GAEN approach)"},
        {2, K::DecisionTree, F::Ble, M::DecisionTree, {}, "BLE DT"},
        {3, K::RandomForest, F::Ble, M::RandomForest, {}, "BLE RF"},
        {4, K::DecisionTree, F::Wifi24, M::DecisionTree, {}, "WiFi 2.4 GHz DT"},
        {5, K::RandomForest, F::Wifi24, M::RandomForest, {}, "WiFi 2.4 GHz RF"},
        {6, K::DecisionTree, F::Wifi5, M::DecisionTree, {}, "WiFi 5 GHz DT"},
        {7, K::RandomForest, F::Wifi5, M::RandomForest, {}, "WiFi 5 GHz RF"},
        {8, K::CombinedUnweighted, F::Full, M::DecisionTree, {2, 4, 6}, "Unweighted combined special DT"},
        {9, K::CombinedWeighted, F::Full, M::DecisionTree, {2, 4, 6}, "Weighted combined special DT"},
        {10, K::CombinedUnweighted, F::Full, M::RandomForest, {3, 5, 7}, "Unweighted combined special RF"},
        {11, K::CombinedWeighted, F::Full, M::RandomForest, {3, 5, 7}, "Weighted combined special RF"},
        {12, K::CombinedGeneral, F::Full, M::DecisionTree, {}, "Combined general DT"},
        {13, K::CombinedGeneral, F::Full, M::RandomForest, {}, "Combined general RF"},
    }};
    return specs;
}

const ModelSpec& roster_spec(int number) {
    if (number < 1 || number > kRosterSize) throw ConfigError("no roster model " + std::to_string(number));
    return roster_specs()[static_cast<std::size_t>(number - 1)];
}

namespace {

void check_weights(const CombineWeights& w) {
    if (w.ble < 0 || w.wifi24 < 0 || w.wifi5 < 0 || std::abs(w.ble + w.wifi24 + w.wifi5 - 1.0) > 1e-9)
        throw ConfigError("combiner weights must be non-negative and sum to 1");
}

}  // namespace

DistanceClass combine_specialized(DistanceClass ble, DistanceClass wifi24, DistanceClass wifi5,
                                  const CombineWeights& weights) {
    check_weights(weights);
    ClassScores score{};
    score[index_of(ble)] += weights.ble;
    score[index_of(wifi24)] += weights.wifi24;
    score[index_of(wifi5)] += weights.wifi5;
    return argmax_closer(score);
}

DistanceClass combine_specialized(const ClassScores& ble, const ClassScores& wifi24, const ClassScores& wifi5,
                                  const CombineWeights& weights) {
    check_weights(weights);
    ClassScores score{};
    for (std::size_t c = 0; c < kNumClasses; ++c)
        score[c] = weights.ble * ble[c] + weights.wifi24 * wifi24[c] + weights.wifi5 * wifi5[c];
    return argmax_closer(score);
}

DistanceClass ThresholdModel::predict(const MatchedSample& s) const {
    return classify_attenuation(attenuation(tx_power_dbm, s.ble_rssi, correction_db), thresholds);
}

void Roster::set(TrainedModel model) {
    const auto& spec = roster_spec(model.number);
    models_[static_cast<std::size_t>(spec.number - 1)] = std::move(model);
}

bool Roster::has(int number) const {
    return number >= 1 && number <= kRosterSize && models_[static_cast<std::size_t>(number - 1)].has_value();
}

bool Roster::available(int number) const {
    if (!has(number)) return false;
    const auto& spec = roster_spec(number);
    if (spec.kind == ModelKind::CombinedUnweighted || spec.kind == ModelKind::CombinedWeighted)
        return std::all_of(spec.components.begin(), spec.components.end(), [&](int c) { return has(c); });
    return true;
}

const TrainedModel& Roster::at(int number) const {
    if (!has(number)) throw DataError("model " + std::to_string(number) + " is not trained for " + device_);
    return *models_[static_cast<std::size_t>(number - 1)];
}

namespace {

template <typename Model>
std::array<double, 5> features_of(const Model& m, const MatchedSample& s) {
    std::array<double, 5> buf{};
    extract_features(s, m.features, std::span(buf).first(feature_count(m.features)));
    return buf;
}

}  // namespace

DistanceClass Roster::predict(int number, const MatchedSample& s) const {
    if (!available(number))
        throw DataError("model " + std::to_string(number) + " is not available for " + device_);
    const auto& m = at(number);
    return std::visit(
        [&](const auto& model) -> DistanceClass {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, ThresholdModel>) {
                return model.predict(s);
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                const auto x = features_of(model, s);
                return model.tree.predict(std::span(x).first(model.tree.n_features()));
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                const auto x = features_of(model, s);
                return model.forest.predict(std::span(x).first(model.forest.n_features()));
            } else {
                const auto& c = model.components;
                if (model.mode == CombineMode::Probability)
                    return combine_specialized(predict_proba(c[0], s), predict_proba(c[1], s), predict_proba(c[2], s),
                                               model.weights);
                return combine_specialized(predict(c[0], s), predict(c[1], s), predict(c[2], s), model.weights);
            }
        },
        m.model);
}

ClassScores Roster::predict_proba(int number, const MatchedSample& s) const {
    const auto& m = at(number);
    if (const auto* tree = std::get_if<TreeModel>(&m.model)) {
        const auto x = features_of(*tree, s);
        return tree->tree.predict_proba(std::span(x).first(tree->tree.n_features()));
    }
    if (const auto* forest = std::get_if<ForestModel>(&m.model)) {
        const auto x = features_of(*forest, s);
        return forest->forest.predict_proba(std::span(x).first(forest->forest.n_features()));
    }
    ClassScores one_hot{};
    one_hot[index_of(predict(number, s))] = 1.0;
    return one_hot;
}

RosterTraining build_roster(const PreparedDataset& data, const std::string& device,
                            const CorrectionTable* corrections, const RosterOptions& options) {
    std::set<int> wanted;
    for (int n : options.models) {
        const auto& spec = roster_spec(n);
        wanted.insert(n);
        for (int c : spec.components)
            if (c) wanted.insert(c);
    }

    RosterTraining out{Roster(device), {}};
    for (int n : wanted) {
        const auto& spec = roster_spec(n);
        TrainedModel tm;
        tm.number = n;
        switch (spec.kind) {
            case ModelKind::BleThreshold: {
                if (!corrections) throw ConfigError("model 1 needs a correction table (run calibrate first)");
                ThresholdModel m;
                m.thresholds = options.thresholds;
                m.tx_power_dbm = options.tx_power_dbm;
                m.correction_db = corrections->at(device);
                tm.model = m;
                break;
            }
            case ModelKind::CombinedUnweighted:
            case ModelKind::CombinedWeighted: {
                CombinedModel m;
                m.components = spec.components;
                m.weights = spec.kind == ModelKind::CombinedWeighted ? kBandWeighted : kUnweighted;
                m.mode = options.combine_mode;
                tm.model = m;
                break;
            }
            case ModelKind::DecisionTree:
            case ModelKind::RandomForest:
            case ModelKind::CombinedGeneral: {
                const auto train = Dataset::from_samples(data.train, spec.features);
                const auto test = Dataset::from_samples(data.test, spec.features);
                if (train.empty()) throw DataError("no labelled training rows for " + device);
                const auto seed = mix_seed(options.seed, static_cast<std::uint64_t>(n));
                auto search = grid_search(spec.family, options.grid, train, test, seed);
                tm.params = search.best;
                if (spec.family == ModelFamily::DecisionTree)
                    tm.model = TreeModel{spec.features, DecisionTree::fit(train, tree_params(search.best, train.n_features()))};
                else
                    tm.model = ForestModel{spec.features,
                                           RandomForest::fit(train, forest_params(search.best, train.n_features(), seed))};
                out.searches.emplace(n, std::move(search));
                break;
            }
        }
        out.roster.set(std::move(tm));
    }
    return out;
}

ConfusionMatrix evaluate_model(const Roster& roster, int number, std::span<const MatchedSample> samples) {
    ConfusionMatrix m;
    for (const auto& s : samples)
        if (s.label) m.add(*s.label, roster.predict(number, s));
    return m;
}

}  // namespace mcprox
