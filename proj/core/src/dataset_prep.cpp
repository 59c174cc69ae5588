#include "mcprox/dataset_prep.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mcprox/error.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

namespace {

using CellKey = std::pair<DistanceClass, std::string>;

std::string describe(const CellKey& cell) {
    return "(" + std::string(to_string(cell.first)) + ", " + cell.second + ")";
}

// Cells keyed by (class, environment), each holding rows per distance.
std::map<CellKey, std::map<double, std::vector<std::size_t>>> cells_of(std::span<const MatchedSample> samples) {
    std::map<CellKey, std::map<double, std::vector<std::size_t>>> cells;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!s.label) continue;
        cells[{*s.label, s.environment}][s.distance_cm.value_or(0.0)].push_back(i);
    }
    return cells;
}

void require_complete(const std::map<CellKey, std::map<double, std::vector<std::size_t>>>& cells) {
    std::set<std::string> environments;
    for (const auto& [key, _] : cells) environments.insert(key.second);
    for (const auto& env : environments)
        for (auto c : kAllClasses)
            if (!cells.contains({c, env})) throw DataError("empty class/environment cell " + describe({c, env}));
}

// First k of a partial Fisher-Yates shuffle.
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> items, std::size_t k, Rng& rng) {
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + uniform_index(rng, items.size() - i);
        std::swap(items[i], items[j]);
    }
    items.resize(k);
    return items;
}

}  // namespace

std::vector<std::size_t> upsample_balance(std::span<const MatchedSample> samples, std::size_t per_cell_target,
                                          Rng& rng) {
    const auto cells = cells_of(samples);
    require_complete(cells);
    std::vector<std::size_t> pool;
    for (const auto& [cell, by_distance] : cells) {
        const auto k = by_distance.size();
        std::size_t slot = 0;
        for (const auto& [distance, rows] : by_distance) {
            const auto quota = per_cell_target / k + (slot++ < per_cell_target % k ? 1 : 0);
            if (quota >= rows.size()) {
                pool.insert(pool.end(), rows.begin(), rows.end());
                for (std::size_t i = rows.size(); i < quota; ++i) pool.push_back(rows[uniform_index(rng, rows.size())]);
            } else {
                auto picked = draw_without_replacement(rows, quota, rng);
                pool.insert(pool.end(), picked.begin(), picked.end());
            }
        }
    }
    return pool;
}

std::vector<std::size_t> stratified_class_sample(std::span<const MatchedSample> samples,
                                                 std::span<const std::size_t> pool, std::size_t n_per_class,
                                                 std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x5A));
    std::map<DistanceClass, std::map<double, std::vector<std::size_t>>> by_class;
    for (auto i : pool) {
        const auto& s = samples[i];
        if (!s.label) throw DataError("stratified sample over unlabeled row");
        by_class[*s.label][s.distance_cm.value_or(0.0)].push_back(i);
    }

    std::vector<std::size_t> out;
    for (auto c : kAllClasses) {
        auto it = by_class.find(c);
        std::size_t total = 0;
        if (it != by_class.end())
            for (const auto& [_, rows] : it->second) total += rows.size();
        if (total < n_per_class)
            throw DataError("class " + std::string(to_string(c)) + " has " + std::to_string(total) +
                            " pooled rows, fewer than the " + std::to_string(n_per_class) + " requested");
        if (n_per_class == 0) continue;

        // Largest-remainder quotas; equal remainders favour the smaller distance.
        std::vector<std::pair<double, std::size_t>> quotas;
        std::vector<std::tuple<std::uint64_t, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (const auto& [distance, rows] : it->second) {
            const auto scaled = static_cast<std::uint64_t>(n_per_class) * rows.size();
            quotas.emplace_back(distance, static_cast<std::size_t>(scaled / total));
            assigned += quotas.back().second;
            remainders.emplace_back(scaled % total, quotas.size() - 1);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
        for (std::size_t r = 0; assigned < n_per_class; ++r, ++assigned) ++quotas[std::get<1>(remainders[r])].second;

        for (const auto& [distance, quota] : quotas) {
            auto picked = draw_without_replacement(it->second.at(distance), quota, rng);
            out.insert(out.end(), picked.begin(), picked.end());
        }
    }
    return out;
}

SplitIndices split_train_test_eval(std::span<const MatchedSample> samples, std::span<const std::size_t> rows,
                                   std::uint64_t seed, const SplitRatios& ratios) {
    if (ratios.train < 0 || ratios.test < 0 || ratios.eval < 0 ||
        std::abs(ratios.train + ratios.test + ratios.eval - 1.0) > 1e-9)
        throw ConfigError("split ratios must be non-negative and sum to 1");
    Rng rng(mix_seed(seed, 0x5B));
    std::map<DistanceClass, std::vector<std::size_t>> by_class;
    for (auto i : rows) by_class[samples[i].label.value_or(DistanceClass::Safe)].push_back(i);

    SplitIndices out;
    for (auto& [_, members] : by_class) {
        shuffle(std::span(members), rng);
        const auto n = members.size();
        const auto n_test = static_cast<std::size_t>(std::floor(double(n) * ratios.test + 1e-9));
        const auto n_eval = static_cast<std::size_t>(std::floor(double(n) * ratios.eval + 1e-9));
        out.test.insert(out.test.end(), members.begin(), members.begin() + n_test);
        out.eval.insert(out.eval.end(), members.begin() + n_test, members.begin() + n_test + n_eval);
        out.train.insert(out.train.end(), members.begin() + n_test + n_eval, members.end());
    }
    shuffle(std::span(out.train), rng);
    shuffle(std::span(out.test), rng);
    shuffle(std::span(out.eval), rng);
    return out;
}

HoldoutResult holdout_scenarios(std::span<const MatchedSample> samples, const RunMetadata& metadata) {
    HoldoutResult out;
    for (const auto& s : samples) {
        const bool scenario = metadata.setup_of(s.run_id) == Setup::Scenario || s.environment == "train";
        (scenario ? out.scenario : out.ground_truth).push_back(s);
    }
    return out;
}

std::size_t default_cell_target(std::span<const MatchedSample> samples, std::size_t n_per_class) {
    const auto cells = cells_of(samples);
    std::size_t largest = 0;
    std::set<std::string> environments;
    for (const auto& [key, by_distance] : cells) {
        environments.insert(key.second);
        std::size_t n = 0;
        for (const auto& [_, rows] : by_distance) n += rows.size();
        largest = std::max(largest, n);
    }
    if (environments.empty()) return largest;
    const auto per_env = (n_per_class + environments.size() - 1) / environments.size();
    return std::max(largest, per_env);
}

namespace {

std::vector<MatchedSample> gather(std::span<const MatchedSample> samples, std::span<const std::size_t> rows) {
    std::vector<MatchedSample> out;
    out.reserve(rows.size());
    for (auto i : rows) out.push_back(samples[i]);
    return out;
}

}  // namespace

PreparedDataset prepare_dataset(std::span<const MatchedSample> ground_truth, const PrepOptions& options) {
    PreparedDataset out;
    out.seed = options.seed;
    out.split_first = options.split_first;

    auto note_provenance = [&](std::span<const std::size_t> rows, std::span<const MatchedSample> base) {
        for (auto i : rows) {
            const auto& s = base[i];
            ++out.provenance[{*s.label, s.environment, s.distance_cm.value_or(0.0)}];
        }
    };

    if (!options.split_first) {
        Rng rng(mix_seed(options.seed, 0x59));
        const auto target = options.per_cell_target ? options.per_cell_target
                                                    : default_cell_target(ground_truth, options.n_per_class);
        const auto pool = upsample_balance(ground_truth, target, rng);
        const auto sampled = stratified_class_sample(ground_truth, pool, options.n_per_class, options.seed);
        note_provenance(sampled, ground_truth);
        const auto split = split_train_test_eval(ground_truth, sampled, options.seed, options.ratios);
        const std::set<std::size_t> in_train(split.train.begin(), split.train.end());
        for (const auto* part : {&split.test, &split.eval})
            for (auto i : *part) out.leaked_rows += in_train.contains(i);
        out.train = gather(ground_truth, split.train);
        out.test = gather(ground_truth, split.test);
        out.eval = gather(ground_truth, split.eval);
        return out;
    }

    // Split the originals, then balance and sample each part on its own.
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < ground_truth.size(); ++i)
        if (ground_truth[i].label) all.push_back(i);
    const auto originals = split_train_test_eval(ground_truth, all, options.seed, options.ratios);
    const std::pair<const std::vector<std::size_t>*, double> parts[] = {
        {&originals.train, options.ratios.train}, {&originals.test, options.ratios.test},
        {&originals.eval, options.ratios.eval}};
    std::vector<MatchedSample>* targets[] = {&out.train, &out.test, &out.eval};
    for (std::size_t k = 0; k < 3; ++k) {
        const auto subset = gather(ground_truth, *parts[k].first);
        const auto n = static_cast<std::size_t>(std::llround(double(options.n_per_class) * parts[k].second));
        Rng rng(mix_seed(options.seed, 0x60 + k));
        const auto target =
            options.per_cell_target ? std::size_t(std::llround(double(options.per_cell_target) * parts[k].second))
                                    : default_cell_target(subset, n);
        const auto pool = upsample_balance(subset, target, rng);
        const auto sampled = stratified_class_sample(subset, pool, n, mix_seed(options.seed, k));
        note_provenance(sampled, subset);
        auto rows = gather(subset, sampled);
        shuffle(std::span(rows), rng);
        *targets[k] = std::move(rows);
    }
    return out;
}

}  // namespace mcprox
