#include "mcprox/decision_tree.hpp"

#include <algorithm>
#include <numeric>

#include "mcprox/error.hpp"

namespace mcprox {

double gini(std::span<const std::uint64_t> counts) {
    const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) throw DataError("gini of an empty node");
    double sum_sq = 0.0;
    for (auto c : counts) {
        const double p = double(c) / double(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

DistanceClass argmax_closer(const ClassScores& scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kNumClasses; ++i)
        if (scores[i] > scores[best] + kScoreTolerance) best = i;
    return class_at(best);
}

namespace {

double weighted_gini(const ClassCounts& counts, std::uint64_t n) {
    return n == 0 ? 0.0 : gini(counts) * double(n);
}

struct Scratch {
    std::vector<std::pair<double, int>> column;
};

// Best split of one feature; returns false if none beats `best`.
bool scan_feature(const Dataset& data, std::span<const std::size_t> rows, std::size_t feature,
                  std::size_t min_leaf, const ClassCounts& parent, double parent_gini, Split& best, Scratch& scratch) {
    auto& col = scratch.column;
    col.clear();
    for (auto r : rows) col.emplace_back(data.value(r, feature), static_cast<int>(data.label(r)));
    std::sort(col.begin(), col.end());

    const auto n = static_cast<std::uint64_t>(col.size());
    ClassCounts left{};
    bool improved = false;
    for (std::size_t i = 0; i + 1 < col.size(); ++i) {
        ++left[static_cast<std::size_t>(col[i].second)];
        if (col[i].first == col[i + 1].first) continue;
        const auto n_left = static_cast<std::uint64_t>(i + 1);
        const auto n_right = n - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        ClassCounts right;
        for (std::size_t c = 0; c < kNumClasses; ++c) right[c] = parent[c] - left[c];
        const double child = (weighted_gini(left, n_left) + weighted_gini(right, n_right)) / double(n);
        const double gain = parent_gini - child;
        if (gain > best.gain + kGainTolerance) {
            double threshold = 0.5 * (col[i].first + col[i + 1].first);
            if (threshold >= col[i + 1].first) threshold = col[i].first;
            best = {feature, threshold, gain};
            improved = true;
        }
    }
    return improved;
}

ClassCounts count_classes(const Dataset& data, std::span<const std::size_t> rows) {
    ClassCounts counts{};
    for (auto r : rows) ++counts[index_of(data.label(r))];
    return counts;
}

}  // namespace

std::optional<Split> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidate_features, std::size_t min_samples_leaf) {
    if (rows.size() < 2) return std::nullopt;
    const auto parent = count_classes(data, rows);
    const double parent_gini = gini(parent);
    Split best{0, 0.0, kGainTolerance};
    bool found = false;
    Scratch scratch;
    std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
    std::sort(features.begin(), features.end());
    for (auto f : features)
        found |= scan_feature(data, rows, f, std::max<std::size_t>(min_samples_leaf, 1), parent, parent_gini, best,
                              scratch);
    if (!found) return std::nullopt;
    return best;
}

DecisionTree DecisionTree::fit(const Dataset& data, const TreeParams& params, Rng* rng) {
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return fit(data, rows, params, rng);
}

DecisionTree DecisionTree::fit(const Dataset& data, std::span<const std::size_t> rows_in, const TreeParams& params,
                               Rng* rng) {
    if (rows_in.empty()) throw DataError("cannot fit a tree on zero rows");
    DecisionTree tree;
    tree.n_features_ = data.n_features();
    std::vector<std::size_t> rows(rows_in.begin(), rows_in.end());

    const auto n_features = data.n_features();
    const bool subsample = params.features_per_split > 0 && params.features_per_split < n_features;
    if (subsample && !rng) throw ConfigError("feature subsampling needs a random generator");
    std::vector<std::size_t> all_features(n_features);
    std::iota(all_features.begin(), all_features.end(), std::size_t{0});

    struct Pending {
        std::uint32_t node;
        std::size_t begin, end, depth;
    };
    tree.nodes_.push_back({});
    std::vector<Pending> stack{{0, 0, rows.size(), 0}};
    std::vector<std::size_t> features;
    while (!stack.empty()) {
        const auto job = stack.back();
        stack.pop_back();
        const std::span<const std::size_t> span(rows.data() + job.begin, job.end - job.begin);
        const auto counts = count_classes(data, span);
        tree.nodes_[job.node].counts = counts;

        const bool pure = std::count(counts.begin(), counts.end(), 0u) + 1 >= std::ptrdiff_t(kNumClasses);
        if (pure || span.size() < std::max<std::size_t>(params.min_samples_split, 2) ||
            (params.max_depth && job.depth >= *params.max_depth))
            continue;

        if (subsample) {
            features = all_features;
            for (std::size_t i = 0; i < params.features_per_split; ++i)
                std::swap(features[i], features[i + uniform_index(*rng, n_features - i)]);
            features.resize(params.features_per_split);
        } else {
            features = all_features;
        }
        const auto split = best_split(data, span, features, params.min_samples_leaf);
        if (!split) continue;

        const auto mid = std::stable_partition(rows.begin() + static_cast<std::ptrdiff_t>(job.begin),
                                               rows.begin() + static_cast<std::ptrdiff_t>(job.end),
                                               [&](std::size_t r) { return data.value(r, split->feature) <= split->threshold; });
        const auto mid_index = static_cast<std::size_t>(mid - rows.begin());

        const auto left = static_cast<std::uint32_t>(tree.nodes_.size());
        tree.nodes_.push_back({});
        const auto right = static_cast<std::uint32_t>(tree.nodes_.size());
        tree.nodes_.push_back({});
        auto& node = tree.nodes_[job.node];
        node.feature = static_cast<std::int32_t>(split->feature);
        node.threshold = split->threshold;
        node.left = left;
        node.right = right;
        // Right first so the left subtree is expanded next.
        stack.push_back({right, mid_index, job.end, job.depth + 1});
        stack.push_back({left, job.begin, mid_index, job.depth + 1});
    }
    return tree;
}

DecisionTree DecisionTree::from_nodes(std::size_t n_features, std::vector<Node> nodes) {
    if (nodes.empty()) throw DataError("tree without nodes");
    std::vector<int> parents(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.is_leaf()) {
            if (n.counts[0] + n.counts[1] + n.counts[2] == 0) throw DataError("leaf without samples");
            continue;
        }
        if (static_cast<std::size_t>(n.feature) >= n_features || n.left <= i || n.right <= i ||
            n.left >= nodes.size() || n.right >= nodes.size() || n.left == n.right)
            throw DataError("malformed tree node " + std::to_string(i));
        ++parents[n.left];
        ++parents[n.right];
    }
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (parents[i] != 1) throw DataError("tree node " + std::to_string(i) + " is not reachable exactly once");
    DecisionTree tree;
    tree.n_features_ = n_features;
    tree.nodes_ = std::move(nodes);
    return tree;
}

const DecisionTree::Node& DecisionTree::leaf_for(std::span<const double> x) const {
    const Node* node = &nodes_[0];
    while (!node->is_leaf())
        node = &nodes_[x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right];
    return *node;
}

DistanceClass DecisionTree::predict(std::span<const double> x) const {
    const auto& counts = leaf_for(x).counts;
    return argmax_closer({double(counts[0]), double(counts[1]), double(counts[2])});
}

ClassScores DecisionTree::predict_proba(std::span<const double> x) const {
    const auto& c = leaf_for(x).counts;
    const double total = double(c[0] + c[1] + c[2]);
    return {double(c[0]) / total, double(c[1]) / total, double(c[2]) / total};
}

std::optional<Split> DecisionTree::root_split() const {
    const auto& root = nodes_[0];
    if (root.is_leaf()) return std::nullopt;
    const auto& l = nodes_[root.left].counts;
    const auto& r = nodes_[root.right].counts;
    const auto nl = l[0] + l[1] + l[2];
    const auto nr = r[0] + r[1] + r[2];
    const double gain = gini(root.counts) - (gini(l) * double(nl) + gini(r) * double(nr)) / double(nl + nr);
    return Split{static_cast<std::size_t>(root.feature), root.threshold, gain};
}

std::size_t DecisionTree::depth() const {
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (!nodes_[i].is_leaf()) d[nodes_[i].left] = d[nodes_[i].right] = d[i] + 1;
    }
    return deepest;
}

std::size_t DecisionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

}  // namespace mcprox
