#include "mcprox/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mcprox/error.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

namespace {

void write_tree(std::ostream& out, const DecisionTree& tree) {
    out << "tree " << tree.nodes().size() << ' ' << tree.n_features() << '\n';
    for (const auto& n : tree.nodes()) {
        out << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
            << n.counts[0] << ' ' << n.counts[1] << ' ' << n.counts[2] << '\n';
    }
}

class Reader {
public:
    Reader(std::istream& in, std::string_view source) : in_(in), source_(source) {}

    // Next non-empty line split on spaces; the keyword is checked when given.
    std::vector<std::string> line(std::string_view keyword = {}) {
        std::string text;
        while (std::getline(in_, text)) {
            ++lineno_;
            const auto view = trim(text);
            if (view.empty()) continue;
            std::vector<std::string> tokens;
            for (auto t : split_fields(view, ' '))
                if (!t.empty()) tokens.emplace_back(t);
            if (!keyword.empty() && tokens.front() != keyword) fail("expected \"" + std::string(keyword) + "\"");
            return tokens;
        }
        fail("unexpected end of model");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError(source_ + ":" + std::to_string(lineno_) + ": " + what);
    }

    std::int64_t integer(const std::string& tok) const {
        const auto v = parse_int(tok);
        if (!v) fail("bad integer \"" + tok + "\"");
        return *v;
    }

    double real(const std::string& tok) const {
        const auto v = parse_double(tok);
        if (!v) fail("bad number \"" + tok + "\"");
        return *v;
    }

    void arity(const std::vector<std::string>& tokens, std::size_t n) const {
        if (tokens.size() != n) fail("expected " + std::to_string(n) + " fields");
    }

    DecisionTree tree() {
        const auto head = line("tree");
        arity(head, 3);
        const auto n_nodes = static_cast<std::size_t>(integer(head[1]));
        const auto n_features = static_cast<std::size_t>(integer(head[2]));
        std::vector<DecisionTree::Node> nodes(n_nodes);
        for (auto& node : nodes) {
            const auto t = line();
            arity(t, 7);
            node.feature = static_cast<std::int32_t>(integer(t[0]));
            node.threshold = real(t[1]);
            node.left = static_cast<std::uint32_t>(integer(t[2]));
            node.right = static_cast<std::uint32_t>(integer(t[3]));
            for (std::size_t c = 0; c < kNumClasses; ++c) {
                const auto v = integer(t[4 + c]);
                if (v < 0) fail("negative class count");
                node.counts[c] = static_cast<std::uint64_t>(v);
            }
        }
        try {
            return DecisionTree::from_nodes(n_features, std::move(nodes));
        } catch (const DataError& e) {
            fail(e.what());
        }
    }

private:
    std::istream& in_;
    std::string source_;
    std::size_t lineno_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const TrainedModel& model, const std::string& device,
                 const std::string& config_digest) {
    const auto& spec = roster_spec(model.number);
    out << "mcprox-model " << kModelFormatVersion << '\n';
    out << "number " << model.number << '\n';
    out << "kind " << to_string(spec.kind) << '\n';
    out << "device " << device << '\n';
    out << "config_digest " << (config_digest.empty() ? "-" : config_digest) << '\n';
    if (model.params) out << "params " << model.params->to_string() << '\n';
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ThresholdModel>) {
                out << "threshold " << format_double(m.thresholds.very_close_db()) << ' '
                    << format_double(m.thresholds.close_db()) << ' ' << format_double(m.tx_power_dbm) << ' '
                    << format_double(m.correction_db) << '\n';
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                out << "features " << to_string(m.features) << '\n';
                write_tree(out, m.tree);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                out << "features " << to_string(m.features) << '\n';
                out << "forest " << m.forest.trees().size() << '\n';
                for (const auto& t : m.forest.trees()) write_tree(out, t);
            } else {
                out << "combination " << (m.mode == CombineMode::OneHot ? "onehot" : "probability") << ' '
                    << format_double(m.weights.ble) << ' ' << format_double(m.weights.wifi24) << ' '
                    << format_double(m.weights.wifi5) << ' ' << m.components[0] << ' ' << m.components[1] << ' '
                    << m.components[2] << '\n';
            }
        },
        model.model);
    out << "end\n";
}

LoadedModel read_model(std::istream& in, std::string_view source) {
    Reader r(in, source);
    auto t = r.line("mcprox-model");
    r.arity(t, 2);
    if (r.integer(t[1]) != kModelFormatVersion) r.fail("unsupported model format version " + t[1]);

    LoadedModel out;
    t = r.line("number");
    r.arity(t, 2);
    out.model.number = static_cast<int>(r.integer(t[1]));
    const ModelSpec* spec = nullptr;
    try {
        spec = &roster_spec(out.model.number);
    } catch (const ConfigError& e) {
        r.fail(e.what());
    }
    t = r.line("kind");
    r.arity(t, 2);
    if (t[1] != to_string(spec->kind)) r.fail("kind " + t[1] + " does not match model " + std::to_string(spec->number));
    t = r.line("device");
    out.device = t.size() > 1 ? t[1] : "";
    t = r.line("config_digest");
    out.config_digest = t.size() > 1 && t[1] != "-" ? t[1] : "";

    t = r.line();
    if (t.front() == "params") {
        std::string joined;
        for (std::size_t i = 1; i < t.size(); ++i) joined += t[i] + ' ';
        try {
            out.model.params = HyperParams::parse(joined);
        } catch (const DataError& e) {
            r.fail(e.what());
        }
        t = r.line();
    }

    auto read_features = [&](const std::vector<std::string>& tokens) {
        if (tokens.front() != "features") r.fail("expected \"features\"");
        r.arity(tokens, 2);
        const auto f = parse_feature_set(tokens[1]);
        if (!f) r.fail("unknown feature set " + tokens[1]);
        return *f;
    };

    switch (spec->kind) {
        case ModelKind::BleThreshold: {
            if (t.front() != "threshold") r.fail("expected \"threshold\"");
            r.arity(t, 5);
            ThresholdModel m;
            try {
                m.thresholds = AttenuationThresholds(r.real(t[1]), r.real(t[2]));
            } catch (const ConfigError& e) {
                r.fail(e.what());
            }
            m.tx_power_dbm = r.real(t[3]);
            m.correction_db = r.real(t[4]);
            out.model.model = m;
            break;
        }
        case ModelKind::CombinedUnweighted:
        case ModelKind::CombinedWeighted: {
            if (t.front() != "combination") r.fail("expected \"combination\"");
            r.arity(t, 8);
            CombinedModel m;
            if (t[1] == "onehot") m.mode = CombineMode::OneHot;
            else if (t[1] == "probability") m.mode = CombineMode::Probability;
            else r.fail("unknown combine mode " + t[1]);
            m.weights = {r.real(t[2]), r.real(t[3]), r.real(t[4])};
            for (std::size_t i = 0; i < 3; ++i) m.components[i] = static_cast<int>(r.integer(t[5 + i]));
            out.model.model = m;
            break;
        }
        case ModelKind::DecisionTree:
        case ModelKind::RandomForest:
        case ModelKind::CombinedGeneral: {
            const auto features = read_features(t);
            if (spec->family == ModelFamily::DecisionTree) {
                out.model.model = TreeModel{features, r.tree()};
            } else {
                t = r.line("forest");
                r.arity(t, 2);
                const auto n = r.integer(t[1]);
                if (n < 1) r.fail("forest without trees");
                std::vector<DecisionTree> trees;
                for (std::int64_t k = 0; k < n; ++k) trees.push_back(r.tree());
                out.model.model = ForestModel{features, RandomForest::from_trees(std::move(trees))};
            }
            break;
        }
    }
    r.line("end");
    return out;
}

std::filesystem::path model_path(const std::filesystem::path& dir, int number) {
    char name[32];
    std::snprintf(name, sizeof name, "model_%02d.txt", number);
    return dir / name;
}

void save_roster(const std::filesystem::path& dir, const Roster& roster, const std::string& config_digest) {
    for (int n = 1; n <= kRosterSize; ++n) {
        if (!roster.has(n)) continue;
        auto out = open_output(model_path(dir, n));
        write_model(out, roster.at(n), roster.device(), config_digest);
    }
}

Roster load_roster(const std::filesystem::path& dir, const std::string& device) {
    Roster roster(device);
    for (int n = 1; n <= kRosterSize; ++n) {
        const auto path = model_path(dir, n);
        if (!std::filesystem::exists(path)) continue;
        auto in = open_input(path);
        auto loaded = read_model(in, path.string());
        if (loaded.model.number != n) throw DataError(path.string() + ": holds model " + std::to_string(loaded.model.number));
        roster.set(std::move(loaded.model));
    }
    return roster;
}

}  // namespace mcprox
