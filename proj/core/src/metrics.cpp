#include "mcprox/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "mcprox/error.hpp"
#include "mcprox/text_io.hpp"

namespace mcprox {

ConfusionMatrix ConfusionMatrix::from_pairs(std::span<const std::pair<DistanceClass, DistanceClass>> pairs) {
    if (pairs.empty()) throw DataError("confusion matrix of zero predictions");
    ConfusionMatrix m;
    for (const auto& [t, p] : pairs) m.add(t, p);
    return m;
}

void ConfusionMatrix::add(DistanceClass truth, DistanceClass predicted, std::uint64_t count) {
    cells_[index_of(truth)][index_of(predicted)] += count;
}

std::uint64_t ConfusionMatrix::row_total(DistanceClass truth) const {
    const auto& row = cells_[index_of(truth)];
    return row[0] + row[1] + row[2];
}

std::uint64_t ConfusionMatrix::column_total(DistanceClass predicted) const {
    const auto c = index_of(predicted);
    return cells_[0][c] + cells_[1][c] + cells_[2][c];
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t n = 0;
    for (const auto& row : cells_)
        for (auto v : row) n += v;
    return n;
}

std::uint64_t ConfusionMatrix::correct() const { return cells_[0][0] + cells_[1][1] + cells_[2][2]; }

namespace {

double ratio(std::uint64_t num, std::uint64_t den) { return den == 0 ? 0.0 : double(num) / double(den); }

}  // namespace

std::array<ClassMetrics, kNumClasses> per_class_metrics(const ConfusionMatrix& m) {
    std::array<ClassMetrics, kNumClasses> out;
    for (auto c : kAllClasses) {
        auto& cm = out[index_of(c)];
        cm.precision = ratio(m.at(c, c), m.column_total(c));
        cm.recall = ratio(m.at(c, c), m.row_total(c));
        const double sum = cm.precision + cm.recall;
        cm.f1 = sum == 0.0 ? 0.0 : 2.0 * cm.precision * cm.recall / sum;
    }
    return out;
}

std::array<double, kNumClasses> per_class_f1(const ConfusionMatrix& m) {
    const auto pc = per_class_metrics(m);
    return {pc[0].f1, pc[1].f1, pc[2].f1};
}

double accuracy(const ConfusionMatrix& m) { return ratio(m.correct(), m.total()); }

double macro_f1(const ConfusionMatrix& m) {
    const auto f = per_class_f1(m);
    return (f[0] + f[1] + f[2]) / 3.0;
}

EvalReport make_report(std::string model, std::string dataset, std::string device, const ConfusionMatrix& m) {
    EvalReport r;
    r.model = std::move(model);
    r.dataset = std::move(dataset);
    r.device = std::move(device);
    r.matrix = m;
    r.per_class = per_class_metrics(m);
    r.accuracy = accuracy(m);
    r.macro_f1 = macro_f1(m);
    return r;
}

void write_report_csv(std::ostream& out, std::span<const EvalReport> reports) {
    out << kReportHeader << '\n';
    for (const auto& r : reports) {
        out << r.model << ',' << r.dataset << ',' << r.device;
        for (const auto& pc : r.per_class) out << ',' << format_double(pc.f1);
        out << ',' << format_double(r.accuracy) << ',' << format_double(r.macro_f1) << '\n';
    }
}

std::vector<EvalReport> read_report_csv(std::istream& in, std::string_view source) {
    const auto table = CsvTable::read(in, source);
    std::size_t col[8];
    std::size_t k = 0;
    for (auto name : split_fields(kReportHeader)) col[k++] = table.require(name);
    std::vector<EvalReport> out;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& row = table.row(i);
        auto num = [&](std::size_t c) {
            const auto v = parse_double(row[col[c]]);
            if (!v) throw DataError(std::string(source) + ":" + std::to_string(table.line_of(i)) + ": bad number");
            return *v;
        };
        EvalReport r;
        r.model = row[col[0]];
        r.dataset = row[col[1]];
        r.device = row[col[2]];
        for (std::size_t c = 0; c < kNumClasses; ++c) r.per_class[c].f1 = num(3 + c);
        r.accuracy = num(6);
        r.macro_f1 = num(7);
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

template <typename T>
std::vector<T> unique_in_order(std::span<const EvalReport> reports, T EvalReport::*field) {
    std::vector<T> out;
    for (const auto& r : reports)
        if (std::find(out.begin(), out.end(), r.*field) == out.end()) out.push_back(r.*field);
    return out;
}

const EvalReport* lookup(std::span<const EvalReport> reports, std::string_view model, std::string_view dataset,
                         std::string_view device) {
    for (const auto& r : reports)
        if (r.model == model && r.dataset == dataset && r.device == device) return &r;
    return nullptr;
}

std::string cell(double v) { return format_fixed(v, 2); }

}  // namespace

std::string render_f1_tables(std::span<const EvalReport> reports) {
    const auto datasets = unique_in_order(reports, &EvalReport::dataset);
    const auto devices = unique_in_order(reports, &EvalReport::device);
    const auto models = unique_in_order(reports, &EvalReport::model);
    std::size_t name_width = 12;
    for (const auto& m : models) name_width = std::max(name_width, m.size());

    std::ostringstream out;
    for (const auto& dataset : datasets) {
        out << "dataset: " << dataset << '\n';
        out << std::left << std::setw(int(name_width)) << "model";
        for (const auto& d : devices) out << " | " << std::setw(23) << d;
        out << '\n' << std::setw(int(name_width)) << "";
        for (std::size_t i = 0; i < devices.size(); ++i) out << " | " << "f1_vc f1_c  f1_s  acc  ";
        out << '\n';
        for (const auto& m : models) {
            out << std::setw(int(name_width)) << m;
            for (const auto& d : devices) {
                out << " | ";
                if (const auto* r = lookup(reports, m, dataset, d)) {
                    for (const auto& pc : r->per_class) out << cell(pc.f1) << "  ";
                    out << cell(r->accuracy) << ' ';
                } else {
                    out << std::setw(23) << "absent";
                }
            }
            out << '\n';
        }
        out << '\n';
    }
    return out.str();
}

std::string render_macro_f1_comparison(std::span<const EvalReport> reports, std::string_view baseline,
                                       std::string_view candidate) {
    const auto datasets = unique_in_order(reports, &EvalReport::dataset);
    const auto devices = unique_in_order(reports, &EvalReport::device);
    std::ostringstream out;
    int set_width = 12;
    for (const auto& ds : datasets) set_width = std::max(set_width, int(ds.size()));
    out << std::left << std::setw(set_width) << "set";
    for (const auto& d : devices) out << " | " << std::setw(18) << d;
    out << '\n' << std::setw(set_width) << "";
    for (std::size_t i = 0; i < devices.size(); ++i) out << " | base  cand  delta ";
    out << '\n';

    std::map<std::string, std::pair<double, double>> sums;
    std::map<std::string, int> counts;
    for (const auto& ds : datasets) {
        out << std::setw(set_width) << ds;
        for (const auto& d : devices) {
            const auto* b = lookup(reports, baseline, ds, d);
            const auto* c = lookup(reports, candidate, ds, d);
            out << " | ";
            if (b && c) {
                const double delta = c->macro_f1 - b->macro_f1;
                out << cell(b->macro_f1) << "  " << cell(c->macro_f1) << "  " << (delta >= 0 ? "+" : "")
                    << cell(delta) << ' ';
                sums[d].first += b->macro_f1;
                sums[d].second += c->macro_f1;
                ++counts[d];
            } else {
                out << std::setw(18) << "absent";
            }
        }
        out << '\n';
    }
    out << std::setw(set_width) << "total";
    for (const auto& d : devices) {
        out << " | ";
        if (counts[d] == 0) {
            out << std::setw(18) << "absent";
            continue;
        }
        const double b = sums[d].first / counts[d];
        const double c = sums[d].second / counts[d];
        out << cell(b) << "  " << cell(c) << "  " << (c - b >= 0 ? "+" : "") << cell(c - b) << ' ';
    }
    out << '\n';
    return out.str();
}

std::string render_confusion(const ConfusionMatrix& m, std::string_view title) {
    std::ostringstream out;
    out << title << '\n';
    out << std::left << std::setw(12) << "true/pred";
    for (auto c : kAllClasses) out << std::right << std::setw(12) << to_string(c);
    out << std::setw(12) << "n-true" << '\n';
    for (auto t : kAllClasses) {
        out << std::left << std::setw(12) << to_string(t) << std::right;
        for (auto p : kAllClasses) out << std::setw(12) << m.at(t, p);
        out << std::setw(12) << m.row_total(t) << '\n';
    }
    out << std::left << std::setw(12) << "n-pred" << std::right;
    for (auto p : kAllClasses) out << std::setw(12) << m.column_total(p);
    out << std::setw(12) << m.total() << '\n';
    return out.str();
}

}  // namespace mcprox
