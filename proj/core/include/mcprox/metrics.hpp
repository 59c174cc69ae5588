#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcprox/types.hpp"

namespace mcprox {

/// 3x3 counts; rows are the true class, columns the prediction.
class ConfusionMatrix {
public:
    using Cells = std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>;

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(const Cells& cells) : cells_(cells) {}

    /// Throws DataError on an empty list.
    static ConfusionMatrix from_pairs(std::span<const std::pair<DistanceClass, DistanceClass>> true_predicted);

    void add(DistanceClass truth, DistanceClass predicted, std::uint64_t count = 1);

    std::uint64_t at(DistanceClass truth, DistanceClass predicted) const {
        return cells_[index_of(truth)][index_of(predicted)];
    }
    std::uint64_t row_total(DistanceClass truth) const;
    std::uint64_t column_total(DistanceClass predicted) const;
    std::uint64_t total() const;
    std::uint64_t correct() const;
    const Cells& cells() const { return cells_; }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    Cells cells_{};
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Undefined ratios (0/0) are reported as 0, so an absent class has F1 = 0.
std::array<ClassMetrics, kNumClasses> per_class_metrics(const ConfusionMatrix& m);
std::array<double, kNumClasses> per_class_f1(const ConfusionMatrix& m);
/// Trace over total; 0 for an empty matrix.
double accuracy(const ConfusionMatrix& m);
/// Unweighted mean of the three per-class F1 values.
double macro_f1(const ConfusionMatrix& m);

struct EvalReport {
    std::string model;
    std::string dataset;
    std::string device;
    ConfusionMatrix matrix;  // all zero when loaded from the machine-readable form
    std::array<ClassMetrics, kNumClasses> per_class{};
    double accuracy = 0.0;
    double macro_f1 = 0.0;
};

EvalReport make_report(std::string model, std::string dataset, std::string device, const ConfusionMatrix& m);

inline constexpr std::string_view kReportHeader = "model,dataset,device,f1_vc,f1_c,f1_safe,acc,macro_f1";

/// Full-precision machine-readable rows.
void write_report_csv(std::ostream& out, std::span<const EvalReport> reports);
/// Reads rows written by write_report_csv; precision/recall and matrix are not carried.
std::vector<EvalReport> read_report_csv(std::istream& in, std::string_view source = "<report>");

/// One block per dataset, device groups side by side, models as rows (two decimals).
std::string render_f1_tables(std::span<const EvalReport> reports);

/// Macro-F1 of `baseline` vs `candidate` per dataset and device with the delta and
/// a final row averaging the datasets.
std::string render_macro_f1_comparison(std::span<const EvalReport> reports, std::string_view baseline,
                                       std::string_view candidate);

std::string render_confusion(const ConfusionMatrix& m, std::string_view title);

}  // namespace mcprox
