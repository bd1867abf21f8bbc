#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace symdx::metrics {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
    std::size_t classes = 0;
    std::vector<std::size_t> counts;

    std::size_t& at(std::size_t truth, std::size_t predicted) { return counts[truth * classes + predicted]; }
    std::size_t at(std::size_t truth, std::size_t predicted) const { return counts[truth * classes + predicted]; }
    std::size_t total() const;
    std::size_t support(std::size_t truth) const;

    bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws LabelOutOfRange or DimensionMismatch.
ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted,
                          std::size_t class_count);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;

    bool operator==(const ClassMetrics&) const = default;
};

struct EvalReport {
    std::string model;
    std::string features;
    std::uint64_t seed = 0;
    std::vector<std::string> class_names;
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    ConfusionMatrix confusion;

    bool operator==(const EvalReport&) const = default;
};

/// Per-class and macro precision/recall/F1. A zero denominator scores 0.
/// Throws EmptyMatrix when the matrix holds no samples.
EvalReport macro_metrics(const ConfusionMatrix& cm);

/// (class name, F1) ascending by F1, ties alphabetical.
std::vector<std::pair<std::string, double>> per_disease_f1(const EvalReport& report);

} // namespace symdx::metrics
