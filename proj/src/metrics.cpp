#include "symdx/metrics.hpp"

#include "symdx/error.hpp"

#include <algorithm>
#include <numeric>

namespace symdx::metrics {

std::size_t ConfusionMatrix::total() const
{
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::support(std::size_t truth) const
{
    std::size_t s = 0;
    for (std::size_t p = 0; p < classes; ++p)
        s += at(truth, p);
    return s;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted,
                          std::size_t class_count)
{
    if (truth.size() != predicted.size())
        fail(ErrorCode::DimensionMismatch, "label vectors differ in length");
    ConfusionMatrix cm{class_count, std::vector<std::size_t>(class_count * class_count, 0)};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (int label : {truth[i], predicted[i]})
            if (label < 0 || static_cast<std::size_t>(label) >= class_count)
                fail(ErrorCode::LabelOutOfRange, "label " + std::to_string(label) + " at sample " +
                                                     std::to_string(i));
        ++cm.at(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
    }
    return cm;
}

EvalReport macro_metrics(const ConfusionMatrix& cm)
{
    const std::size_t total = cm.total();
    if (cm.classes == 0 || total == 0)
        fail(ErrorCode::EmptyMatrix, "confusion matrix holds no samples");

    EvalReport report;
    report.confusion = cm;
    std::size_t correct = 0;
    for (std::size_t c = 0; c < cm.classes; ++c) {
        const std::size_t tp = cm.at(c, c);
        std::size_t predicted = 0;
        for (std::size_t t = 0; t < cm.classes; ++t)
            predicted += cm.at(t, c);
        const std::size_t actual = cm.support(c);
        ClassMetrics m;
        m.support = actual;
        m.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
        m.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        report.per_class.push_back(m);
        report.macro_precision += m.precision;
        report.macro_recall += m.recall;
        report.macro_f1 += m.f1;
        correct += tp;
    }
    const auto k = static_cast<double>(cm.classes);
    report.macro_precision /= k;
    report.macro_recall /= k;
    report.macro_f1 /= k;
    report.accuracy = static_cast<double>(correct) / static_cast<double>(total);
    return report;
}

std::vector<std::pair<std::string, double>> per_disease_f1(const EvalReport& report)
{
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        std::string name = c < report.class_names.size() ? report.class_names[c] : std::to_string(c);
        out.emplace_back(std::move(name), report.per_class[c].f1);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second < b.second;
        return a.first < b.first;
    });
    return out;
}

} // namespace symdx::metrics
