#pragma once

#include "symdx/cluster.hpp"
#include "symdx/corpus.hpp"
#include "symdx/metrics.hpp"
#include "symdx/reduce.hpp"
#include "symdx/serialize.hpp"
#include "symdx/symptomnet.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace symdx::report {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool operator==(const Table&) const = default;
};

enum class Format { csv, structured };

Format parse_format(std::string_view s);

std::string to_csv(const Table& t);
Table parse_csv(const std::string& text);
ordered_json table_to_json(const Table& t);

/// Writes `t` in the requested format. Throws IoFailure.
void export_table(const Table& t, const std::filesystem::path& path, Format format = Format::csv);
Table read_csv(const std::filesystem::path& path);

ordered_json report_to_json(const metrics::EvalReport& r);
metrics::EvalReport report_from_json(const ordered_json& j);
void export_report(const metrics::EvalReport& r, const std::filesystem::path& path,
                   Format format = Format::structured);

/// One row per report with macro F1, precision, recall.
Table evaluation_table(const std::vector<metrics::EvalReport>& reports);
Table per_class_table(const metrics::EvalReport& r);
Table confusion_table(const metrics::EvalReport& r);

Table occurrence_series(const symptomnet::OccurrenceTable& occ);
Table symptom_occurrence_table(const corpus::SymptomVocabulary& vocab,
                               const symptomnet::OccurrenceTable& occ);
Table uniqueness_table(const symptomnet::UniquenessReport& u);
Table similarity_table(const symptomnet::SimilarityResult& s, const std::vector<std::string>& names);
Table similar_pairs_table(const std::vector<symptomnet::SimilarPair>& pairs,
                          const std::vector<std::string>& names);

Table pca_sweep_table(const std::vector<reduce::SweepPoint>& sweep);
Table cluster_sweep_table(const std::vector<cluster::SweepEntry>& sweep);
Table membership_table(const cluster::Clustering& c, const std::vector<std::string>& row_labels);
Table cluster_size_table(const cluster::Clustering& c);
Table loss_table(const std::vector<double>& history);

} // namespace symdx::report
