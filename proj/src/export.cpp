#include "symdx/export.hpp"

#include "symdx/error.hpp"

#include <charconv>
#include <cmath>

namespace symdx::report {

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        fail(ErrorCode::IoFailure, "cannot format number");
    return {buf, ptr};
}

double parse_double(const std::string& s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorCode::MalformedRow, "not a number: '" + s + "'");
    return v;
}

Format parse_format(std::string_view s)
{
    if (s == "csv")
        return Format::csv;
    if (s == "structured" || s == "json")
        return Format::structured;
    fail(ErrorCode::InvalidArgument, "unknown export format '" + std::string(s) + "'");
}

namespace {

std::string escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void append_row(std::string& out, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out.push_back(',');
        out += escape(cells[i]);
    }
    out.push_back('\n');
}

std::string count(std::size_t n)
{
    return std::to_string(n);
}

} // namespace

std::string to_csv(const Table& t)
{
    std::string out;
    append_row(out, t.header);
    for (const auto& r : t.rows)
        append_row(out, r);
    return out;
}

Table parse_csv(const std::string& text)
{
    Table t;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false, first = true;
    auto finish_row = [&] {
        row.push_back(std::move(cell));
        cell.clear();
        if (first)
            t.header = std::move(row);
        else
            t.rows.push_back(std::move(row));
        row.clear();
        first = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                cell.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\n') {
            finish_row();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    if (!cell.empty() || !row.empty())
        finish_row();
    return t;
}

ordered_json table_to_json(const Table& t)
{
    ordered_json j;
    j["columns"] = t.header;
    j["rows"] = t.rows;
    return j;
}

void export_table(const Table& t, const std::filesystem::path& path, Format format)
{
    write_text_file(path, format == Format::csv ? to_csv(t) : table_to_json(t).dump(2) + "\n");
}

Table read_csv(const std::filesystem::path& path)
{
    return parse_csv(read_text_file(path));
}

ordered_json report_to_json(const metrics::EvalReport& r)
{
    ordered_json j;
    j["schema"] = "symdx.report";
    j["version"] = 1;
    j["model"] = r.model;
    j["features"] = r.features;
    j["seed"] = r.seed;
    j["macro"] = {{"precision", r.macro_precision}, {"recall", r.macro_recall}, {"f1", r.macro_f1}};
    j["accuracy"] = r.accuracy;
    ordered_json classes = ordered_json::array();
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        classes.push_back({{"name", c < r.class_names.size() ? r.class_names[c] : std::to_string(c)},
                           {"precision", m.precision},
                           {"recall", m.recall},
                           {"f1", m.f1},
                           {"support", m.support}});
    }
    j["classes"] = classes;
    j["confusion"] = {{"classes", r.confusion.classes}, {"counts", r.confusion.counts}};
    return j;
}

metrics::EvalReport report_from_json(const ordered_json& j)
{
    check_schema(j, "symdx.report", 1);
    try {
        metrics::EvalReport r;
        r.model = j.at("model").get<std::string>();
        r.features = j.at("features").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.macro_precision = j.at("macro").at("precision").get<double>();
        r.macro_recall = j.at("macro").at("recall").get<double>();
        r.macro_f1 = j.at("macro").at("f1").get<double>();
        r.accuracy = j.at("accuracy").get<double>();
        for (const auto& c : j.at("classes")) {
            r.class_names.push_back(c.at("name").get<std::string>());
            r.per_class.push_back({c.at("precision").get<double>(), c.at("recall").get<double>(),
                                   c.at("f1").get<double>(), c.at("support").get<std::size_t>()});
        }
        r.confusion.classes = j.at("confusion").at("classes").get<std::size_t>();
        r.confusion.counts = j.at("confusion").at("counts").get<std::vector<std::size_t>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ModelFormat, e.what());
    }
}

void export_report(const metrics::EvalReport& r, const std::filesystem::path& path, Format format)
{
    if (format == Format::structured)
        write_text_file(path, report_to_json(r).dump(2) + "\n");
    else
        export_table(per_class_table(r), path, Format::csv);
}

Table evaluation_table(const std::vector<metrics::EvalReport>& reports)
{
    Table t{{"model", "features", "f1", "precision", "recall"}, {}};
    for (const auto& r : reports)
        t.rows.push_back({r.model, r.features, format_double(r.macro_f1),
                          format_double(r.macro_precision), format_double(r.macro_recall)});
    return t;
}

Table per_class_table(const metrics::EvalReport& r)
{
    Table t{{"disease", "precision", "recall", "f1", "support"}, {}};
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        t.rows.push_back({c < r.class_names.size() ? r.class_names[c] : count(c), format_double(m.precision),
                          format_double(m.recall), format_double(m.f1), count(m.support)});
    }
    return t;
}

Table confusion_table(const metrics::EvalReport& r)
{
    Table t{{"true"}, {}};
    const auto& cm = r.confusion;
    auto name = [&](std::size_t c) { return c < r.class_names.size() ? r.class_names[c] : count(c); };
    for (std::size_t c = 0; c < cm.classes; ++c)
        t.header.push_back(name(c));
    for (std::size_t a = 0; a < cm.classes; ++a) {
        std::vector<std::string> row{name(a)};
        for (std::size_t p = 0; p < cm.classes; ++p)
            row.push_back(count(cm.at(a, p)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table occurrence_series(const symptomnet::OccurrenceTable& occ)
{
    Table t{{"label", "value"}, {}};
    for (const auto& [occurrence, symptoms] : occ.histogram)
        t.rows.push_back({std::to_string(occurrence), std::to_string(symptoms)});
    return t;
}

Table symptom_occurrence_table(const corpus::SymptomVocabulary& vocab,
                               const symptomnet::OccurrenceTable& occ)
{
    Table t{{"symptom", "diseases", "kind"}, {}};
    for (std::size_t i = 0; i < vocab.size(); ++i)
        t.rows.push_back({vocab.entries[i], std::to_string(occ.per_symptom[i]),
                          occ.is_unusual(i) ? "unusual" : "common"});
    return t;
}

Table uniqueness_table(const symptomnet::UniquenessReport& u)
{
    Table t{{"disease", "symptoms", "common", "unusual", "uniqueness_rate"}, {}};
    for (const auto& e : u.entries)
        t.rows.push_back({e.disease, std::to_string(e.total), std::to_string(e.common()),
                          std::to_string(e.unusual), format_double(e.rate)});
    return t;
}

Table similarity_table(const symptomnet::SimilarityResult& s, const std::vector<std::string>& names)
{
    Table t{{"disease"}, {}};
    t.header.insert(t.header.end(), names.begin(), names.end());
    for (std::size_t i = 0; i < s.similarity.rows(); ++i) {
        std::vector<std::string> row{names[i]};
        for (std::size_t j = 0; j < s.similarity.cols(); ++j)
            row.push_back(format_double(s.similarity(i, j)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table similar_pairs_table(const std::vector<symptomnet::SimilarPair>& pairs,
                          const std::vector<std::string>& names)
{
    Table t{{"disease_a", "disease_b", "similarity"}, {}};
    for (const auto& p : pairs)
        t.rows.push_back({names[p.first], names[p.second], format_double(p.similarity)});
    return t;
}

Table pca_sweep_table(const std::vector<reduce::SweepPoint>& sweep)
{
    Table t{{"k", "mean_accuracy"}, {}};
    const std::size_t folds = sweep.empty() ? 0 : sweep.front().fold_accuracy.size();
    for (std::size_t f = 0; f < folds; ++f)
        t.header.push_back("fold_" + std::to_string(f + 1));
    for (const auto& p : sweep) {
        std::vector<std::string> row{count(p.k), format_double(p.mean_accuracy)};
        for (double a : p.fold_accuracy)
            row.push_back(format_double(a));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table cluster_sweep_table(const std::vector<cluster::SweepEntry>& sweep)
{
    Table t{{"k", "silhouette", "objective"}, {}};
    for (const auto& e : sweep)
        t.rows.push_back({count(e.k), format_double(e.silhouette), format_double(e.objective)});
    return t;
}

Table membership_table(const cluster::Clustering& c, const std::vector<std::string>& row_labels)
{
    Table t{{"row", "disease", "cluster"}, {}};
    for (std::size_t i = 0; i < c.assignments.size(); ++i)
        t.rows.push_back({count(i), i < row_labels.size() ? row_labels[i] : "", count(c.assignments[i])});
    return t;
}

Table cluster_size_table(const cluster::Clustering& c)
{
    Table t{{"cluster", "instances"}, {}};
    const auto sizes = c.sizes();
    for (std::size_t k = 0; k < sizes.size(); ++k)
        t.rows.push_back({count(k), count(sizes[k])});
    return t;
}

Table loss_table(const std::vector<double>& history)
{
    Table t{{"epoch", "loss"}, {}};
    for (std::size_t e = 0; e < history.size(); ++e)
        t.rows.push_back({count(e + 1), format_double(history[e])});
    return t;
}

} // namespace symdx::report
