#include "symdx/corpus.hpp"

#include "symdx/error.hpp"
#include "symdx/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace symdx::corpus {

namespace {

bool is_space(char c)
{
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

// Splits one CSV line. Quoted fields may contain commas and doubled quotes.
std::optional<std::vector<std::string>> split_csv(std::string_view line)
{
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    if (quoted)
        return std::nullopt;
    cells.push_back(std::move(cell));
    return cells;
}

std::string csv_escape(const std::string& s)
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

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::MissingFile, "cannot open " + path.string());
    return in;
}

std::string location(const std::filesystem::path& path, std::size_t line)
{
    return path.string() + ":" + std::to_string(line);
}

struct SeverityEntry {
    std::string name;
    int grade;
};

std::vector<SeverityEntry> load_severity(const std::filesystem::path& path)
{
    std::ifstream in = open_input(path);
    std::vector<SeverityEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line_no == 1 || trim(line).empty())
            continue;
        auto cells = split_csv(line);
        if (!cells || cells->size() < 2)
            fail(ErrorCode::MalformedRow, "expected Symptom,weight at " + location(path, line_no));
        const auto weight = trim((*cells)[1]);
        int grade = 0;
        auto [ptr, ec] = std::from_chars(weight.data(), weight.data() + weight.size(), grade);
        if (ec != std::errc() || ptr != weight.data() + weight.size() || grade <= 0)
            fail(ErrorCode::MalformedRow,
                 "severity weight must be a positive integer at " + location(path, line_no));
        out.push_back({canonical_symptom((*cells)[0]), grade});
    }
    return out;
}

} // namespace

std::string canonical_symptom(std::string_view raw)
{
    std::string out;
    for (char c : trim(raw))
        out.push_back(is_space(c) ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

std::string canonical_disease(std::string_view raw)
{
    std::string out;
    bool pending_space = false;
    for (char c : trim(raw)) {
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space)
            out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

Corpus make_corpus(std::vector<Record> records)
{
    Corpus corpus;
    std::set<std::string> diseases;
    for (const auto& r : records) {
        diseases.insert(r.disease);
        corpus.max_symptoms = std::max(corpus.max_symptoms, r.symptoms.size());
    }
    corpus.records = std::move(records);
    corpus.diseases.assign(diseases.begin(), diseases.end());
    return corpus;
}

Corpus load_dataset(const std::filesystem::path& path)
{
    std::ifstream in = open_input(path);
    std::vector<Record> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        if (trim(line).empty())
            continue;
        auto cells = split_csv(line);
        if (!cells)
            fail(ErrorCode::MalformedRow, "unbalanced quotes at " + location(path, line_no));
        Record record{canonical_disease((*cells)[0]), {}};
        if (record.disease.empty())
            fail(ErrorCode::MalformedRow, "missing disease name at " + location(path, line_no));
        for (std::size_t i = 1; i < cells->size(); ++i) {
            std::string symptom = canonical_symptom((*cells)[i]);
            if (symptom.empty())
                continue;
            if (std::find(record.symptoms.begin(), record.symptoms.end(), symptom) == record.symptoms.end())
                record.symptoms.push_back(std::move(symptom));
        }
        if (record.symptoms.empty())
            fail(ErrorCode::EmptyRecord, "row has no symptoms at " + location(path, line_no));
        records.push_back(std::move(record));
    }
    if (!header_seen)
        fail(ErrorCode::MalformedRow, path.string() + " is empty (header row required)");
    if (records.empty())
        fail(ErrorCode::EmptyRecord, path.string() + " has a header but no records");
    return make_corpus(std::move(records));
}

void save_dataset(const Corpus& corpus, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::IoFailure, "cannot write " + path.string());
    const std::size_t width = std::max<std::size_t>(corpus.max_symptoms, 1);
    out << "Disease";
    for (std::size_t i = 1; i <= width; ++i)
        out << ",Symptom_" << i;
    out << '\n';
    for (const auto& r : corpus.records) {
        out << csv_escape(r.disease);
        for (std::size_t i = 0; i < width; ++i) {
            out << ',';
            if (i < r.symptoms.size())
                out << csv_escape(r.symptoms[i]);
        }
        out << '\n';
    }
    if (!out)
        fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::optional<std::size_t> SymptomVocabulary::find(std::string_view name) const
{
    auto it = index.find(std::string(name));
    if (it == index.end())
        return std::nullopt;
    return it->second;
}

std::uint64_t vocabulary_hash(const std::vector<std::string>& names)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& name : names) {
        for (unsigned char c : name) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= '\n';
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t SymptomVocabulary::hash() const
{
    return vocabulary_hash(entries);
}

SymptomVocabulary make_vocabulary(std::vector<std::string> names)
{
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    SymptomVocabulary vocab;
    vocab.entries = std::move(names);
    vocab.severity.assign(vocab.entries.size(), 1);
    for (std::size_t i = 0; i < vocab.entries.size(); ++i)
        vocab.index.emplace(vocab.entries[i], i);
    return vocab;
}

SymptomVocabulary build_vocabulary(const Corpus& corpus,
                                   const std::optional<std::filesystem::path>& severity_path)
{
    if (corpus.records.empty())
        fail(ErrorCode::EmptyRecord, "cannot build a vocabulary from an empty corpus");
    std::vector<std::string> names;
    for (const auto& r : corpus.records)
        for (const auto& s : r.symptoms)
            names.push_back(canonical_symptom(s));
    SymptomVocabulary vocab = make_vocabulary(std::move(names));

    if (severity_path) {
        std::set<std::string> seen;
        for (const auto& entry : load_severity(*severity_path)) {
            if (!seen.insert(entry.name).second)
                fail(ErrorCode::DuplicateSeverityEntry, "symptom '" + entry.name +
                                                            "' listed twice in " +
                                                            severity_path->string());
            if (auto idx = vocab.find(entry.name))
                vocab.severity[*idx] = entry.grade;
            else
                vocab.warnings.push_back(std::string(to_string(ErrorCode::UnknownSymptomInSeverityFile)) +
                                         ": " + entry.name);
        }
    }
    return vocab;
}

std::string_view to_string(Encoding e)
{
    return e == Encoding::binary ? "binary" : "severity";
}

Encoding parse_encoding(std::string_view s)
{
    if (s == "binary")
        return Encoding::binary;
    if (s == "severity")
        return Encoding::severity;
    fail(ErrorCode::InvalidArgument, "unknown encoding '" + std::string(s) + "'");
}

DesignMatrix DesignMatrix::subset_rows(std::span<const std::size_t> rows) const
{
    DesignMatrix out{features.select_rows(rows), {}, class_names, feature_names, encoding};
    out.labels.reserve(rows.size());
    for (auto r : rows)
        out.labels.push_back(labels[r]);
    return out;
}

DesignMatrix DesignMatrix::subset_cols(std::span<const std::size_t> cols) const
{
    DesignMatrix out{features.select_cols(cols), labels, class_names, {}, encoding};
    for (auto c : cols)
        out.feature_names.push_back(feature_names[c]);
    return out;
}

DesignMatrix encode(const Corpus& corpus, const SymptomVocabulary& vocab, Encoding mode)
{
    std::map<std::string, int> label_of;
    for (std::size_t i = 0; i < corpus.diseases.size(); ++i)
        label_of.emplace(corpus.diseases[i], static_cast<int>(i));

    DesignMatrix m{numkit::Matrix(corpus.records.size(), vocab.size()), {}, corpus.diseases,
                   vocab.entries, mode};
    m.labels.reserve(corpus.records.size());
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        const auto& record = corpus.records[i];
        for (const auto& s : record.symptoms) {
            auto idx = vocab.find(s);
            if (!idx)
                fail(ErrorCode::OutOfVocabularySymptom, s);
            m.features(i, *idx) = mode == Encoding::binary ? 1.0 : vocab.severity[*idx];
        }
        auto it = label_of.find(record.disease);
        if (it == label_of.end())
            fail(ErrorCode::LabelOutOfRange, "disease '" + record.disease + "' missing from corpus list");
        m.labels.push_back(it->second);
    }
    return m;
}

std::vector<double> encode_symptoms(const std::vector<std::string>& symptoms,
                                    const SymptomVocabulary& vocab)
{
    std::vector<double> x(vocab.size(), 0.0);
    for (const auto& s : symptoms) {
        auto idx = vocab.find(canonical_symptom(s));
        if (!idx)
            fail(ErrorCode::OutOfVocabularySymptom, s);
        x[*idx] = 1.0;
    }
    return x;
}

namespace {

std::vector<std::vector<std::size_t>> rows_by_class(std::span<const int> labels)
{
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0)
            fail(ErrorCode::LabelOutOfRange, "negative label at row " + std::to_string(i));
        const auto c = static_cast<std::size_t>(labels[i]);
        if (c >= groups.size())
            groups.resize(c + 1);
        groups[c].push_back(i);
    }
    return groups;
}

} // namespace

SplitIndices stratified_split_indices(std::span<const int> labels, double test_fraction,
                                      std::uint64_t seed)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        fail(ErrorCode::FractionOutOfRange, "test fraction must lie in (0, 1), got " +
                                                std::to_string(test_fraction));
    Rng rng(seed);
    SplitIndices out;
    for (auto& group : rows_by_class(labels)) {
        if (group.empty())
            continue;
        if (group.size() < 2)
            fail(ErrorCode::ClassTooSmall, "class with label " + std::to_string(labels[group[0]]) +
                                               " has fewer than 2 rows");
        rng.shuffle(std::span(group));
        auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(group.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, group.size() - 1);
        out.test.insert(out.test.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(n_test));
        out.train.insert(out.train.end(), group.begin() + static_cast<std::ptrdiff_t>(n_test), group.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::pair<DesignMatrix, DesignMatrix> stratified_split(const DesignMatrix& m, double test_fraction,
                                                       std::uint64_t seed)
{
    auto idx = stratified_split_indices(m.labels, test_fraction, seed);
    return {m.subset_rows(idx.train), m.subset_rows(idx.test)};
}

std::vector<Fold> kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed)
{
    auto groups = rows_by_class(labels);
    std::size_t smallest = SIZE_MAX;
    for (const auto& g : groups)
        if (!g.empty())
            smallest = std::min(smallest, g.size());
    if (k < 2 || smallest == SIZE_MAX || k > smallest)
        fail(ErrorCode::KOutOfRange, "fold count " + std::to_string(k) +
                                         " must be in [2, smallest class size]");

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> validation(k);
    for (auto& group : groups) {
        rng.shuffle(std::span(group));
        for (std::size_t i = 0; i < group.size(); ++i)
            validation[i % k].push_back(group[i]);
    }
    std::vector<Fold> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(validation[f].begin(), validation[f].end());
        folds[f].validation = validation[f];
        for (std::size_t g = 0; g < k; ++g)
            if (g != f)
                folds[f].train.insert(folds[f].train.end(), validation[g].begin(), validation[g].end());
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

Corpus synth_generate(const SynthSpec& spec)
{
    if (spec.num_diseases == 0 || spec.records_per_disease == 0 || spec.min_pool == 0 ||
        spec.min_pool > spec.max_pool)
        fail(ErrorCode::InvalidConfig, "synthetic corpus sizes must be positive with min_pool <= max_pool");
    if (!(spec.unusual_fraction >= 0.0 && spec.unusual_fraction <= 1.0))
        fail(ErrorCode::InvalidConfig, "unusual_fraction must lie in [0, 1]");
    if (!(spec.presence > 0.0 && spec.presence <= 1.0))
        fail(ErrorCode::InvalidConfig, "presence must lie in (0, 1]");

    constexpr double shared_multiplicity = 5.0;
    Rng rng(spec.seed);
    const std::size_t n = spec.num_diseases;

    std::vector<std::size_t> unique_count(n), shared_need(n);
    std::size_t total_shared = 0, max_need = 0;
    for (std::size_t d = 0; d < n; ++d) {
        const std::size_t pool = spec.min_pool + rng.uniform_index(spec.max_pool - spec.min_pool + 1);
        unique_count[d] = static_cast<std::size_t>(std::llround(spec.unusual_fraction * static_cast<double>(pool)));
        shared_need[d] = pool - unique_count[d];
        total_shared += shared_need[d];
        max_need = std::max(max_need, shared_need[d]);
    }

    // Every shared symptom must land in at least two diseases, otherwise it
    // would count as unusual and skew the requested fraction.
    std::size_t shared_vocab = 0;
    if (total_shared > 0) {
        if (2 * max_need > total_shared)
            fail(ErrorCode::InfeasibleSpec,
                 "shared symptom slots cannot be covered by at least two diseases each");
        const auto target = static_cast<std::size_t>(std::llround(static_cast<double>(total_shared) / shared_multiplicity));
        shared_vocab = std::clamp(target, max_need, total_shared / 2);
    }

    std::vector<std::size_t> tiebreak(n);
    std::iota(tiebreak.begin(), tiebreak.end(), std::size_t{0});
    rng.shuffle(std::span(tiebreak));

    std::vector<std::vector<std::size_t>> shared(n);
    std::vector<std::size_t> capacity = shared_need;
    for (std::size_t s = 0; s < shared_vocab; ++s) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (capacity[a] != capacity[b])
                return capacity[a] > capacity[b];
            return tiebreak[a] < tiebreak[b];
        });
        if (n < 2 || capacity[order[1]] == 0)
            fail(ErrorCode::InfeasibleSpec, "ran out of capacity while spreading shared symptoms");
        for (int j = 0; j < 2; ++j) {
            shared[order[j]].push_back(s);
            --capacity[order[j]];
        }
    }
    for (std::size_t d = 0; d < n; ++d) {
        std::vector<std::size_t> candidates;
        for (std::size_t s = 0; s < shared_vocab; ++s)
            if (std::find(shared[d].begin(), shared[d].end(), s) == shared[d].end())
                candidates.push_back(s);
        rng.shuffle(std::span(candidates));
        if (candidates.size() < capacity[d])
            fail(ErrorCode::InfeasibleSpec, "shared symptom vocabulary too small");
        shared[d].insert(shared[d].end(), candidates.begin(),
                         candidates.begin() + static_cast<std::ptrdiff_t>(capacity[d]));
    }

    // Symptom ids: shared ones first, then each disease's unique ones. Names
    // are permuted so the two kinds interleave in the sorted vocabulary.
    const std::size_t total_symptoms =
        shared_vocab + std::accumulate(unique_count.begin(), unique_count.end(), std::size_t{0});
    std::vector<std::size_t> name_of(total_symptoms);
    std::iota(name_of.begin(), name_of.end(), std::size_t{0});
    rng.shuffle(std::span(name_of));
    const int width = static_cast<int>(std::to_string(std::max<std::size_t>(total_symptoms, 1) - 1).size());
    auto symptom_name = [&](std::size_t id) {
        std::string digits = std::to_string(name_of[id]);
        return "symptom_" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
    };
    const int disease_width = static_cast<int>(std::to_string(n - 1).size());

    std::vector<Record> records;
    records.reserve(n * spec.records_per_disease);
    std::size_t next_unique = shared_vocab;
    for (std::size_t d = 0; d < n; ++d) {
        std::vector<std::size_t> pool = shared[d];
        for (std::size_t u = 0; u < unique_count[d]; ++u)
            pool.push_back(next_unique++);
        rng.shuffle(std::span(pool));
        std::string digits = std::to_string(d);
        const std::string disease =
            "disease_" + std::string(static_cast<std::size_t>(disease_width) - digits.size(), '0') + digits;
        for (std::size_t r = 0; r < spec.records_per_disease; ++r) {
            Record record{disease, {}};
            for (auto id : pool)
                if (rng.uniform01() < spec.presence)
                    record.symptoms.push_back(symptom_name(id));
            if (record.symptoms.empty())
                record.symptoms.push_back(symptom_name(pool[rng.uniform_index(pool.size())]));
            records.push_back(std::move(record));
        }
    }
    return make_corpus(std::move(records));
}

} // namespace symdx::corpus
