#include "symdx/symptomnet.hpp"

#include "symdx/error.hpp"
#include "symdx/serialize.hpp"

#include <algorithm>
#include <cmath>

namespace symdx::symptomnet {

std::size_t DiseaseProfile::symptom_count() const
{
    return static_cast<std::size_t>(std::count(incidence.begin(), incidence.end(), std::uint8_t{1}));
}

std::vector<double> DiseaseProfile::as_vector() const
{
    return {incidence.begin(), incidence.end()};
}

std::vector<DiseaseProfile> disease_profiles(const corpus::Corpus& corpus,
                                             const corpus::SymptomVocabulary& vocab)
{
    std::vector<DiseaseProfile> profiles;
    profiles.reserve(corpus.diseases.size());
    for (const auto& d : corpus.diseases)
        profiles.push_back({d, std::vector<std::uint8_t>(vocab.size(), 0)});

    for (const auto& record : corpus.records) {
        auto it = std::lower_bound(corpus.diseases.begin(), corpus.diseases.end(), record.disease);
        auto& profile = profiles[static_cast<std::size_t>(it - corpus.diseases.begin())];
        for (const auto& s : record.symptoms) {
            auto idx = vocab.find(s);
            if (!idx)
                fail(ErrorCode::OutOfVocabularySymptom, s);
            profile.incidence[*idx] = 1;
        }
    }
    return profiles;
}

int OccurrenceTable::symptoms_at(int occurrence) const
{
    auto it = histogram.find(occurrence);
    return it == histogram.end() ? 0 : it->second;
}

OccurrenceTable occurrence_histogram(const std::vector<DiseaseProfile>& profiles)
{
    if (profiles.empty())
        fail(ErrorCode::EmptySubset, "no disease profiles");
    const std::size_t d = profiles.front().incidence.size();
    OccurrenceTable occ{std::vector<int>(d, 0), {}};
    for (const auto& p : profiles) {
        if (p.incidence.size() != d)
            fail(ErrorCode::DimensionMismatch, "profiles over different vocabularies");
        for (std::size_t i = 0; i < d; ++i)
            occ.per_symptom[i] += p.incidence[i];
    }
    // A vocabulary symptom never seen in any profile would have occurrence 0;
    // it is still bucketed so the histogram totals the vocabulary size.
    for (int count : occ.per_symptom)
        ++occ.histogram[count];
    return occ;
}

UniquenessReport uniqueness_report(const std::vector<DiseaseProfile>& profiles,
                                   const OccurrenceTable& occ)
{
    UniquenessReport report;
    double sum = 0.0;
    int contributing = 0;
    for (const auto& p : profiles) {
        UniquenessEntry e{p.disease, 0, 0, 0.0};
        for (std::size_t i = 0; i < p.incidence.size(); ++i) {
            if (!p.incidence[i])
                continue;
            ++e.total;
            if (occ.is_unusual(i))
                ++e.unusual;
        }
        e.rate = e.total > 0 ? static_cast<double>(e.unusual) / e.total : 0.0;
        if (e.unusual > 0) {
            sum += e.rate;
            ++contributing;
        }
        report.entries.push_back(std::move(e));
    }
    if (contributing > 0)
        report.mean_rate = sum / contributing;
    return report;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        fail(ErrorCode::DimensionMismatch, "vectors differ in length");
    const double na = std::sqrt(numkit::dot(a, a));
    const double nb = std::sqrt(numkit::dot(b, b));
    if (na == 0.0 || nb == 0.0)
        fail(ErrorCode::ZeroVector, "cosine similarity of a zero vector");
    return numkit::dot(a, b) / (na * nb);
}

SimilarityResult similarity_matrix(const std::vector<DiseaseProfile>& profiles)
{
    const std::size_t n = profiles.size();
    if (n < 2)
        fail(ErrorCode::EmptySubset, "similarity needs at least two profiles");
    std::vector<std::vector<double>> vecs;
    for (const auto& p : profiles) {
        if (p.symptom_count() == 0)
            fail(ErrorCode::ZeroVector, "profile '" + p.disease + "' has no symptoms");
        vecs.push_back(p.as_vector());
    }
    SimilarityResult out{numkit::Matrix(n, n), 0, n * (n - 1) / 2};
    for (std::size_t i = 0; i < n; ++i) {
        out.similarity(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = cosine_similarity(vecs[i], vecs[j]);
            out.similarity(i, j) = s;
            out.similarity(j, i) = s;
            if (s == 0.0)
                ++out.disjoint_pairs;
        }
    }
    return out;
}

std::vector<SimilarPair> similar_pairs(const numkit::Matrix& similarity, double threshold)
{
    std::vector<SimilarPair> out;
    for (std::size_t i = 0; i < similarity.rows(); ++i)
        for (std::size_t j = i + 1; j < similarity.cols(); ++j)
            if (similarity(i, j) >= threshold)
                out.push_back({i, j, similarity(i, j)});
    std::stable_sort(out.begin(), out.end(),
                     [](const SimilarPair& a, const SimilarPair& b) { return a.similarity > b.similarity; });
    return out;
}

std::string_view to_string(FeatureMode mode)
{
    return mode == FeatureMode::all ? "all" : "common_only";
}

FeatureMode parse_feature_mode(std::string_view s)
{
    if (s == "all")
        return FeatureMode::all;
    if (s == "common_only" || s == "common")
        return FeatureMode::common_only;
    fail(ErrorCode::InvalidArgument, "unknown feature mode '" + std::string(s) + "'");
}

std::vector<std::size_t> feature_subset(const corpus::SymptomVocabulary& vocab,
                                        const OccurrenceTable& occ, FeatureMode mode)
{
    if (occ.per_symptom.size() != vocab.size())
        fail(ErrorCode::DimensionMismatch, "occurrence table does not match vocabulary");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < vocab.size(); ++i)
        if (mode == FeatureMode::all || occ.per_symptom[i] >= 2)
            out.push_back(i);
    if (out.empty())
        fail(ErrorCode::EmptySubset, "no symptoms selected for mode " + std::string(to_string(mode)));
    return out;
}

std::vector<std::string> NetworkSnapshot::diseases() const
{
    std::vector<std::string> out;
    for (const auto& p : profiles)
        out.push_back(p.disease);
    return out;
}

NetworkSnapshot make_snapshot(const corpus::SymptomVocabulary& vocab,
                              const std::vector<DiseaseProfile>& profiles)
{
    return {vocab.entries, vocab.severity, profiles};
}

void save_snapshot(const NetworkSnapshot& snapshot, const std::filesystem::path& path)
{
    ordered_json j;
    j["schema"] = "symdx.network";
    j["version"] = 1;
    j["vocabulary_hash"] = hash_to_hex(snapshot.vocabulary_hash());
    j["symptoms"] = snapshot.symptoms;
    j["severity"] = snapshot.severity;
    ordered_json profiles = ordered_json::array();
    for (const auto& p : snapshot.profiles) {
        std::vector<std::size_t> present;
        for (std::size_t i = 0; i < p.incidence.size(); ++i)
            if (p.incidence[i])
                present.push_back(i);
        profiles.push_back({{"disease", p.disease}, {"symptoms", present}});
    }
    j["profiles"] = profiles;
    write_text_file(path, j.dump() + "\n");
}

NetworkSnapshot load_snapshot(const std::filesystem::path& path)
{
    const ordered_json j = parse_json(read_text_file(path));
    check_schema(j, "symdx.network", 1);
    try {
        NetworkSnapshot s;
        s.symptoms = j.at("symptoms").get<std::vector<std::string>>();
        s.severity = j.at("severity").get<std::vector<int>>();
        if (s.severity.size() != s.symptoms.size())
            fail(ErrorCode::ModelFormat, "severity list does not match symptom list");
        if (hash_from_hex(j.at("vocabulary_hash").get<std::string>()) != s.vocabulary_hash())
            fail(ErrorCode::ModelFormat, "vocabulary hash mismatch in " + path.string());
        for (const auto& p : j.at("profiles")) {
            DiseaseProfile profile{p.at("disease").get<std::string>(),
                                   std::vector<std::uint8_t>(s.symptoms.size(), 0)};
            for (auto i : p.at("symptoms").get<std::vector<std::size_t>>()) {
                if (i >= s.symptoms.size())
                    fail(ErrorCode::ModelFormat, "profile index out of range");
                profile.incidence[i] = 1;
            }
            s.profiles.push_back(std::move(profile));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ModelFormat, e.what());
    }
}

} // namespace symdx::symptomnet
