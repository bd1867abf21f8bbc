#pragma once

#include "symdx/corpus.hpp"
#include "symdx/numkit.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace symdx::symptomnet {

/// Union of one disease's record symptoms over the vocabulary.
struct DiseaseProfile {
    std::string disease;
    std::vector<std::uint8_t> incidence;

    std::size_t symptom_count() const;
    std::vector<double> as_vector() const;
};

std::vector<DiseaseProfile> disease_profiles(const corpus::Corpus& corpus,
                                             const corpus::SymptomVocabulary& vocab);

struct OccurrenceTable {
    std::vector<int> per_symptom;   // distinct diseases exhibiting each symptom
    std::map<int, int> histogram;   // occurrence count -> number of symptoms

    bool is_unusual(std::size_t symptom) const { return per_symptom[symptom] == 1; }
    int symptoms_at(int occurrence) const;
};

OccurrenceTable occurrence_histogram(const std::vector<DiseaseProfile>& profiles);

struct UniquenessEntry {
    std::string disease;
    int total = 0;
    int unusual = 0;
    double rate = 0.0;

    int common() const { return total - unusual; }
};

struct UniquenessReport {
    std::vector<UniquenessEntry> entries;
    /// Mean rate over diseases owning at least one unusual symptom; absent when none do.
    std::optional<double> mean_rate;
};

UniquenessReport uniqueness_report(const std::vector<DiseaseProfile>& profiles,
                                   const OccurrenceTable& occ);

struct SimilarityResult {
    numkit::Matrix similarity;
    std::size_t disjoint_pairs = 0;
    std::size_t total_pairs = 0;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Pairwise cosine similarity of incidence vectors. Throws ZeroVector.
SimilarityResult similarity_matrix(const std::vector<DiseaseProfile>& profiles);

struct SimilarPair {
    std::size_t first;
    std::size_t second;
    double similarity;
};

inline constexpr double default_similar_threshold = 0.7;

/// Unordered pairs at or above the threshold, most similar first.
std::vector<SimilarPair> similar_pairs(const numkit::Matrix& similarity,
                                       double threshold = default_similar_threshold);

enum class FeatureMode { common_only, all };

std::string_view to_string(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view s);

/// Column indices for a feature mode. Throws EmptySubset.
std::vector<std::size_t> feature_subset(const corpus::SymptomVocabulary& vocab,
                                        const OccurrenceTable& occ, FeatureMode mode);

/// Vocabulary, disease list and profiles persisted next to trained models.
struct NetworkSnapshot {
    std::vector<std::string> symptoms;
    std::vector<int> severity;
    std::vector<DiseaseProfile> profiles;

    std::uint64_t vocabulary_hash() const { return corpus::vocabulary_hash(symptoms); }
    std::vector<std::string> diseases() const;
};

NetworkSnapshot make_snapshot(const corpus::SymptomVocabulary& vocab,
                              const std::vector<DiseaseProfile>& profiles);
void save_snapshot(const NetworkSnapshot& snapshot, const std::filesystem::path& path);
NetworkSnapshot load_snapshot(const std::filesystem::path& path);

} // namespace symdx::symptomnet
