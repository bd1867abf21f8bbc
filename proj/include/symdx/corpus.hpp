#pragma once

#include "symdx/numkit.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace symdx::corpus {

/// Trim, lowercase, and replace each inner whitespace character with '_'.
std::string canonical_symptom(std::string_view raw);
/// Trim and collapse inner whitespace runs to a single space. Case is kept.
std::string canonical_disease(std::string_view raw);

struct Record {
    std::string disease;
    std::vector<std::string> symptoms; // canonical, distinct, file order
};

struct Corpus {
    std::vector<Record> records;
    std::vector<std::string> diseases; // sorted, distinct
    std::size_t max_symptoms = 0;

    std::size_t size() const noexcept { return records.size(); }
};

/// Builds a corpus from records, deriving the sorted disease list.
Corpus make_corpus(std::vector<Record> records);

/// Reads the wide `Disease,Symptom_1,...,Symptom_k` CSV. A header row is
/// required; trailing empty cells are allowed.
Corpus load_dataset(const std::filesystem::path& path);
void save_dataset(const Corpus& corpus, const std::filesystem::path& path);

struct SymptomVocabulary {
    std::vector<std::string> entries;                     // sorted
    std::unordered_map<std::string, std::size_t> index;   // name -> position
    std::vector<int> severity;                            // grade per entry, default 1
    std::vector<std::string> warnings;                    // non-fatal severity issues

    std::size_t size() const noexcept { return entries.size(); }
    std::optional<std::size_t> find(std::string_view name) const;
    std::uint64_t hash() const;
};

SymptomVocabulary make_vocabulary(std::vector<std::string> names);
SymptomVocabulary build_vocabulary(const Corpus& corpus,
                                   const std::optional<std::filesystem::path>& severity_path = {});

/// FNV-1a over the newline-joined names; ties model files to a vocabulary.
std::uint64_t vocabulary_hash(const std::vector<std::string>& names);

enum class Encoding { binary, severity };

std::string_view to_string(Encoding e);
Encoding parse_encoding(std::string_view s);

struct DesignMatrix {
    numkit::Matrix features;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    Encoding encoding = Encoding::binary;

    std::size_t rows() const noexcept { return features.rows(); }
    std::size_t cols() const noexcept { return features.cols(); }
    std::size_t class_count() const noexcept { return class_names.size(); }

    DesignMatrix subset_rows(std::span<const std::size_t> rows) const;
    DesignMatrix subset_cols(std::span<const std::size_t> cols) const;
};

DesignMatrix encode(const Corpus& corpus, const SymptomVocabulary& vocab,
                    Encoding mode = Encoding::binary);

/// Binary query vector over the vocabulary. Throws OutOfVocabularySymptom.
std::vector<double> encode_symptoms(const std::vector<std::string>& symptoms,
                                    const SymptomVocabulary& vocab);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

SplitIndices stratified_split_indices(std::span<const int> labels, double test_fraction,
                                      std::uint64_t seed);
std::pair<DesignMatrix, DesignMatrix> stratified_split(const DesignMatrix& m, double test_fraction,
                                                       std::uint64_t seed);

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

std::vector<Fold> kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

struct SynthSpec {
    std::size_t num_diseases = 41;
    std::size_t records_per_disease = 120;
    std::size_t min_pool = 5;
    std::size_t max_pool = 18;
    double unusual_fraction = 0.39;
    /// Probability that a record shows each symptom of its disease's pool.
    double presence = 0.75;
    std::uint64_t seed = 1;
};

Corpus synth_generate(const SynthSpec& spec);

} // namespace symdx::corpus
