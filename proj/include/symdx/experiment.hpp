#pragma once

#include "symdx/convnet.hpp"
#include "symdx/corpus.hpp"
#include "symdx/lssvm.hpp"
#include "symdx/metrics.hpp"
#include "symdx/serialize.hpp"
#include "symdx/symptomnet.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace symdx::experiment {

enum class ModelKind { lssvm, cnn };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view s);

struct CnnHyperparams {
    std::size_t conv_filters = 64;
    std::size_t kernel_width = 2;
    std::size_t dense_units = 16;
    std::size_t pool_width = 2;
    double learning_rate = 0.05;
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
};

struct ExperimentConfig {
    std::optional<std::filesystem::path> data;     // wide symptom CSV
    std::optional<std::filesystem::path> severity; // Symptom,weight CSV
    corpus::SynthSpec synth;                       // used when `data` is absent
    ModelKind model = ModelKind::lssvm;
    symptomnet::FeatureMode features = symptomnet::FeatureMode::all;
    corpus::Encoding encoding = corpus::Encoding::binary;
    double test_fraction = 0.2;
    std::uint64_t seed = 42;
    std::optional<double> sigma; // defaults to sqrt(active features)/2
    double gamma = 10.0;
    CnnHyperparams cnn;
};

ordered_json config_to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults. Throws InvalidConfig on bad values.
ExperimentConfig config_from_json(const ordered_json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Everything derived from the corpus before model fitting.
struct Dataset {
    corpus::Corpus corpus;
    corpus::SymptomVocabulary vocab;
    std::vector<symptomnet::DiseaseProfile> profiles;
    symptomnet::OccurrenceTable occurrence;
    corpus::DesignMatrix matrix;
};

Dataset prepare_dataset(const ExperimentConfig& cfg);
Dataset prepare_dataset(corpus::Corpus corpus, const ExperimentConfig& cfg);

struct TrainedModel {
    std::optional<lssvm::LsSvmModel> lssvm;
    std::optional<convnet::CnnModel> cnn;
    std::vector<double> loss_history;

    std::vector<int> predict(const numkit::Matrix& rows) const;
};

/// Fits the configured model on the given rows of the active feature columns.
TrainedModel fit_model(const ExperimentConfig& cfg, const Dataset& data,
                       const corpus::DesignMatrix& train, std::span<const std::size_t> feature_subset);

struct ExperimentResult {
    metrics::EvalReport report;
    TrainedModel model;
};

/// Feature subset, stratified split, fit, and test-set evaluation.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& data);
metrics::EvalReport run_experiment(const ExperimentConfig& cfg);

/// The four model x feature-mode combinations, sharing one split.
std::vector<metrics::EvalReport> ablate(const ExperimentConfig& cfg, const Dataset& data);

/// Stratified k-fold evaluation of the configured model, one report per fold.
std::vector<metrics::EvalReport> cross_validate(const ExperimentConfig& cfg, const Dataset& data,
                                                std::size_t folds);

} // namespace symdx::experiment
