#pragma once

#include "symdx/corpus.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace symdx::convnet {

struct CnnConfig {
    std::size_t input_length = 0;
    std::size_t conv_filters = 64;
    std::size_t kernel_width = 2;
    std::size_t dense_units = 16;
    std::size_t pool_width = 2;
    std::size_t class_count = 0;
    double learning_rate = 0.05;
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;

    std::size_t conv_positions() const { return input_length - kernel_width + 1; }
    std::size_t pooled_positions() const { return conv_positions() / pool_width; }
    std::size_t flat_size() const { return pooled_positions() * dense_units; }

    /// Throws InvalidConfig.
    void validate() const;
    bool operator==(const CnnConfig&) const = default;
};

// Layout:
//   conv_w  [filter][tap]        conv_b  [filter]
//   dense_w [unit][filter]       dense_b [unit]
//   out_w   [class][pooled*units + unit]   out_b [class]
struct CnnParameters {
    std::vector<double> conv_w, conv_b;
    std::vector<double> dense_w, dense_b;
    std::vector<double> out_w, out_b;

    static CnnParameters zeros(const CnnConfig& config);
    std::array<std::span<double>, 6> blocks();
    std::array<std::span<const double>, 6> blocks() const;
    std::size_t size() const;

    bool operator==(const CnnParameters&) const = default;
};

struct CnnModel {
    CnnConfig config;
    CnnParameters params;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    std::vector<std::size_t> feature_subset;
    std::uint64_t vocabulary_hash = 0;

    bool operator==(const CnnModel&) const = default;
};

/// Glorot-uniform weights from config.seed, zero biases.
CnnModel init(const CnnConfig& config);

/// conv -> ReLU -> position-wise dense -> ReLU -> max-pool -> flatten ->
/// affine -> softmax. Returns class probabilities.
std::vector<double> forward(const CnnModel& model, std::span<const double> x);

/// Cross-entropy of one sample; adds its gradient into `grad` when non-null.
double loss_and_gradient(const CnnModel& model, std::span<const double> x, int label,
                         CnnParameters* grad);

/// One gradient-descent step on the mean loss of `rows`. Returns that loss.
double apply_batch(CnnModel& model, const corpus::DesignMatrix& data,
                   std::span<const std::size_t> rows);

struct TrainResult {
    CnnModel model;
    std::vector<double> loss_history; // mean training loss per epoch
};

/// Mini-batch gradient descent with per-epoch seeded shuffling.
/// Throws NonFiniteLoss on divergence.
TrainResult train(CnnModel model, const corpus::DesignMatrix& data);

/// Largest relative error between the analytic gradient and central
/// differences (h = 1e-5) over every parameter.
double grad_check(const CnnModel& model, std::span<const double> x, int label);

std::vector<int> predict_labels(const CnnModel& model, const numkit::Matrix& rows);

std::string serialize(const CnnModel& model);
CnnModel deserialize(const std::string& text);
void save_model(const CnnModel& model, const std::filesystem::path& path);
CnnModel load_model(const std::filesystem::path& path);

} // namespace symdx::convnet
