#pragma once

#include "symdx/corpus.hpp"
#include "symdx/numkit.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace symdx::lssvm {

struct KernelParams {
    double sigma = 1.0; // RBF bandwidth
    double gamma = 10.0; // regularization weight

    /// sigma = sqrt(d)/2 for d active features, gamma = 10.
    static KernelParams defaults(std::size_t active_features);
    void validate() const;
    bool operator==(const KernelParams&) const = default;
};

/// exp(-|x - z|^2 / (2 sigma^2))
double rbf_kernel(std::span<const double> x, std::span<const double> z, double sigma);

numkit::Matrix kernel_matrix(const numkit::Matrix& points, double sigma);

/// One-vs-rest least-squares SVM: one (alpha, bias) pair per class over a
/// shared set of support points.
struct LsSvmModel {
    numkit::Matrix support;
    std::vector<std::vector<double>> alpha; // [class][support row]
    std::vector<double> bias;
    KernelParams params;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;  // names of the active columns
    std::vector<std::size_t> feature_subset; // active columns within the vocabulary
    std::uint64_t vocabulary_hash = 0;

    std::size_t class_count() const noexcept { return bias.size(); }
    std::size_t feature_count() const noexcept { return support.cols(); }

    bool operator==(const LsSvmModel&) const = default;
};

/// Solves the bordered system [[0, 1^T], [1, K + I/gamma]] [b; alpha] = [0; y]
/// for every class. K + I/gamma is factored once and shared by all classes.
/// Throws SingularSystem when the factorization fails.
LsSvmModel train(const corpus::DesignMatrix& data, const KernelParams& params);

std::vector<double> decision_scores(const LsSvmModel& model, std::span<const double> x);

struct RankedClass {
    int label;
    double confidence;
};

struct Prediction {
    int label = 0;
    std::vector<RankedClass> ranked; // descending confidence, ties by lower label
};

/// Softmax over scores turns them into a ranked confidence list.
Prediction rank_scores(std::span<const double> scores);
Prediction predict(const LsSvmModel& model, std::span<const double> x);
std::vector<int> predict_labels(const LsSvmModel& model, const numkit::Matrix& rows);

void save_model(const LsSvmModel& model, const std::filesystem::path& path);
LsSvmModel load_model(const std::filesystem::path& path);
std::string serialize(const LsSvmModel& model);
LsSvmModel deserialize(const std::string& text);

} // namespace symdx::lssvm
