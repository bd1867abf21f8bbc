#pragma once

#include "symdx/cluster.hpp"
#include "symdx/convnet.hpp"
#include "symdx/lssvm.hpp"
#include "symdx/serialize.hpp"
#include "symdx/symptomnet.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace symdx::triage {

inline constexpr const char* network_file = "network.json";
inline constexpr const char* lssvm_file = "lssvm.json";
inline constexpr const char* cnn_file = "cnn.json";

/// Immutable serving state. Build with make_state or load_state.
struct TriageState {
    symptomnet::NetworkSnapshot network;
    corpus::SymptomVocabulary vocab;
    std::optional<lssvm::LsSvmModel> lssvm;
    std::optional<convnet::CnnModel> cnn;
    numkit::Matrix similarity;
    cluster::Clustering clusters; // over disease profiles

    bool ready() const { return lssvm.has_value() || cnn.has_value(); }
};

/// Checks that every model matches the snapshot vocabulary and disease list.
/// Throws ModelFormat otherwise.
TriageState make_state(symptomnet::NetworkSnapshot network, std::optional<lssvm::LsSvmModel> svm,
                       std::optional<convnet::CnnModel> cnn, std::uint64_t seed = 42);

/// Reads network.json plus whichever of lssvm.json / cnn.json exist.
TriageState load_state(const std::filesystem::path& model_dir, std::uint64_t seed = 42);

struct Response {
    int status = 200;
    std::string body;
};

/// Confidence distribution over diseases for a vocabulary-wide query vector.
std::vector<double> confidences(const TriageState& state, std::string_view model, std::span<const double> query);

double entropy(std::span<const double> p);

/// Suggestions stop once the top hypothesis is this certain.
inline constexpr double concentrated_confidence = 0.99;
/// Hypotheses whose profiles weight the chance a candidate symptom is present.
inline constexpr std::size_t suggestion_hypotheses = 5;

/// Request handlers. Each returns a JSON body and an HTTP status; all are
/// pure functions of the state and request.
class TriageService {
public:
    explicit TriageService(const TriageState* state) : state_(state) {}

    Response healthz() const;
    Response symptoms() const;
    Response diseases() const;
    Response clusters() const;
    Response similar(std::string_view disease) const;
    Response predict(const std::string& request_body) const;
    Response suggest(const std::string& request_body) const;

private:
    const TriageState* state_;
};

} // namespace symdx::triage
