#include "symdx/triage.hpp"

#include "symdx/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace symdx::triage {

namespace {

void check_model(const symptomnet::NetworkSnapshot& net, std::uint64_t hash,
                 const std::vector<std::string>& classes, const std::vector<std::size_t>& subset,
                 const char* which)
{
    if (hash != net.vocabulary_hash())
        fail(ErrorCode::ModelFormat, std::string(which) + " model was trained on a different vocabulary");
    if (classes != net.diseases())
        fail(ErrorCode::ModelFormat, std::string(which) + " model classes differ from the network diseases");
    for (auto i : subset)
        if (i >= net.symptoms.size())
            fail(ErrorCode::ModelFormat, std::string(which) + " model feature index out of range");
}

numkit::Matrix profile_matrix(const std::vector<symptomnet::DiseaseProfile>& profiles)
{
    const std::size_t d = profiles.front().incidence.size();
    numkit::Matrix m(profiles.size(), d);
    for (std::size_t i = 0; i < profiles.size(); ++i)
        for (std::size_t j = 0; j < d; ++j)
            m(i, j) = profiles[i].incidence[j];
    return m;
}

Response json_response(int status, const ordered_json& body)
{
    return {status, body.dump()};
}

Response error_response(int status, const std::string& message, const ordered_json& extra = {})
{
    ordered_json body;
    body["error"] = message;
    if (extra.is_object())
        for (const auto& [k, v] : extra.items())
            body[k] = v;
    return json_response(status, body);
}

std::vector<std::size_t> ranking(std::span<const double> p)
{
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
    return order;
}

std::vector<double> select(std::span<const double> query, const std::vector<std::size_t>& subset)
{
    std::vector<double> x;
    x.reserve(subset.size());
    for (auto i : subset)
        x.push_back(query[i]);
    return x;
}

// Parsed and validated body shared by predict and suggest.
struct Query {
    std::vector<std::string> symptoms; // canonical names, deduplicated, request order
    std::string model;
    std::size_t limit = 5;
};

std::optional<Response> parse_query(const TriageState& state, const std::string& body, bool allow_empty,
                                    Query& q)
{
    ordered_json j;
    try {
        j = ordered_json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
        return error_response(400, "request body is not valid JSON");
    }
    if (!j.is_object() || !j.contains("symptoms") || !j.at("symptoms").is_array())
        return error_response(400, "expected an object with a 'symptoms' array");

    std::vector<std::string> unknown;
    for (const auto& s : j.at("symptoms")) {
        if (!s.is_string())
            return error_response(400, "symptom names must be strings");
        const auto raw = s.get<std::string>();
        const auto name = corpus::canonical_symptom(raw);
        if (!state.vocab.find(name))
            unknown.push_back(raw);
        else if (std::find(q.symptoms.begin(), q.symptoms.end(), name) == q.symptoms.end())
            q.symptoms.push_back(name);
    }
    if (!unknown.empty())
        return error_response(422, "unknown symptoms", {{"unknown", unknown}});
    if (q.symptoms.empty() && !allow_empty)
        return error_response(400, "symptom list is empty");

    if (j.contains("model")) {
        if (!j.at("model").is_string())
            return error_response(400, "model must be a string");
        q.model = j.at("model").get<std::string>();
    } else {
        q.model = state.lssvm ? "lssvm" : "cnn";
    }
    if (q.model != "lssvm" && q.model != "cnn")
        return error_response(400, "unknown model '" + q.model + "'");
    if ((q.model == "lssvm" && !state.lssvm) || (q.model == "cnn" && !state.cnn))
        return error_response(503, "model '" + q.model + "' is not loaded");

    if (j.contains("limit")) {
        if (!j.at("limit").is_number_unsigned())
            return error_response(400, "limit must be a non-negative integer");
        q.limit = j.at("limit").get<std::size_t>();
    }
    return std::nullopt;
}

std::string feature_mode(const TriageState& state, const std::vector<std::size_t>& subset)
{
    return subset.size() == state.vocab.size() ? "all" : "common_only";
}

} // namespace

TriageState make_state(symptomnet::NetworkSnapshot network, std::optional<lssvm::LsSvmModel> svm,
                       std::optional<convnet::CnnModel> cnn, std::uint64_t seed)
{
    if (network.profiles.size() < 2)
        fail(ErrorCode::ModelFormat, "network needs at least two diseases");
    if (svm)
        check_model(network, svm->vocabulary_hash, svm->class_names, svm->feature_subset, "lssvm");
    if (cnn)
        check_model(network, cnn->vocabulary_hash, cnn->class_names, cnn->feature_subset, "cnn");

    TriageState s;
    s.vocab = corpus::make_vocabulary(network.symptoms);
    s.vocab.severity = network.severity;
    s.similarity = symptomnet::similarity_matrix(network.profiles).similarity;
    const std::size_t k = std::min<std::size_t>(6, network.profiles.size());
    s.clusters = cluster::kmeans_cosine(profile_matrix(network.profiles), k, seed);
    s.network = std::move(network);
    s.lssvm = std::move(svm);
    s.cnn = std::move(cnn);
    return s;
}

TriageState load_state(const std::filesystem::path& model_dir, std::uint64_t seed)
{
    auto network = symptomnet::load_snapshot(model_dir / network_file);
    std::optional<lssvm::LsSvmModel> svm;
    std::optional<convnet::CnnModel> cnn;
    if (std::filesystem::exists(model_dir / lssvm_file))
        svm = lssvm::load_model(model_dir / lssvm_file);
    if (std::filesystem::exists(model_dir / cnn_file))
        cnn = convnet::load_model(model_dir / cnn_file);
    return make_state(std::move(network), std::move(svm), std::move(cnn), seed);
}

std::vector<double> confidences(const TriageState& state, std::string_view model, std::span<const double> query)
{
    if (model == "lssvm" && state.lssvm) {
        const auto scores = lssvm::decision_scores(*state.lssvm, select(query, state.lssvm->feature_subset));
        std::vector<double> p(scores.size(), 0.0);
        for (const auto& r : lssvm::rank_scores(scores).ranked)
            p[static_cast<std::size_t>(r.label)] = r.confidence;
        return p;
    }
    if (model == "cnn" && state.cnn)
        return convnet::forward(*state.cnn, select(query, state.cnn->feature_subset));
    fail(ErrorCode::InvalidArgument, "model '" + std::string(model) + "' is not loaded");
}

double entropy(std::span<const double> p)
{
    double h = 0.0;
    for (double v : p)
        if (v > 0.0)
            h -= v * std::log(v);
    return h;
}

Response TriageService::healthz() const
{
    if (!state_ || !state_->ready())
        return error_response(503, "no model loaded");
    ordered_json models = ordered_json::array();
    if (state_->lssvm)
        models.push_back("lssvm");
    if (state_->cnn)
        models.push_back("cnn");
    return json_response(200, {{"status", "ok"}, {"models", models}});
}

Response TriageService::symptoms() const
{
    if (!state_)
        return error_response(503, "state not loaded");
    ordered_json list = ordered_json::array();
    for (std::size_t i = 0; i < state_->vocab.size(); ++i)
        list.push_back({{"name", state_->vocab.entries[i]}, {"severity", state_->vocab.severity[i]}});
    return json_response(200, {{"symptoms", list}});
}

Response TriageService::diseases() const
{
    if (!state_)
        return error_response(503, "state not loaded");
    return json_response(200, {{"diseases", state_->network.diseases()}});
}

Response TriageService::clusters() const
{
    if (!state_)
        return error_response(503, "state not loaded");
    const auto& c = state_->clusters;
    ordered_json groups = ordered_json::array();
    for (std::size_t g = 0; g < c.k; ++g) {
        std::vector<std::string> members;
        for (std::size_t i = 0; i < c.assignments.size(); ++i)
            if (c.assignments[i] == g)
                members.push_back(state_->network.profiles[i].disease);
        groups.push_back({{"cluster", g}, {"diseases", members}});
    }
    return json_response(200, {{"k", c.k}, {"silhouette", c.silhouette}, {"clusters", groups}});
}

Response TriageService::similar(std::string_view disease) const
{
    if (!state_)
        return error_response(503, "state not loaded");
    const auto names = state_->network.diseases();
    const auto it = std::find(names.begin(), names.end(), corpus::canonical_disease(disease));
    if (it == names.end())
        return error_response(404, "unknown disease '" + std::string(disease) + "'");
    const auto row = static_cast<std::size_t>(it - names.begin());

    std::vector<double> scores(state_->similarity.row(row).begin(), state_->similarity.row(row).end());
    ordered_json list = ordered_json::array();
    for (auto j : ranking(scores))
        if (j != row)
            list.push_back({{"disease", names[j]}, {"similarity", scores[j]}});
    return json_response(200, {{"disease", names[row]}, {"similar", list}});
}

Response TriageService::predict(const std::string& request_body) const
{
    if (!state_ || !state_->ready())
        return error_response(503, "no model loaded");
    Query q;
    if (auto err = parse_query(*state_, request_body, false, q))
        return *err;

    const auto query = corpus::encode_symptoms(q.symptoms, state_->vocab);
    const auto p = confidences(*state_, q.model, query);
    const auto names = state_->network.diseases();
    const auto order = ranking(p);

    ordered_json ranked = ordered_json::array();
    for (auto c : order)
        ranked.push_back({{"disease", names[c]}, {"confidence", p[c]}});

    const std::size_t top = order.front();
    ordered_json similar = ordered_json::array();
    std::vector<double> row(state_->similarity.row(top).begin(), state_->similarity.row(top).end());
    for (auto j : ranking(row))
        if (j != top && row[j] >= symptomnet::default_similar_threshold)
            similar.push_back({{"disease", names[j]}, {"similarity", row[j]}});

    const auto& subset = q.model == "lssvm" ? state_->lssvm->feature_subset : state_->cnn->feature_subset;
    ordered_json body;
    body["model"] = q.model;
    body["features"] = feature_mode(*state_, subset);
    body["ranked"] = ranked;
    body["similar"] = similar;
    return json_response(200, body);
}

// Expected entropy reduction from probing symptom s: with q the chance s is
// present (incidence of s across the top hypotheses, weighted by their
// confidence), asserting s moves the entropy to H_on and leaving it out keeps
// H_cur, so the reduction is q * (H_cur - H_on).
Response TriageService::suggest(const std::string& request_body) const
{
    if (!state_ || !state_->ready())
        return error_response(503, "no model loaded");
    Query q;
    if (auto err = parse_query(*state_, request_body, true, q))
        return *err;

    auto query = corpus::encode_symptoms(q.symptoms, state_->vocab);
    const auto p = confidences(*state_, q.model, query);
    const auto order = ranking(p);

    ordered_json list = ordered_json::array();
    if (p[order.front()] <= concentrated_confidence) {
        const double h_cur = entropy(p);
        const std::size_t top = std::min(suggestion_hypotheses, order.size());
        double mass = 0.0;
        for (std::size_t r = 0; r < top; ++r)
            mass += p[order[r]];

        struct Candidate {
            std::size_t symptom;
            double reduction;
        };
        std::vector<Candidate> candidates;
        for (std::size_t s = 0; s < state_->vocab.size(); ++s) {
            if (query[s] != 0.0)
                continue;
            double presence = 0.0;
            for (std::size_t r = 0; r < top; ++r)
                presence += p[order[r]] * state_->network.profiles[order[r]].incidence[s];
            presence /= mass;
            if (presence == 0.0)
                continue;
            query[s] = 1.0;
            const double h_on = entropy(confidences(*state_, q.model, query));
            query[s] = 0.0;
            const double reduction = presence * (h_cur - h_on);
            if (reduction > 0.0)
                candidates.push_back({s, reduction});
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) { return a.reduction > b.reduction; });
        if (candidates.size() > q.limit)
            candidates.resize(q.limit);
        for (const auto& c : candidates)
            list.push_back({{"symptom", state_->vocab.entries[c.symptom]}, {"expected_reduction", c.reduction}});
    }

    ordered_json body;
    body["model"] = q.model;
    body["entropy"] = entropy(p);
    body["suggestions"] = list;
    return json_response(200, body);
}

} // namespace symdx::triage
