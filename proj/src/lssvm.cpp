#include "symdx/lssvm.hpp"

#include "symdx/error.hpp"
#include "symdx/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace symdx::lssvm {

namespace {

constexpr const char* schema_id = "symdx.lssvm";
constexpr int schema_version = 1;

double squared_distance(std::span<const double> x, std::span<const double> z)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - z[i];
        sum += diff * diff;
    }
    return sum;
}

} // namespace

KernelParams KernelParams::defaults(std::size_t active_features)
{
    return {std::sqrt(static_cast<double>(std::max<std::size_t>(active_features, 1))) / 2.0, 10.0};
}

void KernelParams::validate() const
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        fail(ErrorCode::InvalidConfig, "sigma must be positive");
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        fail(ErrorCode::InvalidConfig, "gamma must be positive");
}

double rbf_kernel(std::span<const double> x, std::span<const double> z, double sigma)
{
    if (x.size() != z.size())
        fail(ErrorCode::DimensionMismatch, "kernel arguments differ in length");
    if (!(sigma > 0.0))
        fail(ErrorCode::InvalidConfig, "sigma must be positive");
    return std::exp(-squared_distance(x, z) / (2.0 * sigma * sigma));
}

numkit::Matrix kernel_matrix(const numkit::Matrix& points, double sigma)
{
    const std::size_t n = points.rows();
    const double scale = -1.0 / (2.0 * sigma * sigma);
    numkit::Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::exp(scale * squared_distance(points.row(i), points.row(j)));
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

LsSvmModel train(const corpus::DesignMatrix& data, const KernelParams& params)
{
    params.validate();
    const std::size_t n = data.rows();
    const std::size_t classes = data.class_count();
    if (classes < 2)
        fail(ErrorCode::InvalidConfig, "need at least two classes");
    std::vector<std::size_t> support_count(classes, 0);
    for (int label : data.labels) {
        if (label < 0 || static_cast<std::size_t>(label) >= classes)
            fail(ErrorCode::LabelOutOfRange, "label " + std::to_string(label));
        ++support_count[static_cast<std::size_t>(label)];
    }
    for (std::size_t c = 0; c < classes; ++c)
        if (support_count[c] == 0)
            fail(ErrorCode::ClassTooSmall, "class '" + data.class_names[c] + "' has no training rows");

    numkit::Matrix h = kernel_matrix(data.features, params.sigma);
    for (std::size_t i = 0; i < n; ++i)
        h(i, i) += 1.0 / params.gamma;

    std::optional<numkit::CholeskyFactor> factor;
    try {
        factor.emplace(h);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotPositiveDefinite)
            throw;
        fail(ErrorCode::SingularSystem, "kernel system is not positive definite; try a larger gamma");
    }

    // With H = K + I/gamma: H eta = 1, H nu = y, then b = 1'nu / 1'eta and
    // alpha = nu - b eta satisfies both block rows of the bordered system.
    const std::vector<double> ones(n, 1.0);
    const std::vector<double> eta = factor->solve(ones);
    const double eta_sum = std::accumulate(eta.begin(), eta.end(), 0.0);
    if (!(eta_sum > 0.0) || !std::isfinite(eta_sum))
        fail(ErrorCode::SingularSystem, "degenerate kernel system");

    LsSvmModel model;
    model.support = data.features;
    model.params = params;
    model.class_names = data.class_names;
    model.feature_names = data.feature_names;
    model.feature_subset.resize(data.cols());
    std::iota(model.feature_subset.begin(), model.feature_subset.end(), std::size_t{0});
    model.alpha.resize(classes);
    model.bias.resize(classes);

    std::vector<double> y(n);
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t i = 0; i < n; ++i)
            y[i] = data.labels[i] == static_cast<int>(c) ? 1.0 : -1.0;
        std::vector<double> nu = factor->solve(y);
        const double b = std::accumulate(nu.begin(), nu.end(), 0.0) / eta_sum;
        for (std::size_t i = 0; i < n; ++i)
            nu[i] -= b * eta[i];
        for (double v : nu)
            if (!std::isfinite(v))
                fail(ErrorCode::SingularSystem, "non-finite coefficients; try a larger gamma");
        model.alpha[c] = std::move(nu);
        model.bias[c] = b;
    }
    return model;
}

std::vector<double> decision_scores(const LsSvmModel& model, std::span<const double> x)
{
    if (x.size() != model.feature_count())
        fail(ErrorCode::DimensionMismatch, "query has " + std::to_string(x.size()) +
                                               " features, model expects " +
                                               std::to_string(model.feature_count()));
    const std::size_t n = model.support.rows();
    std::vector<double> k(n);
    const double scale = -1.0 / (2.0 * model.params.sigma * model.params.sigma);
    for (std::size_t i = 0; i < n; ++i)
        k[i] = std::exp(scale * squared_distance(model.support.row(i), x));
    std::vector<double> scores(model.class_count());
    for (std::size_t c = 0; c < scores.size(); ++c)
        scores[c] = numkit::dot(model.alpha[c], k) + model.bias[c];
    return scores;
}

Prediction rank_scores(std::span<const double> scores)
{
    Prediction p;
    if (scores.empty())
        return p;
    const double top = *std::max_element(scores.begin(), scores.end());
    double total = 0.0;
    for (std::size_t c = 0; c < scores.size(); ++c) {
        const double e = std::exp(scores[c] - top);
        p.ranked.push_back({static_cast<int>(c), e});
        total += e;
    }
    for (auto& r : p.ranked)
        r.confidence /= total;
    std::stable_sort(p.ranked.begin(), p.ranked.end(), [&](const RankedClass& a, const RankedClass& b) {
        return scores[static_cast<std::size_t>(a.label)] > scores[static_cast<std::size_t>(b.label)];
    });
    p.label = p.ranked.front().label;
    return p;
}

Prediction predict(const LsSvmModel& model, std::span<const double> x)
{
    const auto scores = decision_scores(model, x);
    return rank_scores(scores);
}

std::vector<int> predict_labels(const LsSvmModel& model, const numkit::Matrix& rows)
{
    std::vector<int> out;
    out.reserve(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i)
        out.push_back(predict(model, rows.row(i)).label);
    return out;
}

std::string serialize(const LsSvmModel& model)
{
    ordered_json j;
    j["schema"] = schema_id;
    j["version"] = schema_version;
    j["params"] = {{"sigma", model.params.sigma}, {"gamma", model.params.gamma}};
    j["vocabulary_hash"] = hash_to_hex(model.vocabulary_hash);
    j["classes"] = model.class_names;
    j["features"] = model.feature_names;
    j["feature_subset"] = model.feature_subset;
    j["support"] = matrix_to_json(model.support);
    j["bias"] = model.bias;
    j["alpha"] = model.alpha;
    return j.dump() + "\n";
}

LsSvmModel deserialize(const std::string& text)
{
    const ordered_json j = parse_json(text);
    check_schema(j, schema_id, schema_version);
    try {
        LsSvmModel m;
        m.params.sigma = j.at("params").at("sigma").get<double>();
        m.params.gamma = j.at("params").at("gamma").get<double>();
        m.params.validate();
        m.vocabulary_hash = hash_from_hex(j.at("vocabulary_hash").get<std::string>());
        m.class_names = j.at("classes").get<std::vector<std::string>>();
        m.feature_names = j.at("features").get<std::vector<std::string>>();
        m.feature_subset = j.at("feature_subset").get<std::vector<std::size_t>>();
        m.support = matrix_from_json(j.at("support"));
        m.bias = j.at("bias").get<std::vector<double>>();
        m.alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
        if (m.alpha.size() != m.bias.size() || m.class_names.size() != m.bias.size() ||
            m.feature_subset.size() != m.support.cols() || m.feature_names.size() != m.support.cols())
            fail(ErrorCode::ModelFormat, "inconsistent LS-SVM model shapes");
        for (const auto& a : m.alpha)
            if (a.size() != m.support.rows())
                fail(ErrorCode::ModelFormat, "alpha length does not match support rows");
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ModelFormat, e.what());
    }
}

void save_model(const LsSvmModel& model, const std::filesystem::path& path)
{
    write_text_file(path, serialize(model));
}

LsSvmModel load_model(const std::filesystem::path& path)
{
    return deserialize(read_text_file(path));
}

} // namespace symdx::lssvm
