#include "symdx/convnet.hpp"

#include "symdx/error.hpp"
#include "symdx/rng.hpp"
#include "symdx/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace symdx::convnet {

namespace {

constexpr const char* schema_id = "symdx.cnn";
constexpr int schema_version = 1;

struct Activations {
    std::vector<double> z1;     // [position][filter]
    std::vector<double> z2;     // [position][unit]
    std::vector<double> pooled; // [pooled][unit]
    std::vector<std::size_t> argmax;
    std::vector<double> logits;
};

void run_forward(const CnnModel& model, std::span<const double> x, Activations& act)
{
    const CnnConfig& cfg = model.config;
    const CnnParameters& p = model.params;
    const std::size_t P = cfg.conv_positions(), F = cfg.conv_filters, W = cfg.kernel_width;
    const std::size_t U = cfg.dense_units, Q = cfg.pool_width, P2 = cfg.pooled_positions();
    const std::size_t C = cfg.class_count;

    act.z1.assign(P * F, 0.0);
    std::vector<double> a1(P * F);
    for (std::size_t pos = 0; pos < P; ++pos) {
        for (std::size_t f = 0; f < F; ++f) {
            double s = p.conv_b[f];
            for (std::size_t w = 0; w < W; ++w)
                s += p.conv_w[f * W + w] * x[pos + w];
            act.z1[pos * F + f] = s;
            a1[pos * F + f] = s > 0.0 ? s : 0.0;
        }
    }

    act.z2.assign(P * U, 0.0);
    for (std::size_t pos = 0; pos < P; ++pos) {
        const double* in = &a1[pos * F];
        for (std::size_t u = 0; u < U; ++u) {
            const double* w = &p.dense_w[u * F];
            double s = p.dense_b[u];
            for (std::size_t f = 0; f < F; ++f)
                s += w[f] * in[f];
            act.z2[pos * U + u] = s;
        }
    }

    act.pooled.assign(P2 * U, 0.0);
    act.argmax.assign(P2 * U, 0);
    for (std::size_t q = 0; q < P2; ++q) {
        for (std::size_t u = 0; u < U; ++u) {
            std::size_t best = q * Q;
            double best_v = std::max(act.z2[best * U + u], 0.0);
            for (std::size_t pos = q * Q + 1; pos < (q + 1) * Q; ++pos) {
                const double v = std::max(act.z2[pos * U + u], 0.0);
                if (v > best_v) {
                    best_v = v;
                    best = pos;
                }
            }
            act.pooled[q * U + u] = best_v;
            act.argmax[q * U + u] = best;
        }
    }

    const std::size_t flat = P2 * U;
    act.logits.assign(C, 0.0);
    for (std::size_t c = 0; c < C; ++c)
        act.logits[c] = p.out_b[c] + std::inner_product(act.pooled.begin(), act.pooled.end(),
                                                        p.out_w.begin() + static_cast<std::ptrdiff_t>(c * flat), 0.0);
}

std::vector<double> softmax(std::span<const double> logits)
{
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) {
        out[c] = std::exp(logits[c] - top);
        total += out[c];
    }
    for (double& v : out)
        v /= total;
    return out;
}

void require_input(const CnnModel& model, std::span<const double> x)
{
    if (x.size() != model.config.input_length)
        fail(ErrorCode::DimensionMismatch, "input has length " + std::to_string(x.size()) +
                                               ", network expects " +
                                               std::to_string(model.config.input_length));
}

void fill_uniform(std::vector<double>& w, double limit, Rng& rng)
{
    for (double& v : w)
        v = rng.uniform(-limit, limit);
}

double glorot_limit(std::size_t fan_in, std::size_t fan_out)
{
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

} // namespace

void CnnConfig::validate() const
{
    if (input_length == 0 || conv_filters == 0 || kernel_width == 0 || dense_units == 0 ||
        pool_width == 0 || class_count == 0 || batch_size == 0)
        fail(ErrorCode::InvalidConfig, "CNN layer sizes must be positive");
    if (kernel_width > input_length)
        fail(ErrorCode::InvalidConfig, "kernel wider than input");
    if (pooled_positions() == 0)
        fail(ErrorCode::InvalidConfig, "pool width exceeds convolution output length");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        fail(ErrorCode::InvalidConfig, "learning rate must be non-negative");
}

CnnParameters CnnParameters::zeros(const CnnConfig& cfg)
{
    CnnParameters p;
    p.conv_w.assign(cfg.conv_filters * cfg.kernel_width, 0.0);
    p.conv_b.assign(cfg.conv_filters, 0.0);
    p.dense_w.assign(cfg.dense_units * cfg.conv_filters, 0.0);
    p.dense_b.assign(cfg.dense_units, 0.0);
    p.out_w.assign(cfg.class_count * cfg.flat_size(), 0.0);
    p.out_b.assign(cfg.class_count, 0.0);
    return p;
}

std::array<std::span<double>, 6> CnnParameters::blocks()
{
    return {conv_w, conv_b, dense_w, dense_b, out_w, out_b};
}

std::array<std::span<const double>, 6> CnnParameters::blocks() const
{
    return {conv_w, conv_b, dense_w, dense_b, out_w, out_b};
}

std::size_t CnnParameters::size() const
{
    std::size_t n = 0;
    for (auto b : blocks())
        n += b.size();
    return n;
}

CnnModel init(const CnnConfig& config)
{
    config.validate();
    CnnModel model;
    model.config = config;
    model.params = CnnParameters::zeros(config);
    Rng rng(config.seed);
    // Convolution fans follow the usual 1-D convention: one input channel.
    fill_uniform(model.params.conv_w,
                 glorot_limit(config.kernel_width, config.kernel_width * config.conv_filters), rng);
    fill_uniform(model.params.dense_w, glorot_limit(config.conv_filters, config.dense_units), rng);
    fill_uniform(model.params.out_w, glorot_limit(config.flat_size(), config.class_count), rng);
    model.feature_subset.resize(config.input_length);
    std::iota(model.feature_subset.begin(), model.feature_subset.end(), std::size_t{0});
    return model;
}

std::vector<double> forward(const CnnModel& model, std::span<const double> x)
{
    require_input(model, x);
    Activations act;
    run_forward(model, x, act);
    return softmax(act.logits);
}

double loss_and_gradient(const CnnModel& model, std::span<const double> x, int label,
                         CnnParameters* grad)
{
    require_input(model, x);
    const CnnConfig& cfg = model.config;
    if (label < 0 || static_cast<std::size_t>(label) >= cfg.class_count)
        fail(ErrorCode::LabelOutOfRange, "label " + std::to_string(label));

    Activations act;
    run_forward(model, x, act);
    const double top = *std::max_element(act.logits.begin(), act.logits.end());
    double total = 0.0;
    for (double l : act.logits)
        total += std::exp(l - top);
    const double loss = top + std::log(total) - act.logits[static_cast<std::size_t>(label)];
    if (!grad)
        return loss;

    const CnnParameters& p = model.params;
    const std::size_t P = cfg.conv_positions(), F = cfg.conv_filters, W = cfg.kernel_width;
    const std::size_t U = cfg.dense_units, P2 = cfg.pooled_positions(), C = cfg.class_count;
    const std::size_t flat = P2 * U;

    std::vector<double> dlogits = softmax(act.logits);
    dlogits[static_cast<std::size_t>(label)] -= 1.0;

    std::vector<double> dpooled(flat, 0.0);
    for (std::size_t c = 0; c < C; ++c) {
        const double g = dlogits[c];
        grad->out_b[c] += g;
        double* gw = &grad->out_w[c * flat];
        const double* w = &p.out_w[c * flat];
        for (std::size_t j = 0; j < flat; ++j) {
            gw[j] += g * act.pooled[j];
            dpooled[j] += g * w[j];
        }
    }

    // Route pooled gradients to the winning positions, through the ReLU.
    std::vector<double> dz2(P * U, 0.0);
    for (std::size_t j = 0; j < flat; ++j) {
        const std::size_t u = j % U;
        const std::size_t pos = act.argmax[j];
        if (act.z2[pos * U + u] > 0.0)
            dz2[pos * U + u] += dpooled[j];
    }

    std::vector<double> dz1(P * F, 0.0);
    for (std::size_t pos = 0; pos < P; ++pos) {
        const double* z1 = &act.z1[pos * F];
        double* da1 = &dz1[pos * F];
        bool any = false;
        for (std::size_t u = 0; u < U; ++u) {
            const double g = dz2[pos * U + u];
            if (g == 0.0)
                continue;
            any = true;
            grad->dense_b[u] += g;
            double* gw = &grad->dense_w[u * F];
            const double* w = &p.dense_w[u * F];
            for (std::size_t f = 0; f < F; ++f) {
                gw[f] += g * (z1[f] > 0.0 ? z1[f] : 0.0);
                da1[f] += g * w[f];
            }
        }
        if (!any)
            continue;
        for (std::size_t f = 0; f < F; ++f) {
            if (z1[f] <= 0.0)
                continue;
            const double g = da1[f];
            grad->conv_b[f] += g;
            for (std::size_t w = 0; w < W; ++w)
                grad->conv_w[f * W + w] += g * x[pos + w];
        }
    }
    return loss;
}

double apply_batch(CnnModel& model, const corpus::DesignMatrix& data,
                   std::span<const std::size_t> rows)
{
    if (rows.empty())
        return 0.0;
    CnnParameters grad = CnnParameters::zeros(model.config);
    double loss = 0.0;
    for (auto r : rows)
        loss += loss_and_gradient(model, data.features.row(r), data.labels[r], &grad);
    const double step = model.config.learning_rate / static_cast<double>(rows.size());
    auto params = model.params.blocks();
    auto grads = grad.blocks();
    for (std::size_t b = 0; b < params.size(); ++b)
        for (std::size_t i = 0; i < params[b].size(); ++i)
            params[b][i] -= step * grads[b][i];
    return loss / static_cast<double>(rows.size());
}

TrainResult train(CnnModel model, const corpus::DesignMatrix& data)
{
    const CnnConfig& cfg = model.config;
    cfg.validate();
    if (data.cols() != cfg.input_length)
        fail(ErrorCode::DimensionMismatch, "design matrix has " + std::to_string(data.cols()) +
                                               " columns, network expects " +
                                               std::to_string(cfg.input_length));
    for (int label : data.labels)
        if (label < 0 || static_cast<std::size_t>(label) >= cfg.class_count)
            fail(ErrorCode::LabelOutOfRange, "label " + std::to_string(label));

    TrainResult result{std::move(model), {}};
    // The shuffling stream is distinct from the initialization stream.
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(std::span(order));
        double total = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, order.size() - start);
            const double batch_loss = apply_batch(result.model, data, std::span(order).subspan(start, len));
            total += batch_loss * static_cast<double>(len);
        }
        const double mean = order.empty() ? 0.0 : total / static_cast<double>(order.size());
        if (!std::isfinite(mean))
            fail(ErrorCode::NonFiniteLoss, "loss diverged at epoch " + std::to_string(epoch + 1) +
                                               "; try a lower learning rate");
        result.loss_history.push_back(mean);
    }
    return result;
}

double grad_check(const CnnModel& model, std::span<const double> x, int label)
{
    constexpr double h = 1e-5;
    // Relative error is measured against max(|analytic|, |numeric|, floor)
    // so exactly-zero gradients (dead units) do not divide by zero.
    constexpr double floor = 1e-8;

    CnnParameters analytic = CnnParameters::zeros(model.config);
    loss_and_gradient(model, x, label, &analytic);

    CnnModel probe = model;
    auto params = probe.params.blocks();
    auto grads = analytic.blocks();
    double worst = 0.0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        for (std::size_t i = 0; i < params[b].size(); ++i) {
            const double saved = params[b][i];
            params[b][i] = saved + h;
            const double up = loss_and_gradient(probe, x, label, nullptr);
            params[b][i] = saved - h;
            const double down = loss_and_gradient(probe, x, label, nullptr);
            params[b][i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double a = grads[b][i];
            const double denom = std::max({std::abs(a), std::abs(numeric), floor});
            worst = std::max(worst, std::abs(a - numeric) / denom);
        }
    }
    return worst;
}

std::vector<int> predict_labels(const CnnModel& model, const numkit::Matrix& rows)
{
    std::vector<int> out;
    out.reserve(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const auto probs = forward(model, rows.row(i));
        out.push_back(static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin()));
    }
    return out;
}

std::string serialize(const CnnModel& model)
{
    const CnnConfig& c = model.config;
    ordered_json j;
    j["schema"] = schema_id;
    j["version"] = schema_version;
    j["config"] = {{"input_length", c.input_length}, {"conv_filters", c.conv_filters},
                   {"kernel_width", c.kernel_width}, {"dense_units", c.dense_units},
                   {"pool_width", c.pool_width},     {"class_count", c.class_count},
                   {"learning_rate", c.learning_rate}, {"epochs", c.epochs},
                   {"batch_size", c.batch_size},     {"seed", c.seed}};
    j["vocabulary_hash"] = hash_to_hex(model.vocabulary_hash);
    j["classes"] = model.class_names;
    j["features"] = model.feature_names;
    j["feature_subset"] = model.feature_subset;
    const auto& p = model.params;
    j["params"] = {{"conv_w", p.conv_w},   {"conv_b", p.conv_b}, {"dense_w", p.dense_w},
                   {"dense_b", p.dense_b}, {"out_w", p.out_w},   {"out_b", p.out_b}};
    return j.dump() + "\n";
}

CnnModel deserialize(const std::string& text)
{
    const ordered_json j = parse_json(text);
    check_schema(j, schema_id, schema_version);
    try {
        CnnModel m;
        const auto& c = j.at("config");
        m.config.input_length = c.at("input_length").get<std::size_t>();
        m.config.conv_filters = c.at("conv_filters").get<std::size_t>();
        m.config.kernel_width = c.at("kernel_width").get<std::size_t>();
        m.config.dense_units = c.at("dense_units").get<std::size_t>();
        m.config.pool_width = c.at("pool_width").get<std::size_t>();
        m.config.class_count = c.at("class_count").get<std::size_t>();
        m.config.learning_rate = c.at("learning_rate").get<double>();
        m.config.epochs = c.at("epochs").get<std::size_t>();
        m.config.batch_size = c.at("batch_size").get<std::size_t>();
        m.config.seed = c.at("seed").get<std::uint64_t>();
        m.config.validate();
        m.vocabulary_hash = hash_from_hex(j.at("vocabulary_hash").get<std::string>());
        m.class_names = j.at("classes").get<std::vector<std::string>>();
        m.feature_names = j.at("features").get<std::vector<std::string>>();
        m.feature_subset = j.at("feature_subset").get<std::vector<std::size_t>>();
        const auto& p = j.at("params");
        m.params.conv_w = p.at("conv_w").get<std::vector<double>>();
        m.params.conv_b = p.at("conv_b").get<std::vector<double>>();
        m.params.dense_w = p.at("dense_w").get<std::vector<double>>();
        m.params.dense_b = p.at("dense_b").get<std::vector<double>>();
        m.params.out_w = p.at("out_w").get<std::vector<double>>();
        m.params.out_b = p.at("out_b").get<std::vector<double>>();
        const auto expected = CnnParameters::zeros(m.config);
        auto got = m.params.blocks();
        auto want = expected.blocks();
        for (std::size_t b = 0; b < got.size(); ++b)
            if (got[b].size() != want[b].size())
                fail(ErrorCode::ModelFormat, "parameter block size does not match config");
        if (m.feature_subset.size() != m.config.input_length ||
            m.class_names.size() != m.config.class_count)
            fail(ErrorCode::ModelFormat, "metadata does not match config");
        for (auto block : m.params.blocks())
            for (double v : block)
                if (!std::isfinite(v))
                    fail(ErrorCode::ModelFormat, "non-finite parameter");
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ModelFormat, e.what());
    }
}

void save_model(const CnnModel& model, const std::filesystem::path& path)
{
    write_text_file(path, serialize(model));
}

CnnModel load_model(const std::filesystem::path& path)
{
    return deserialize(read_text_file(path));
}

} // namespace symdx::convnet
