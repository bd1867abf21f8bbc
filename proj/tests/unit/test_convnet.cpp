#include "helpers.hpp"

#include "symdx/convnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace symdx;
using namespace symdx::convnet;
using test::expect_error;

namespace {

CnnConfig tiny_config(std::uint64_t seed)
{
    CnnConfig c;
    c.input_length = 10;
    c.conv_filters = 4;
    c.dense_units = 3;
    c.class_count = 3;
    c.seed = seed;
    return c;
}

// Two classes told apart by which half of the input is active.
corpus::DesignMatrix halves(std::size_t per_class, std::size_t length, std::uint64_t seed)
{
    Rng rng(seed);
    numkit::Matrix x(2 * per_class, length);
    std::vector<int> labels;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int label = static_cast<int>(i % 2);
        for (std::size_t j = 0; j < length; ++j) {
            const bool in_half = (j < length / 2) == (label == 0);
            x(i, j) = in_half && rng.uniform01() < 0.7 ? 1.0 : 0.0;
        }
        x(i, label == 0 ? 0 : length - 1) = 1.0;
        labels.push_back(label);
    }
    return test::design(std::move(x), std::move(labels), 2);
}

std::vector<double> softmax(std::span<const double> z)
{
    const double m = *std::max_element(z.begin(), z.end());
    std::vector<double> p;
    double sum = 0.0;
    for (double v : z) {
        p.push_back(std::exp(v - m));
        sum += p.back();
    }
    for (auto& v : p)
        v /= sum;
    return p;
}

} // namespace

TEST(CnnInit, ShapesAndBiases)
{
    CnnConfig c;
    c.input_length = 135;
    c.class_count = 41;
    const auto m = init(c);
    EXPECT_EQ(m.params.conv_w.size(), 128u);
    EXPECT_EQ(c.conv_positions(), 134u);
    EXPECT_EQ(c.pooled_positions(), 67u);
    EXPECT_EQ(m.params.out_w.size(), 67u * 16u * 41u);
    for (auto* b : {&m.params.conv_b, &m.params.dense_b, &m.params.out_b})
        EXPECT_TRUE(std::all_of(b->begin(), b->end(), [](double v) { return v == 0.0; }));
    // conv fan_in = kernel width, fan_out = filters * kernel width.
    const double limit = std::sqrt(6.0 / (2.0 + 128.0));
    for (double w : m.params.conv_w)
        EXPECT_LE(std::abs(w), limit);
}

TEST(CnnInit, DeterministicAndValidated)
{
    EXPECT_EQ(init(tiny_config(4)), init(tiny_config(4)));
    EXPECT_NE(init(tiny_config(4)).params, init(tiny_config(5)).params);
    auto bad = tiny_config(1);
    bad.kernel_width = 11;
    expect_error(ErrorCode::InvalidConfig, [&] { init(bad); });
    bad = tiny_config(1);
    bad.conv_filters = 0;
    expect_error(ErrorCode::InvalidConfig, [&] { init(bad); });
}

TEST(CnnForward, ProbabilityDistribution)
{
    const auto m = init(tiny_config(2));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto x = test::random_matrix(1, 10, seed, -2.0, 2.0);
        const auto p = forward(m, x.row(0));
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
        for (double v : p) {
            EXPECT_GT(v, 0.0);
            EXPECT_LT(v, 1.0);
        }
    }
    expect_error(ErrorCode::DimensionMismatch, [&] { forward(m, std::vector<double>(9, 0.0)); });
}

TEST(CnnForward, ZeroInputGivesSoftmaxOfOutputBias)
{
    auto m = init(tiny_config(3));
    m.params.out_b = {0.3, -1.2, 0.8};
    const auto p = forward(m, std::vector<double>(10, 0.0));
    const auto expected = softmax(m.params.out_b);
    for (std::size_t c = 0; c < 3; ++c)
        EXPECT_NEAR(p[c], expected[c], 1e-15);
}

TEST(CnnGradCheck, TinyConfigSeeds)
{
    for (std::uint64_t seed : {1, 2, 3}) {
        auto m = init(tiny_config(seed));
        // Nonzero biases exercise their gradients and move ReLUs off the kink at 0.
        Rng rng(seed + 100);
        for (auto block : m.params.blocks())
            for (auto& v : block)
                v += rng.uniform(-0.1, 0.1);
        const auto x = test::random_matrix(1, 10, seed, 0.0, 1.0);
        const double err = grad_check(m, x.row(0), static_cast<int>(seed % 3));
        EXPECT_LT(err, 1e-4) << "seed " << seed;
        EXPECT_EQ(err, grad_check(m, x.row(0), static_cast<int>(seed % 3)));
    }
}

TEST(CnnTrain, SeparableToyReachesFullAccuracy)
{
    const auto data = halves(40, 12, 5);
    CnnConfig c;
    c.input_length = 12;
    c.class_count = 2;
    c.epochs = 50;
    c.conv_filters = 8;
    c.dense_units = 4;
    c.batch_size = 8;
    const auto r = train(init(c), data);
    EXPECT_EQ(predict_labels(r.model, data.features), data.labels);
    EXPECT_EQ(r.loss_history.size(), 50u);
}

TEST(CnnTrain, LossDecreasesOverWindows)
{
    const auto data = halves(40, 16, 6);
    CnnConfig c;
    c.input_length = 16;
    c.class_count = 2;
    const auto r = train(init(c), data);
    const auto& h = r.loss_history;
    ASSERT_EQ(h.size(), 30u);
    for (std::size_t start = 0; start + 10 <= h.size(); start += 5) {
        const double first = std::accumulate(h.begin() + start, h.begin() + start + 5, 0.0);
        const double next = std::accumulate(h.begin() + start + 5, h.begin() + start + 10, 0.0);
        EXPECT_LE(next, first + 1e-12) << "window at " << start;
    }
}

TEST(CnnTrain, Deterministic)
{
    const auto data = halves(20, 10, 7);
    CnnConfig c;
    c.input_length = 10;
    c.class_count = 2;
    c.epochs = 5;
    const auto a = train(init(c), data);
    const auto b = train(init(c), data);
    EXPECT_EQ(a.model, b.model);
    EXPECT_EQ(a.loss_history, b.loss_history);
}

TEST(CnnTrain, ZeroLearningRateLeavesParameters)
{
    const auto data = halves(10, 10, 8);
    CnnConfig c;
    c.input_length = 10;
    c.class_count = 2;
    c.epochs = 3;
    c.learning_rate = 0.0;
    const auto start = init(c);
    EXPECT_EQ(train(start, data).model.params, start.params);
}

TEST(CnnTrain, RowOrderWithinBatchDoesNotMatter)
{
    const auto data = halves(16, 10, 9);
    CnnConfig c;
    c.input_length = 10;
    c.class_count = 2;
    auto a = init(c);
    auto b = a;
    std::vector<std::size_t> rows(data.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    apply_batch(a, data, rows);
    std::reverse(rows.begin(), rows.end());
    apply_batch(b, data, rows);
    const auto pa = a.params.blocks();
    const auto pb = b.params.blocks();
    for (std::size_t k = 0; k < pa.size(); ++k)
        for (std::size_t i = 0; i < pa[k].size(); ++i)
            EXPECT_NEAR(pa[k][i], pb[k][i], 1e-12);
}

TEST(CnnTrain, Errors)
{
    auto data = halves(4, 10, 1);
    CnnConfig c;
    c.input_length = 10;
    c.class_count = 2;
    c.learning_rate = 1e300;
    c.epochs = 50;
    expect_error(ErrorCode::NonFiniteLoss, [&] { train(init(c), data); });

    c.learning_rate = 0.05;
    data.labels[0] = 5;
    expect_error(ErrorCode::LabelOutOfRange, [&] { train(init(c), data); });
    c.input_length = 11;
    expect_error(ErrorCode::DimensionMismatch, [&] { train(init(c), halves(4, 10, 1)); });
}

TEST(CnnPersistence, BitExactReload)
{
    test::TempDir dir;
    auto m = init(tiny_config(7));
    m.class_names = {"a", "b", "c"};
    m.feature_subset = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    m.vocabulary_hash = 42;
    save_model(m, dir / "cnn.json");
    const auto back = load_model(dir / "cnn.json");
    EXPECT_EQ(back, m);
    const std::vector<double> x(10, 0.5);
    EXPECT_EQ(forward(back, x), forward(m, x));
}
