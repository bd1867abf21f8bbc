#include "helpers.hpp"

#include "cli.hpp"
#include "symdx/export.hpp"
#include "symdx/serialize.hpp"

#include <sstream>

using namespace symdx;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

// Small synthetic corpus so commands finish quickly.
std::string small_config(const test::TempDir& dir, const std::string& extra = "")
{
    const auto path = (dir / "config.json").string();
    test::write_file(path, R"({"synth": {"num_diseases": 5, "records_per_disease": 12, "seed": 2},
                               "cnn": {"epochs": 5, "conv_filters": 8})" + extra + "}");
    return path;
}

} // namespace

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"eval", "--no-such-flag"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({"ingest"}).code, 1);
    EXPECT_EQ(run({"eval", "--model", "forest"}).code, 1);
}

TEST(Cli, DataErrors)
{
    test::TempDir dir;
    EXPECT_EQ(run({"ingest", "--data", (dir / "missing.csv").string()}).code, 2);
    test::write_file(dir / "bad.csv", "Disease,Symptom_1\nflu,\n");
    const auto r = run({"ingest", "--data", (dir / "bad.csv").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("EmptyRecord"), std::string::npos) << r.err;
}

TEST(Cli, NumericalFailure)
{
    test::TempDir dir;
    const auto cfg = small_config(dir, R"(, "model": "cnn", "cnn": {"learning_rate": 1e300, "epochs": 50})");
    EXPECT_EQ(run({"eval", "--config", cfg}).code, 3);
}

TEST(Cli, SynthThenIngest)
{
    test::TempDir dir;
    const auto csv = (dir / "synth.csv").string();
    ASSERT_EQ(run({"synth", "--diseases", "4", "--records", "10", "--out", csv}).code, 0);
    const auto r = run({"ingest", "--data", csv});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("records: 40"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("diseases: 4"), std::string::npos) << r.out;
}

TEST(Cli, TrainWritesServableModel)
{
    test::TempDir dir;
    const auto cfg = small_config(dir);
    const auto out = (dir / "model").string();
    ASSERT_EQ(run({"train", "--config", cfg, "--out", out}).code, 0);
    ASSERT_EQ(run({"train", "--config", cfg, "--model", "cnn", "--out", out}).code, 0);
    for (const char* f : {"network.json", "lssvm.json", "cnn.json", "loss.csv", "report.json"})
        EXPECT_TRUE(std::filesystem::exists(dir / ("model/" + std::string(f)))) << f;
}

TEST(Cli, EvalAblateAndExports)
{
    test::TempDir dir;
    const auto cfg = small_config(dir);
    const auto eval = run({"eval", "--config", cfg, "--features", "common_only", "--out", dir.path().string()});
    EXPECT_EQ(eval.code, 0) << eval.err;
    EXPECT_NE(eval.out.find("common_only"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / "report.csv"));

    const auto ablate = run({"ablate", "--config", cfg, "--out", dir.path().string()});
    EXPECT_EQ(ablate.code, 0) << ablate.err;
    const auto table = report::read_csv(dir / "evaluation.csv");
    EXPECT_EQ(table.rows.size(), 4u);
}

TEST(Cli, AnalysisCommands)
{
    test::TempDir dir;
    const auto cfg = small_config(dir);
    const auto out = dir.path().string();
    EXPECT_EQ(run({"analyze", "--config", cfg, "--out", out}).code, 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "occurrence_histogram.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "uniqueness.csv"));

    EXPECT_EQ(run({"cv", "--config", cfg, "--folds", "3", "--out", out}).code, 0);
    EXPECT_EQ(report::read_csv(dir / "cv.csv").rows.size(), 3u);

    EXPECT_EQ(run({"pca-sweep", "--config", cfg, "--k", "1,2,3", "--folds", "3", "--out", out}).code, 0);
    EXPECT_EQ(report::read_csv(dir / "pca_sweep.csv").rows.size(), 3u);

    const auto cl = run({"cluster", "--config", cfg, "--k", "2,3", "--restarts", "2", "--out", out});
    EXPECT_EQ(cl.code, 0) << cl.err;
    EXPECT_EQ(report::read_csv(dir / "membership.csv").rows.size(), 60u);

    EXPECT_EQ(run({"cluster", "--config", cfg, "--profiles", "--k", "2", "--out", out}).code, 0);
    EXPECT_EQ(report::read_csv(dir / "membership.csv").rows.size(), 5u);

    EXPECT_EQ(run({"cluster", "--config", cfg, "--reduced", "--components", "3", "--k", "2", "--out", out}).code,
              0);
}

TEST(Cli, StructuredFormat)
{
    test::TempDir dir;
    const auto cfg = small_config(dir);
    EXPECT_EQ(run({"analyze", "--config", cfg, "--format", "structured", "--out", dir.path().string()}).code, 0);
    const auto j = parse_json(read_text_file(dir / "uniqueness.json"));
    EXPECT_EQ(j["rows"].size(), 5u);
}
