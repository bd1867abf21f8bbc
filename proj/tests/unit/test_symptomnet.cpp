#include "helpers.hpp"

#include "symdx/serialize.hpp"
#include "symdx/symptomnet.hpp"

#include <cmath>

using namespace symdx;
using namespace symdx::symptomnet;
using test::expect_error;

namespace {

corpus::Corpus toy(std::vector<std::pair<std::string, std::vector<std::string>>> rows)
{
    std::vector<corpus::Record> records;
    for (auto& [d, s] : rows)
        records.push_back({d, s});
    return corpus::make_corpus(std::move(records));
}

struct Net {
    corpus::Corpus corpus;
    corpus::SymptomVocabulary vocab;
    std::vector<DiseaseProfile> profiles;
    OccurrenceTable occ;
};

Net build(const corpus::Corpus& c)
{
    Net n{c, corpus::build_vocabulary(c), {}, {}};
    n.profiles = disease_profiles(n.corpus, n.vocab);
    n.occ = occurrence_histogram(n.profiles);
    return n;
}

} // namespace

TEST(Profiles, UnionOfRecords)
{
    const auto n = build(toy({{"d", {"a"}}, {"d", {"b"}}}));
    ASSERT_EQ(n.profiles.size(), 1u);
    EXPECT_EQ(n.profiles[0].incidence, (std::vector<std::uint8_t>{1, 1}));
}

TEST(Profiles, DisjointDiseasesAreOrthogonal)
{
    const auto n = build(toy({{"d", {"a"}}, {"e", {"b"}}}));
    EXPECT_EQ(numkit::dot(n.profiles[0].as_vector(), n.profiles[1].as_vector()), 0.0);
}

TEST(Occurrence, SingleDiseaseAllUnusual)
{
    const auto n = build(toy({{"d", {"a", "b", "c"}}}));
    EXPECT_EQ(n.occ.histogram, (std::map<int, int>{{1, 3}}));
}

TEST(Occurrence, HandCountedToy)
{
    // a: d1 d2 d3, b: d1 d2, c: d1, e: d3, f: d3
    const auto n = build(toy({{"d1", {"a", "b", "c"}}, {"d2", {"a", "b"}}, {"d3", {"a", "e", "f"}}}));
    EXPECT_EQ(n.occ.histogram, (std::map<int, int>{{1, 3}, {2, 1}, {3, 1}}));
    EXPECT_EQ(n.occ.symptoms_at(2), 1);
    EXPECT_EQ(n.occ.symptoms_at(7), 0);
    int covered = 0;
    for (const auto& [k, v] : n.occ.histogram)
        covered += v;
    EXPECT_EQ(covered, static_cast<int>(n.vocab.size()));
}

TEST(Uniqueness, HalfUnusual)
{
    const auto n = build(toy({{"d", {"a", "b"}}, {"e", {"b", "c"}}}));
    const auto r = uniqueness_report(n.profiles, n.occ);
    EXPECT_DOUBLE_EQ(r.entries[0].rate, 0.5);
    EXPECT_EQ(r.entries[0].common(), 1);
    EXPECT_DOUBLE_EQ(*r.mean_rate, 0.5);
}

TEST(Uniqueness, AllSharedHasNoMean)
{
    const auto n = build(toy({{"d", {"a", "b"}}, {"e", {"a", "b"}}}));
    const auto r = uniqueness_report(n.profiles, n.occ);
    for (const auto& e : r.entries)
        EXPECT_EQ(e.rate, 0.0);
    EXPECT_FALSE(r.mean_rate.has_value());
}

TEST(Similarity, HandValues)
{
    const std::vector<double> a{1, 1, 0}, b{1, 0, 0}, c{0, 0, 1};
    EXPECT_NEAR(cosine_similarity(a, b), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-15);
    EXPECT_EQ(cosine_similarity(b, c), 0.0);
    expect_error(ErrorCode::ZeroVector, [&] { cosine_similarity(a, std::vector<double>{0, 0, 0}); });
}

TEST(Similarity, MatrixProperties)
{
    const auto n = build(corpus::synth_generate({.num_diseases = 12, .records_per_disease = 5, .seed = 4}));
    const auto s = similarity_matrix(n.profiles);
    EXPECT_EQ(s.total_pairs, 66u);
    std::size_t disjoint = 0;
    for (std::size_t i = 0; i < 12; ++i) {
        EXPECT_EQ(s.similarity(i, i), 1.0);
        for (std::size_t j = 0; j < 12; ++j) {
            EXPECT_EQ(s.similarity(i, j), s.similarity(j, i));
            EXPECT_GE(s.similarity(i, j), 0.0);
            EXPECT_LE(s.similarity(i, j), 1.0 + 1e-15);
            if (i < j && numkit::dot(n.profiles[i].as_vector(), n.profiles[j].as_vector()) == 0.0)
                ++disjoint;
        }
    }
    EXPECT_EQ(s.disjoint_pairs, disjoint);
}

TEST(Similarity, PairsAboveThreshold)
{
    const auto n = build(toy({{"d", {"a", "b"}}, {"e", {"a", "b"}}, {"f", {"a", "c"}}}));
    const auto pairs = similar_pairs(similarity_matrix(n.profiles).similarity);
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_EQ(pairs[0].first, 0u);
    EXPECT_EQ(pairs[0].second, 1u);
}

TEST(FeatureSubset, Modes)
{
    const auto n = build(toy({{"d", {"a", "b"}}, {"e", {"b", "c"}}}));
    EXPECT_EQ(feature_subset(n.vocab, n.occ, FeatureMode::all), (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(feature_subset(n.vocab, n.occ, FeatureMode::common_only), std::vector<std::size_t>{1});

    const auto u = build(toy({{"d", {"a"}}, {"e", {"b"}}}));
    expect_error(ErrorCode::EmptySubset, [&] { feature_subset(u.vocab, u.occ, FeatureMode::common_only); });
}

TEST(FeatureSubset, UnusualAndCommonPartitionVocabulary)
{
    const auto n = build(corpus::synth_generate({.num_diseases = 10, .records_per_disease = 5, .seed = 2}));
    const auto common = feature_subset(n.vocab, n.occ, FeatureMode::common_only);
    EXPECT_EQ(common.size() + static_cast<std::size_t>(n.occ.symptoms_at(1)), n.vocab.size());
}

TEST(Snapshot, RoundTripAndHashCheck)
{
    test::TempDir dir;
    const auto n = build(toy({{"d", {"a", "b"}}, {"e", {"b", "c"}}}));
    const auto snap = make_snapshot(n.vocab, n.profiles);
    save_snapshot(snap, dir / "net.json");
    const auto back = load_snapshot(dir / "net.json");
    EXPECT_EQ(back.symptoms, snap.symptoms);
    EXPECT_EQ(back.diseases(), (std::vector<std::string>{"d", "e"}));
    EXPECT_EQ(back.profiles[1].incidence, n.profiles[1].incidence);

    auto text = read_text_file(dir / "net.json");
    text.replace(text.find("\"c\""), 3, "\"z\"");
    test::write_file(dir / "bad.json", text);
    expect_error(ErrorCode::ModelFormat, [&] { load_snapshot(dir / "bad.json"); });
}
