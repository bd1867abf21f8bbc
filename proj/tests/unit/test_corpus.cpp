#include "helpers.hpp"

#include "symdx/corpus.hpp"
#include "symdx/symptomnet.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace symdx;
using namespace symdx::corpus;
using test::expect_error;

namespace {

Corpus toy(std::vector<std::pair<std::string, std::vector<std::string>>> rows)
{
    std::vector<Record> records;
    for (auto& [d, s] : rows)
        records.push_back({d, s});
    return make_corpus(std::move(records));
}

std::vector<int> balanced_labels(std::size_t classes, std::size_t per_class)
{
    std::vector<int> labels;
    for (std::size_t c = 0; c < classes; ++c)
        labels.insert(labels.end(), per_class, static_cast<int>(c));
    return labels;
}

} // namespace

TEST(Canonical, SymptomNames)
{
    EXPECT_EQ(canonical_symptom(" Itching"), "itching");
    EXPECT_EQ(canonical_symptom("  Skin Rash "), "skin_rash");
    EXPECT_EQ(canonical_symptom("dischromic  patches"), "dischromic__patches");
    EXPECT_EQ(canonical_disease("  Peptic ulcer   diseae "), "Peptic ulcer diseae");
}

TEST(LoadDataset, TwoRowToyFile)
{
    test::TempDir dir;
    test::write_file(dir / "d.csv", "Disease,Symptom_1\nflu,cough\nflu,cough\n");
    const auto c = load_dataset(dir / "d.csv");
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(c.diseases, std::vector<std::string>{"flu"});
}

TEST(LoadDataset, DropsEmptyCells)
{
    test::TempDir dir;
    test::write_file(dir / "d.csv", "Disease,Symptom_1,Symptom_2,Symptom_3,Symptom_4\nflu, cough, , fever,\n");
    const auto c = load_dataset(dir / "d.csv");
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.records[0].symptoms, (std::vector<std::string>{"cough", "fever"}));
    EXPECT_EQ(c.max_symptoms, 2u);
}

TEST(LoadDataset, AcceptsQuotedCellsAndCrlf)
{
    test::TempDir dir;
    test::write_file(dir / "d.csv", "Disease,Symptom_1,Symptom_2\r\n\"Paralysis (brain hemorrhage)\",\"vomiting\",headache\r\n");
    const auto c = load_dataset(dir / "d.csv");
    EXPECT_EQ(c.records[0].disease, "Paralysis (brain hemorrhage)");
    EXPECT_EQ(c.records[0].symptoms, (std::vector<std::string>{"vomiting", "headache"}));
}

TEST(LoadDataset, Errors)
{
    test::TempDir dir;
    expect_error(ErrorCode::MissingFile, [&] { load_dataset(dir / "absent.csv"); });

    test::write_file(dir / "empty.csv", "Disease,Symptom_1\nflu,cough\nflu, ,\n");
    try {
        load_dataset(dir / "empty.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyRecord);
        EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
    }

    test::write_file(dir / "bad.csv", "Disease,Symptom_1\n,cough\n");
    expect_error(ErrorCode::MalformedRow, [&] { load_dataset(dir / "bad.csv"); });
}

TEST(LoadDataset, SaveRoundTrip)
{
    test::TempDir dir;
    const auto c = synth_generate({.num_diseases = 5, .records_per_disease = 4, .seed = 3});
    save_dataset(c, dir / "s.csv");
    const auto back = load_dataset(dir / "s.csv");
    ASSERT_EQ(back.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(back.records[i].disease, c.records[i].disease);
        EXPECT_EQ(back.records[i].symptoms, c.records[i].symptoms);
    }
}

TEST(Vocabulary, CanonicalizationMergesVariants)
{
    const auto v = build_vocabulary(toy({{"a", {" Itching"}}, {"b", {"itching"}}}));
    EXPECT_EQ(v.entries, std::vector<std::string>{"itching"});
}

TEST(Vocabulary, LexicographicIndices)
{
    const auto v = build_vocabulary(toy({{"d", {"cough", "ache"}}, {"e", {"blur"}}}));
    EXPECT_EQ(v.entries, (std::vector<std::string>{"ache", "blur", "cough"}));
    EXPECT_EQ(*v.find("blur"), 1u);
    EXPECT_FALSE(v.find("nope"));
}

TEST(Vocabulary, StableUnderKnownSymptomRecords)
{
    auto base = toy({{"d", {"a", "c"}}, {"e", {"b"}}});
    const auto v1 = build_vocabulary(base);
    base.records.push_back({"f", {"c", "a"}});
    const auto v2 = build_vocabulary(make_corpus(base.records));
    EXPECT_EQ(v1.entries, v2.entries);
    EXPECT_EQ(v1.hash(), v2.hash());
}

TEST(Vocabulary, SeverityFile)
{
    test::TempDir dir;
    const auto c = toy({{"d", {"a", "c"}}, {"e", {"b"}}});
    test::write_file(dir / "sev.csv", "Symptom,weight\na,3\nzzz,2\n");
    const auto v = build_vocabulary(c, dir / "sev.csv");
    EXPECT_EQ(v.severity, (std::vector<int>{3, 1, 1}));
    ASSERT_EQ(v.warnings.size(), 1u);
    EXPECT_NE(v.warnings[0].find("zzz"), std::string::npos);

    test::write_file(dir / "dup.csv", "Symptom,weight\na,3\na,2\n");
    expect_error(ErrorCode::DuplicateSeverityEntry, [&] { build_vocabulary(c, dir / "dup.csv"); });
}

TEST(Encode, BinaryAndSeverity)
{
    const auto c = toy({{"d", {"a", "c"}}, {"e", {"b"}}});
    auto v = build_vocabulary(c);
    auto m = encode(c, v);
    EXPECT_EQ(std::vector<double>(m.features.row(0).begin(), m.features.row(0).end()),
              (std::vector<double>{1, 0, 1}));
    v.severity[0] = 3;
    m = encode(c, v, Encoding::severity);
    EXPECT_EQ(std::vector<double>(m.features.row(0).begin(), m.features.row(0).end()),
              (std::vector<double>{3, 0, 1}));
    EXPECT_EQ(m.labels, (std::vector<int>{0, 1}));
}

TEST(Encode, RowSumsEqualSymptomCounts)
{
    const auto c = synth_generate({.num_diseases = 6, .records_per_disease = 10, .seed = 9});
    const auto m = encode(c, build_vocabulary(c));
    for (std::size_t i = 0; i < c.size(); ++i) {
        double sum = 0.0;
        for (double x : m.features.row(i))
            sum += x;
        EXPECT_EQ(sum, static_cast<double>(c.records[i].symptoms.size()));
    }
}

TEST(Encode, QueryVector)
{
    const auto v = make_vocabulary({"a", "b", "c"});
    EXPECT_EQ(encode_symptoms({"C", " a"}, v), (std::vector<double>{1, 0, 1}));
    expect_error(ErrorCode::OutOfVocabularySymptom, [&] { encode_symptoms({"xyzzy"}, v); });
}

TEST(Split, StratifiedCounts)
{
    const auto labels = balanced_labels(3, 120);
    const auto s = stratified_split_indices(labels, 0.2, 42);
    std::map<int, int> train, test;
    for (auto i : s.train)
        ++train[labels[i]];
    for (auto i : s.test)
        ++test[labels[i]];
    for (int c = 0; c < 3; ++c) {
        EXPECT_EQ(train[c], 96);
        EXPECT_EQ(test[c], 24);
    }
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    EXPECT_EQ(all.size(), labels.size());
}

TEST(Split, DeterministicAndSeedSensitive)
{
    const auto labels = balanced_labels(4, 30);
    const auto a = stratified_split_indices(labels, 0.2, 7);
    const auto b = stratified_split_indices(labels, 0.2, 7);
    const auto c = stratified_split_indices(labels, 0.2, 8);
    EXPECT_EQ(a.test, b.test);
    EXPECT_NE(a.test, c.test);
}

TEST(Split, PreservesClassHistogramForUnevenClasses)
{
    std::vector<int> labels;
    for (int c = 0; c < 5; ++c)
        labels.insert(labels.end(), 3 + 7 * c, c);
    const auto s = stratified_split_indices(labels, 0.3, 1);
    std::map<int, int> total;
    for (auto i : s.train)
        ++total[labels[i]];
    for (auto i : s.test)
        ++total[labels[i]];
    for (int c = 0; c < 5; ++c)
        EXPECT_EQ(total[c], 3 + 7 * c);
}

TEST(Split, Errors)
{
    const auto labels = balanced_labels(2, 10);
    expect_error(ErrorCode::FractionOutOfRange, [&] { stratified_split_indices(labels, 1.0, 1); });
    expect_error(ErrorCode::FractionOutOfRange, [&] { stratified_split_indices(labels, 0.0, 1); });
    const std::vector<int> tiny{0, 1, 1};
    expect_error(ErrorCode::ClassTooSmall, [&] { stratified_split_indices(tiny, 0.5, 1); });
}

TEST(KFold, OneRowPerClassPerFold)
{
    const auto labels = balanced_labels(2, 5);
    const auto folds = kfold(labels, 5, 3);
    ASSERT_EQ(folds.size(), 5u);
    std::set<std::size_t> seen;
    for (const auto& f : folds) {
        ASSERT_EQ(f.validation.size(), 2u);
        EXPECT_NE(labels[f.validation[0]], labels[f.validation[1]]);
        EXPECT_EQ(f.train.size(), 8u);
        seen.insert(f.validation.begin(), f.validation.end());
    }
    EXPECT_EQ(seen.size(), labels.size());
}

TEST(KFold, Errors)
{
    const auto labels = balanced_labels(2, 4);
    expect_error(ErrorCode::KOutOfRange, [&] { kfold(labels, 1, 1); });
    expect_error(ErrorCode::KOutOfRange, [&] { kfold(labels, 5, 1); });
}

TEST(Synth, DefaultSpecMatchesTargetUniqueness)
{
    const auto c = synth_generate({});
    EXPECT_EQ(c.size(), 4920u);
    EXPECT_EQ(c.diseases.size(), 41u);
    const auto v = build_vocabulary(c);
    const auto profiles = symptomnet::disease_profiles(c, v);
    const auto occ = symptomnet::occurrence_histogram(profiles);

    // Independent count: for each disease, share of its symptoms seen in no other disease.
    std::map<std::string, std::set<std::string>> by_disease;
    for (const auto& r : c.records)
        by_disease[r.disease].insert(r.symptoms.begin(), r.symptoms.end());
    std::map<std::string, int> owners;
    for (const auto& [d, s] : by_disease)
        for (const auto& name : s)
            ++owners[name];
    double sum = 0.0;
    int n = 0;
    for (const auto& [d, s] : by_disease) {
        int unusual = 0;
        for (const auto& name : s)
            unusual += owners[name] == 1;
        EXPECT_LE(s.size(), 18u);
        if (unusual > 0) {
            sum += static_cast<double>(unusual) / static_cast<double>(s.size());
            ++n;
        }
    }
    EXPECT_NEAR(sum / n, 0.39, 0.05);
    EXPECT_NEAR(*symptomnet::uniqueness_report(profiles, occ).mean_rate, sum / n, 1e-12);
}

TEST(Synth, AllUnusual)
{
    const auto c = synth_generate({.num_diseases = 2, .unusual_fraction = 1.0});
    const auto v = build_vocabulary(c);
    const auto occ = symptomnet::occurrence_histogram(symptomnet::disease_profiles(c, v));
    for (int count : occ.per_symptom)
        EXPECT_EQ(count, 1);
}

TEST(Synth, Deterministic)
{
    const auto a = synth_generate({.num_diseases = 8, .seed = 5});
    const auto b = synth_generate({.num_diseases = 8, .seed = 5});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_EQ(a.records[i].symptoms, b.records[i].symptoms);
}

TEST(Synth, InfeasibleSpec)
{
    expect_error(ErrorCode::InfeasibleSpec, [] { synth_generate({.num_diseases = 1, .unusual_fraction = 0.0}); });
}
