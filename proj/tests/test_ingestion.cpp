#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "support/payloads.hpp"
#include "textchar/error.hpp"
#include "textchar/ingestion.hpp"

using namespace textchar;
namespace fs = std::filesystem;
namespace tt = textchar::testing;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("textchar_ingest_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path file(const std::string& name, const std::string& content) const {
        const fs::path p = dir_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }
    fs::path path(const std::string& name) const { return dir_ / name; }

    fs::path dir_;
};

template <class E>
std::string error_text(auto&& fn) {
    try {
        fn();
    } catch (const E& e) {
        return e.what();
    }
    ADD_FAILURE() << "expected exception not thrown";
    return {};
}

using Ingestion = TempDir;

}  // namespace

TEST_F(Ingestion, JsonlSingleRecord) {
    const auto data = read_vectors(file("a.jsonl", R"({"id":"a","label":"pos","vector":[1.0,2.0]})" "\n"),
                                   VectorFormat::jsonl);
    ASSERT_EQ(data.records.size(), 1u);
    EXPECT_EQ(data.dim, 2u);
    EXPECT_EQ(data.records[0].id, "a");
    EXPECT_EQ(data.records[0].label, "pos");
    EXPECT_EQ(data.records[0].layer, "default");
    EXPECT_EQ(data.records[0].vector, (std::vector<double>{1.0, 2.0}));
}

TEST_F(Ingestion, CsvAutoIdAndDefaultLayer) {
    const auto data = read_vectors(file("a.csv", "label,d0,d1\npos,1.0,2.0\n"), VectorFormat::csv);
    ASSERT_EQ(data.records.size(), 1u);
    EXPECT_EQ(data.dim, 2u);
    EXPECT_EQ(data.records[0].id, "row-1");
    EXPECT_EQ(data.records[0].layer, "default");
    EXPECT_EQ(data.records[0].vector, (std::vector<double>{1.0, 2.0}));
}

TEST_F(Ingestion, CsvQuotedFieldsAndLayerColumn) {
    const auto data = read_vectors(file("q.csv", "id,layer,label,x\n\"a,1\",L6,\"say \"\"hi\"\"\",3\n"),
                                   VectorFormat::csv);
    ASSERT_EQ(data.records.size(), 1u);
    EXPECT_EQ(data.records[0].id, "a,1");
    EXPECT_EQ(data.records[0].layer, "L6");
    EXPECT_EQ(data.records[0].label, "say \"hi\"");
}

TEST_F(Ingestion, MalformedJsonNamesLine) {
    const auto p = file("bad.jsonl",
                        "{\"label\":\"a\",\"vector\":[1]}\n{\"label\":\"a\",\"vector\":[2]}\n{\"label\":\"a\",\"vector\":[3\n");
    EXPECT_NE(error_text<ParseError>([&] { read_vectors(p, VectorFormat::jsonl); }).find("line 3"),
              std::string::npos);
}

TEST_F(Ingestion, MissingKeysAndBadNumbers) {
    EXPECT_THROW(read_vectors(file("a.jsonl", "{\"vector\":[1]}\n"), VectorFormat::jsonl), ParseError);
    EXPECT_THROW(read_vectors(file("b.jsonl", "{\"label\":\"x\"}\n"), VectorFormat::jsonl), ParseError);
    EXPECT_THROW(read_vectors(file("c.jsonl", "{\"label\":\"x\",\"vector\":[\"1\"]}\n"), VectorFormat::jsonl),
                 ParseError);
    const auto msg = error_text<ParseError>(
        [&] { read_vectors(file("d.csv", "label,d0\npos,1\npos,1.5x\n"), VectorFormat::csv); });
    EXPECT_NE(msg.find("line 3"), std::string::npos);
    EXPECT_THROW(read_vectors(file("e.csv", "d0,d1\n1,2\n"), VectorFormat::csv), ParseError);
}

TEST_F(Ingestion, DimensionMismatchNamesRecord) {
    const auto p = file("dim.jsonl",
                        "{\"id\":\"ok\",\"label\":\"a\",\"vector\":[1,2]}\n{\"id\":\"short\",\"label\":\"a\",\"vector\":[1]}\n");
    EXPECT_NE(error_text<DimensionMismatch>([&] { read_vectors(p, VectorFormat::jsonl); }).find("short"),
              std::string::npos);
}

TEST_F(Ingestion, NonFiniteNamesRecordAndAxis) {
    const auto p = file("inf.csv", "id,label,d0,d1\nfine,a,1,2\nbig,a,3,inf\n");
    const auto msg = error_text<NonFiniteValue>([&] { read_vectors(p, VectorFormat::csv); });
    EXPECT_NE(msg.find("big"), std::string::npos);
    EXPECT_NE(msg.find("1"), std::string::npos);
}

TEST_F(Ingestion, DuplicateIdWithinGroup) {
    const auto p = file("dup.jsonl",
                        "{\"id\":\"x\",\"label\":\"a\",\"vector\":[1]}\n{\"id\":\"x\",\"label\":\"a\",\"vector\":[2]}\n");
    EXPECT_THROW(read_vectors(p, VectorFormat::jsonl), DuplicateId);
    const auto q = file("ok.jsonl",
                        "{\"id\":\"x\",\"label\":\"a\",\"vector\":[1]}\n{\"id\":\"x\",\"label\":\"b\",\"vector\":[2]}\n");
    EXPECT_EQ(read_vectors(q, VectorFormat::jsonl).records.size(), 2u);
}

TEST_F(Ingestion, MissingFileIsIoError) {
    EXPECT_THROW(read_vectors(path("nope.jsonl"), VectorFormat::jsonl), IoError);
}

TEST_F(Ingestion, EmptyRecordListRoundTrips) {
    LabeledEmbeddings empty;
    for (auto fmt : {VectorFormat::csv, VectorFormat::jsonl, VectorFormat::binary}) {
        const auto p = path("empty." + std::string(to_string(fmt)));
        write_vectors(empty, p, fmt);
        EXPECT_TRUE(read_vectors(p, fmt).records.empty()) << to_string(fmt);
    }
    EXPECT_EQ(fs::file_size(path("empty.binary")), 16u);
}

TEST_F(Ingestion, BinaryHeaderLayout) {
    LabeledEmbeddings data;
    data.dim = 2;
    for (int i = 0; i < 3; ++i) data.records.push_back({"r" + std::to_string(i), "a", "default", {1.0 * i, -2.0}});
    const auto p = path("three.bin");
    write_vectors(data, p, VectorFormat::binary);
    EXPECT_EQ(fs::file_size(p), 16u + 48u);
    std::ifstream in(p, std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CMET");
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(bytes[5], 8);
    EXPECT_EQ(bytes[6], 0);
    EXPECT_EQ(bytes[7], 0);
    EXPECT_EQ(bytes[8], 3);
    EXPECT_EQ(bytes[12], 2);
    EXPECT_TRUE(fs::exists(binary_sidecar_path(p)));

    write_vectors(data, path("f32.bin"), VectorFormat::binary, 4);
    EXPECT_EQ(fs::file_size(path("f32.bin")), 16u + 24u);
    EXPECT_EQ(read_vectors(path("f32.bin"), VectorFormat::binary).records, data.records);
}

TEST_F(Ingestion, BinaryCorruptionNamesOffset) {
    LabeledEmbeddings data;
    data.dim = 1;
    data.records.push_back({"r", "a", "default", {1.0}});
    const auto p = path("c.bin");
    write_vectors(data, p, VectorFormat::binary);
    {
        std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(5);
        f.put(3);
    }
    EXPECT_NE(error_text<ParseError>([&] { read_vectors(p, VectorFormat::binary); }).find("offset 5"),
              std::string::npos);
    fs::resize_file(p, 20);
    EXPECT_THROW(read_vectors(p, VectorFormat::binary), ParseError);
}

TEST_F(Ingestion, RandomPayloadRoundTrips) {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const auto data = tt::random_payload(gen, 100, 1 + gen() % 6);
        for (auto fmt : {VectorFormat::csv, VectorFormat::jsonl, VectorFormat::binary}) {
            const auto p = path("rt." + std::string(to_string(fmt)));
            write_vectors(data, p, fmt);
            const auto back = read_vectors(p, fmt);
            ASSERT_EQ(back.dim, data.dim);
            ASSERT_EQ(back.records.size(), data.records.size());
            for (std::size_t i = 0; i < data.records.size(); ++i) {
                const auto& a = data.records[i];
                const auto& b = back.records[i];
                ASSERT_EQ(a.id, b.id);
                ASSERT_EQ(a.label, b.label);
                ASSERT_EQ(a.layer, b.layer);
                for (std::size_t j = 0; j < a.vector.size(); ++j) {
                    if (fmt == VectorFormat::binary) {
                        ASSERT_TRUE(tt::same_bits(a.vector[j], b.vector[j]));
                    } else {
                        ASSERT_TRUE(tt::close_relative(a.vector[j], b.vector[j]))
                            << to_string(fmt) << " " << a.vector[j] << " vs " << b.vector[j];
                    }
                }
            }
        }
    }
}

TEST(DecimalText, FormatParseRoundTripIsExact) {
    std::mt19937_64 gen(5);
    for (int i = 0; i < 20000; ++i) {
        const double x = tt::awkward_double(gen);
        const auto back = parse_decimal(format_decimal(x));
        ASSERT_TRUE(back.has_value()) << format_decimal(x);
        ASSERT_TRUE(tt::same_bits(x, *back)) << format_decimal(x);
    }
}

TEST(DecimalText, StrictParse) {
    EXPECT_EQ(parse_decimal("1.5"), 1.5);
    EXPECT_EQ(parse_decimal("-2e3"), -2000.0);
    EXPECT_FALSE(parse_decimal("").has_value());
    EXPECT_FALSE(parse_decimal("1.5x").has_value());
    EXPECT_FALSE(parse_decimal("abc").has_value());
}

TEST(MeanPool, Examples) {
    TokenSequence one{"s", "a", "default", {{3.0, -1.0}}};
    EXPECT_EQ(mean_pool(one), (std::vector<double>{3.0, -1.0}));
    TokenSequence two{"s", "a", "default", {{0.0, 0.0}, {2.0, 4.0}}};
    EXPECT_EQ(mean_pool(two), (std::vector<double>{1.0, 2.0}));
    TokenSequence none{"empty-one", "a", "default", {}};
    EXPECT_NE(error_text<EmptySequence>([&] { mean_pool(none); }).find("empty-one"), std::string::npos);
    TokenSequence ragged{"r", "a", "default", {{1.0}, {1.0, 2.0}}};
    EXPECT_THROW(mean_pool(ragged), DimensionMismatch);
}

TEST(MeanPool, SevenTokensMatchLongDoubleSum) {
    std::mt19937_64 gen(77);
    std::normal_distribution<double> nd(0.0, 10.0);
    TokenSequence seq{"s", "a", "default", {}};
    for (int t = 0; t < 7; ++t) {
        std::vector<double> tok(16);
        for (double& v : tok) v = nd(gen);
        seq.tokens.push_back(tok);
    }
    const auto pooled = mean_pool(seq);
    for (std::size_t j = 0; j < 16; ++j) {
        long double s = 0.0L;
        for (const auto& tok : seq.tokens) s += tok[j];
        EXPECT_NEAR(pooled[j], static_cast<double>(s / 7.0L), 1e-12);
    }
}

TEST(MeanPool, PermutationInvariant) {
    std::mt19937_64 gen(78);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        TokenSequence seq{"s", "a", "default", {}};
        const std::size_t l = 2 + gen() % 200;
        for (std::size_t t = 0; t < l; ++t) {
            std::vector<double> tok(8);
            for (double& v : tok) v = nd(gen) * std::pow(10.0, static_cast<double>(gen() % 12));
            seq.tokens.push_back(tok);
        }
        const auto a = mean_pool(seq);
        std::shuffle(seq.tokens.begin(), seq.tokens.end(), gen);
        const auto b = mean_pool(seq);
        for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-12 * std::max(1.0, std::abs(a[j])));
    }
}

TEST_F(Ingestion, TokenSequencesFile) {
    const auto p = file("tok.jsonl",
                        "{\"id\":\"s1\",\"label\":\"a\",\"layer\":\"L1\",\"tokens\":[[0,0],[2,4]]}\n"
                        "{\"id\":\"s2\",\"label\":\"b\",\"tokens\":[[1,1]]}\n");
    const auto seqs = read_token_sequences(p);
    ASSERT_EQ(seqs.size(), 2u);
    EXPECT_EQ(seqs[0].layer, "L1");
    EXPECT_EQ(seqs[1].layer, "default");
    EXPECT_EQ(seqs[0].tokens.size(), 2u);
    EXPECT_THROW(read_token_sequences(file("bad.jsonl", "{\"label\":\"a\",\"vector\":[1]}\n")), ParseError);
}

TEST(GroupByLabel, PartitionArithmetic) {
    LabeledEmbeddings data;
    data.dim = 2;
    int n = 0;
    for (const char* label : {"pos", "neg"})
        for (const char* layer : {"L1", "L6", "L12"})
            for (int i = 0; i < 10; ++i)
                data.records.push_back({std::to_string(n++), label, layer, {1.0 * n, 0.5}});
    const auto groups = group_by_label(data);
    ASSERT_EQ(groups.size(), 6u);
    for (const auto& [key, cluster] : groups) EXPECT_EQ(cluster.size(), 10u);
    // record order preserved within a group
    const auto& first = groups.at(GroupKey{"neg", "L1"});
    EXPECT_LT(first.row(0)[0], first.row(9)[0]);
}

TEST(GroupByLabel, SingleGroupAndRandomPartition) {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto data = tt::random_payload(gen, 1 + gen() % 60, 3);
        const auto groups = group_by_label(data);
        std::size_t total = 0;
        for (const auto& [key, cluster] : groups) total += cluster.size();
        ASSERT_EQ(total, data.records.size());
    }
    LabeledEmbeddings one;
    one.dim = 1;
    for (int i = 0; i < 5; ++i) one.records.push_back({std::to_string(i), "x", "default", {1.0 * i}});
    const auto g = group_by_label(one);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g.begin()->second.size(), 5u);
}
