#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "complr/compare.hpp"
#include "complr/errors.hpp"
#include "complr/stats_kanon.hpp"
#include "complr/vocab.hpp"
#include "fixtures.hpp"

namespace complr {
namespace {

RecordTable table(std::vector<std::string> cols, std::vector<std::vector<std::string>> rows, std::vector<std::string> qi) {
    return RecordTable{ContainerId("urn:x#t"), std::move(cols), std::move(rows), std::move(qi)};
}

TEST(parse_csv, quoting_and_escapes) {
    auto rows = parse_csv("a,b,c\n1,\"x, y\",\"he said \"\"hi\"\"\"\n2,,\"multi\nline\"\r\n");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "x, y", "he said \"hi\""}));
    EXPECT_EQ(rows[2], (std::vector<std::string>{"2", "", "multi\nline"}));
}

TEST(parse_csv, rejects_missing_header_and_unterminated_quote) {
    EXPECT_THROW(parse_csv(""), InputError);
    EXPECT_THROW(parse_csv("a,b\n1,\"open\n"), SyntaxError);
}

TEST(record_table, validate_catches_ragged_rows_and_unknown_columns) {
    EXPECT_THROW(table({"a", "b"}, {{"1"}}, {"a"}).validate(), InputError);
    EXPECT_THROW(table({"a", "b"}, {{"1", "2"}}, {"zip"}).validate(), InputError);
    EXPECT_NO_THROW(table({"a", "b"}, {{"1", "2"}}, {"b"}).validate());
}

TEST(compute_k, smallest_group_decides) {
    EXPECT_EQ(compute_k(table({"age", "gender"}, {{"30", "M"}, {"30", "M"}, {"30", "F"}}, {"age", "gender"})), 1u);
    EXPECT_EQ(compute_k(table({"age", "gender"}, {{"30", "M"}, {"30", "M"}, {"30", "F"}}, {"age"})), 3u);
}

TEST(compute_k, no_quasi_identifiers_is_one_group) {
    EXPECT_EQ(compute_k(table({"a"}, {{"1"}, {"2"}, {"3"}, {"4"}}, {})), 4u);
}

TEST(compute_k, identical_rows_form_one_group) {
    EXPECT_EQ(compute_k(table({"a", "b"}, std::vector<std::vector<std::string>>(7, {"x", "y"}), {"a", "b"})), 7u);
}

TEST(compute_k, values_are_trimmed_not_normalised) {
    EXPECT_EQ(compute_k(table({"a"}, {{" x"}, {"x "}, {"x"}}, {"a"})), 3u);
    EXPECT_EQ(compute_k(table({"a"}, {{"X"}, {"x"}}, {"a"})), 1u);
}

TEST(compute_k, empty_table_is_an_error) {
    EXPECT_THROW(compute_k(table({"a"}, {}, {"a"})), EvaluationError);
}

TEST(compute_k, invariant_under_row_and_column_permutation) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        int ncols = std::uniform_int_distribution<int>(1, 5)(rng);
        int nrows = std::uniform_int_distribution<int>(1, 60)(rng);
        std::vector<std::string> cols;
        for (int i = 0; i < ncols; ++i) cols.push_back("c" + std::to_string(i));
        std::vector<std::vector<std::string>> rows;
        for (int r = 0; r < nrows; ++r) {
            std::vector<std::string> row;
            for (int i = 0; i < ncols; ++i) row.push_back(std::to_string(std::uniform_int_distribution<int>(0, 2)(rng)));
            rows.push_back(row);
        }
        std::vector<std::string> qi;
        for (const auto& col : cols)
            if (rng() % 2) qi.push_back(col);
        auto k = compute_k(table(cols, rows, qi));

        std::shuffle(rows.begin(), rows.end(), rng);
        std::vector<std::size_t> perm(ncols);
        for (int i = 0; i < ncols; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::string> pcols;
        for (auto i : perm) pcols.push_back(cols[i]);
        for (auto& row : rows) {
            std::vector<std::string> p;
            for (auto i : perm) p.push_back(row[i]);
            row = p;
        }
        std::shuffle(qi.begin(), qi.end(), rng);
        ASSERT_EQ(compute_k(table(pcols, rows, qi)), k);
    }
}

TEST(emit_analysis, ground_assertion_with_cohort_size) {
    auto t = table({"age"}, {{"1"}, {"1"}, {"2"}, {"2"}, {"2"}}, {"age"});
    ScopeId g("urn:x#g");
    FrameworkId f("urn:x#F");
    auto a = emit_analysis(t, g, f);
    EXPECT_EQ(a.container, t.container);
    EXPECT_EQ(a.label, LabelId(vocab::kanonymity_label()));
    EXPECT_EQ(a.scope, g);
    EXPECT_EQ(a.framework, f);
    EXPECT_TRUE(a.ground);
    EXPECT_EQ(a.parameters.at("minimumCohortSize"), Value(2));
}

TEST(read_record_table, reads_the_release_extracts) {
    auto t = read_record_table(testing::scenario("release") / "k5.csv", ContainerId("urn:x#k5"), {"age", "gender", "zip3"});
    EXPECT_EQ(t.columns.size(), 5u);
    EXPECT_EQ(t.rows.size(), 30u);
    EXPECT_EQ(compute_k(t), 5u);
    EXPECT_EQ(compute_k(read_record_table(testing::scenario("release") / "k12.csv", ContainerId("urn:x#a"),
                                          {"age", "gender", "zip3"})),
              12u);
    EXPECT_EQ(compute_k(read_record_table(testing::scenario("release") / "k2.csv", ContainerId("urn:x#b"),
                                          {"age", "gender", "zip3"})),
              2u);
    EXPECT_THROW(read_record_table(testing::scenario("release") / "missing.csv", ContainerId("urn:x#c"), {}), InputError);
}

// the emitted analysis feeds the threshold rules of both de-identification regimes
struct ReleaseScenario : ::testing::Test {
    static void SetUpTestSuite() { run = new testing::Run(testing::run_inputs({testing::scenario("release")})); }
    static void TearDownTestSuite() { delete run; }
    static testing::Run* run;

    static ContainerId extract(int k) { return ContainerId("urn:complr:scenario:release#ReleaseK" + std::to_string(k)); }
    static bool risk(int k, const std::string& ns, const std::string& fw) {
        return run->store.contains({extract(k), testing::label(ns, "HighReidentificationRisk"),
                                    ScopeId("urn:complr:scenario:release#ReleaseScope"), testing::framework(fw)});
    }
};
testing::Run* ReleaseScenario::run = nullptr;

TEST_F(ReleaseScenario, cohort_sizes_are_ground_facts_under_base) {
    for (int k : {12, 5, 2}) {
        const auto* a = run->store.find({extract(k), LabelId(vocab::kanonymity_label()),
                                         ScopeId("urn:complr:scenario:release#ReleaseScope"), testing::framework("base")});
        ASSERT_NE(a, nullptr) << k;
        EXPECT_TRUE(a->ground);
        EXPECT_EQ(a->parameters.at("minimumCohortSize"), Value(k));
    }
}

TEST_F(ReleaseScenario, k5_risky_for_ema_not_for_expert_determination) {
    EXPECT_FALSE(risk(5, "hipaa-ed", "hipaa-expert-determination"));
    EXPECT_TRUE(risk(5, "ema", "ema"));
}

TEST_F(ReleaseScenario, k12_clears_ema) {
    EXPECT_FALSE(risk(12, "ema", "ema"));
    EXPECT_FALSE(risk(12, "hipaa-ed", "hipaa-expert-determination"));
}

TEST_F(ReleaseScenario, k2_risky_under_expert_determination) {
    EXPECT_TRUE(risk(2, "hipaa-ed", "hipaa-expert-determination"));
    EXPECT_TRUE(risk(2, "ema", "ema"));
}

} // namespace
} // namespace complr
