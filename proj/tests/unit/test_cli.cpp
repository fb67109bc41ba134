#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"

namespace complr {
namespace {

using testing::run_cli;

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::string healthcare() {
    return "--framework-dir " + quoted(testing::framework_dir()) + " --env " + quoted(testing::scenario("healthcare"));
}
std::string release_env() {
    return "--framework-dir " + quoted(testing::framework_dir()) + " --env " + quoted(testing::scenario("release"));
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

bool has_line(const std::string& text, std::initializer_list<const char*> words) {
    for (const auto& line : lines(text)) {
        std::istringstream in(line);
        std::vector<std::string> cells;
        for (std::string w; in >> w;) cells.push_back(w);
        bool all = true;
        for (const auto* w : words) all = all && std::find(cells.begin(), cells.end(), w) != cells.end();
        if (all) return true;
    }
    return false;
}

const std::string two_parents = R"(@prefix cx: <urn:complr:core#> .
@prefix : <urn:u#> .
:a a cx:DataContainer ; cx:contains :x .
:b a cx:DataContainer ; cx:contains :x .
:x a cx:DataContainer .
)";

TEST(cli_validate, valid_scenarios_exit_zero) {
    auto r = run_cli("validate " + healthcare());
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(run_cli("validate " + release_env()).status, 0);
}

TEST(cli_validate, two_parents_names_both_edges) {
    testing::TempDir dir;
    auto env = dir.write("env.ttl", two_parents);
    auto r = run_cli("validate --env " + quoted(env));
    EXPECT_EQ(r.status, 1);
    auto all = r.out + r.err;
    EXPECT_NE(all.find("urn:u#a contains urn:u#x"), std::string::npos) << all;
    EXPECT_NE(all.find("urn:u#b contains urn:u#x"), std::string::npos) << all;
}

TEST(cli_validate, cycle_and_syntax_error) {
    testing::TempDir dir;
    auto cyc = dir.write("cyc.ttl", "@prefix cx: <urn:complr:core#> .\n@prefix : <urn:u#> .\n"
                                    ":a a cx:DataContainer ; cx:contains :b .\n:b a cx:DataContainer ; cx:contains :a .\n");
    auto r = run_cli("validate --env " + quoted(cyc));
    EXPECT_EQ(r.status, 1);
    EXPECT_NE((r.out + r.err).find("containment-cycle"), std::string::npos);

    auto bad = dir.write("bad/bad.ttl", "@prefix : <urn:u#> .\n:a :b \n");
    auto s = run_cli("validate --env " + quoted(bad));
    EXPECT_NE(s.status, 0);
    EXPECT_NE((s.out + s.err).find("bad.ttl"), std::string::npos);
}

TEST(cli_infer, matches_golden_dump) {
    auto r = run_cli("infer --no-report " + healthcare());
    ASSERT_EQ(r.status, 0) << r.err;
    std::ifstream in(testing::source_dir() / "tests" / "golden" / "healthcare_infer.txt");
    std::stringstream golden;
    golden << in.rdbuf();
    EXPECT_EQ(r.out, golden.str());
    // the golden file itself holds the scenario's headline facts
    EXPECT_TRUE(has_line(golden.str(), {"hc:ProvidersInfo", "hipaa:ProtectedHealthInformation", "hc:ResearchScope"}));
    EXPECT_FALSE(has_line(golden.str(), {"hc:ProvidersInfo", "hipaa:ProtectedHealthInformation", "hc:HRScope"}));
    EXPECT_TRUE(has_line(golden.str(), {"hc:ProvidersInfo", "gdpr:PersonalData", "hc:HRScope", "gdpr"}));
}

TEST(cli_infer, output_is_byte_identical_across_runs_and_modes) {
    auto a = run_cli("infer --no-report " + healthcare());
    auto b = run_cli("infer --no-report " + healthcare());
    auto c = run_cli("infer --no-report --semi-naive " + healthcare());
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
}

TEST(cli_infer, zero_frameworks_with_explicit_attribution) {
    testing::TempDir dir;
    auto env = dir.write("env.ttl", R"(@prefix cx: <urn:complr:core#> .
@prefix : <urn:u#> .
:S a cx:GovernanceScope ; cx:includesContainer :a .
:a a cx:DataContainer .
[ a cx:ComplianceAssertion ; cx:assertedOn :a ; cx:assertsLabel :Mine ; cx:assertedInScope :S ; cx:byFramework :Local ] .
)");
    auto r = run_cli("infer --frameworks none --framework-dir " + quoted(testing::framework_dir()) + " --env " + quoted(env));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(has_line(r.out, {"urn:u#a", "urn:u#Mine", "urn:u#S", "ground"})) << r.out;
    EXPECT_NE(r.out.find("rounds: 1"), std::string::npos);
}

TEST(cli_infer, cache_is_reused_and_gives_the_same_dump) {
    testing::TempDir dir;
    auto cache = quoted(dir.path() / "store.bin");
    auto first = run_cli("infer --cache " + cache + " " + healthcare());
    auto second = run_cli("infer --cache " + cache + " " + healthcare());
    ASSERT_EQ(first.status, 0);
    ASSERT_EQ(second.status, 0);
    EXPECT_NE(first.out.find("cache_hit: false"), std::string::npos);
    EXPECT_NE(second.out.find("cache_hit: true"), std::string::npos);
    auto dump = [](const std::string& s) { return s.substr(0, s.find("# run report")); };
    EXPECT_EQ(dump(first.out), dump(second.out));
    // a different option invalidates the cache
    auto strict = run_cli("infer --strict-premises --cache " + cache + " " + healthcare());
    EXPECT_NE(strict.out.find("cache_hit: false"), std::string::npos);
}

TEST(cli_infer, json_lines_parse) {
    auto r = run_cli("infer --format json " + healthcare());
    ASSERT_EQ(r.status, 0);
    std::size_t assertions = 0, reports = 0;
    for (const auto& line : lines(r.out)) {
        auto j = nlohmann::json::parse(line);
        if (j.at("type") == "assertion") {
            ++assertions;
            EXPECT_TRUE(j.contains("container") && j.contains("label") && j.contains("scope") && j.contains("framework"));
        }
        reports += j.at("type") == "report";
    }
    EXPECT_EQ(assertions, 294u);
    EXPECT_EQ(reports, 1u);
}

TEST(cli_query, personal_data_on_providers_info_in_both_scopes) {
    auto r = run_cli("query --label gdpr:PersonalData --framework gdpr --container hc:ProvidersInfo " + healthcare());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(has_line(r.out, {"hc:ProvidersInfo", "hc:HRScope"}));
    EXPECT_TRUE(has_line(r.out, {"hc:ProvidersInfo", "hc:ResearchScope"}));
    EXPECT_EQ(lines(r.out).size(), 3u);
}

TEST(cli_query, impossible_filter_is_empty_not_an_error) {
    auto r = run_cli("query --label hipaa:ProtectedHealthInformation --scope hc:HRScope --container hc:ProvidersInfo " +
                     healthcare());
    EXPECT_EQ(r.status, 0);
    EXPECT_FALSE(has_line(r.out, {"hc:ProvidersInfo"}));
}

TEST(cli_query, no_filter_is_a_usage_error) {
    EXPECT_EQ(run_cli("query " + healthcare()).status, 2);
    EXPECT_EQ(run_cli("frobnicate").status, 2);
}

TEST(cli_explain, chain_ends_in_ground_facts) {
    auto r = run_cli("explain --container hc:ProvidersInfo --label hipaa:ProtectedHealthInformation --scope hc:ResearchScope "
                     "--framework hipaa " +
                     healthcare());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("joinable"), std::string::npos);
    EXPECT_NE(r.out.find("<- ground"), std::string::npos);
    auto missing = run_cli("explain --container hc:ProvidersInfo --label hipaa:ProtectedHealthInformation --scope hc:HRScope "
                           "--framework hipaa " +
                           healthcare());
    EXPECT_EQ(missing.status, 1);
}

TEST(cli_compare, providers_info_differs_between_hr_and_research) {
    auto r = run_cli("compare --container hc:ProvidersInfo " + healthcare());
    ASSERT_EQ(r.status, 0) << r.err;
    auto rows = lines(r.out);
    ASSERT_GE(rows.size(), 3u);
    // header names the frameworks; find the hipaa column
    std::istringstream head(rows[0]);
    std::vector<std::string> cols;
    for (std::string w; head >> w;) cols.push_back(w);
    auto hipaa = std::find(cols.begin(), cols.end(), "hipaa") - cols.begin();
    ASSERT_LT(static_cast<std::size_t>(hipaa), cols.size());
    std::map<std::string, std::string> mark;
    for (std::size_t i = 1; i < rows.size() && !rows[i].empty(); ++i) {
        std::istringstream in(rows[i]);
        std::vector<std::string> cells;
        for (std::string w; in >> w;) cells.push_back(w);
        if (cells.size() == cols.size()) mark[cells[1]] = cells[hipaa];
    }
    EXPECT_EQ(mark.at("hc:HRScope"), "✓");
    EXPECT_EQ(mark.at("hc:ResearchScope"), "✗");
}

TEST(cli_compare, release_extracts_follow_the_threshold_matrix) {
    auto r = run_cli("compare --container rel:ReleaseK12 --container rel:ReleaseK5 --container rel:ReleaseK2 " + release_env());
    ASSERT_EQ(r.status, 0) << r.err;
    auto rows = lines(r.out);
    std::istringstream head(rows.at(0));
    std::vector<std::string> cols;
    for (std::string w; head >> w;) cols.push_back(w);
    auto col = [&](const char* name) { return std::find(cols.begin(), cols.end(), name) - cols.begin(); };
    std::map<std::string, std::vector<std::string>> row;
    for (std::size_t i = 1; i < rows.size() && !rows[i].empty(); ++i) {
        std::istringstream in(rows[i]);
        std::vector<std::string> cells;
        for (std::string w; in >> w;) cells.push_back(w);
        row[cells.at(0)] = cells;
    }
    auto cell = [&](const char* c, const char* fw) { return row.at(c).at(col(fw)); };
    EXPECT_EQ(cell("rel:ReleaseK12", "hipaa-expert-determination") + cell("rel:ReleaseK12", "ema") +
                  cell("rel:ReleaseK12", "italian-dpa"),
              "✓✓✗");
    EXPECT_EQ(cell("rel:ReleaseK5", "hipaa-expert-determination") + cell("rel:ReleaseK5", "ema") +
                  cell("rel:ReleaseK5", "italian-dpa"),
              "✓✗✗");
    EXPECT_EQ(cell("rel:ReleaseK2", "hipaa-expert-determination") + cell("rel:ReleaseK2", "ema") +
                  cell("rel:ReleaseK2", "italian-dpa"),
              "✗✗✗");
    // the base column has nothing controlled anywhere: an all-✓ column
    for (const auto* c : {"rel:ReleaseK12", "rel:ReleaseK5", "rel:ReleaseK2"}) EXPECT_EQ(cell(c, "base"), "✓");
}

} // namespace
} // namespace complr
