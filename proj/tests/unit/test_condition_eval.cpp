#include <gtest/gtest.h>

#include <random>

#include "complr/condition_eval.hpp"
#include "complr/errors.hpp"
#include "complr/inference_engine.hpp"
#include "complr/vocab.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

namespace complr {
namespace {

ContainerId c(const std::string& s) { return ContainerId("urn:x#" + s); }
LabelId l(const std::string& s) { return LabelId("urn:x#" + s); }
const ScopeId g("urn:x#g");
const FrameworkId f("urn:x#F");

Condition has(const std::string& label, RelationKind rel = RelationKind::id, const std::string& id = "") {
    return Condition{ConditionId(id.empty() ? "urn:x#c-" + label + "-" + std::string(to_string(rel)) : id),
                     HasLabelCondition{rel, l(label)}};
}

Condition composite(LogicalOperator op, std::vector<Condition> children, const std::string& id) {
    return Condition{ConditionId("urn:x#" + id), CompositeCondition{op, std::move(children)}};
}

ComplianceAssertion at(const std::string& d, const std::string& label, Parameters p = {}) {
    return {c(d), l(label), g, f, true, std::move(p)};
}

// table t with column ssn; db above both
Store small_store() {
    Environment env;
    env.add_containment(c("db"), c("t"));
    env.add_containment(c("t"), c("ssn"));
    env.add_container(c("other"));
    for (const auto& d : {"db", "t", "ssn", "other"}) env.add_visible(g, c(d));
    return Store(env);
}

TEST(evaluate, contains_label_sees_a_labelled_column) {
    Store s = small_store();
    s.insert_assertion(at("ssn", "IdentifierData"));
    s.materialize_containment();
    Condition cond{ConditionId("urn:x#contains"), ContainsLabelCondition{l("IdentifierData")}};
    EXPECT_TRUE(evaluate_detail(cond, c("t"), g, s).result);
    EXPECT_TRUE(evaluate_detail(cond, c("db"), g, s).result);
    EXPECT_FALSE(evaluate_detail(cond, c("ssn"), g, s).result);
    EXPECT_FALSE(evaluate_detail(cond, c("other"), g, s).result);
}

TEST(evaluate, has_label_follows_the_relation_and_ignores_framework) {
    Store s = small_store();
    s.insert_assertion({c("t"), l("A"), g, FrameworkId("urn:x#Other"), true, {}});
    EXPECT_TRUE(evaluate_detail(has("A"), c("t"), g, s).result);
    // Child(d', d): d' is a child of d, so the table's label is seen from db
    EXPECT_TRUE(evaluate_detail(has("A", RelationKind::child), c("db"), g, s).result);
    EXPECT_FALSE(evaluate_detail(has("A", RelationKind::child), c("ssn"), g, s).result);
    EXPECT_TRUE(evaluate_detail(has("A", RelationKind::parent), c("ssn"), g, s).result);
    EXPECT_FALSE(evaluate_detail(has("A", RelationKind::sib), c("t"), g, s).result);
}

TEST(evaluate, comparison_five_below_default_twelve) {
    Store s = small_store();
    s.insert_assertion(at("t", "KAnon", {{"minimumCohortSize", Value(5)}}));
    ComparisonCondition cmp{{l("KAnon"), "minimumCohortSize", std::nullopt},
                            {std::nullopt, std::nullopt, Value(12)},
                            ComparisonOperator::less_than};
    Condition cond{ConditionId("urn:x#cmp"), cmp};
    EXPECT_TRUE(evaluate_detail(cond, c("t"), g, s).result);
    cmp.right.literal_or_default = Value(3);
    EXPECT_FALSE(evaluate_detail(Condition{ConditionId("urn:x#cmp3"), cmp}, c("t"), g, s).result);
}

TEST(evaluate, and_counts_satisfied_children) {
    Store s = small_store();
    s.insert_assertion(at("t", "A"));
    s.insert_assertion(at("t", "B"));
    auto both = composite(LogicalOperator::all_of, {has("A"), has("B")}, "and");
    auto r = evaluate_detail(both, c("t"), g, s);
    EXPECT_TRUE(r.result);
    EXPECT_EQ(r.satisfied, 2u);
    EXPECT_EQ(r.total, 2u);
    auto partial = composite(LogicalOperator::all_of, {has("A"), has("Z")}, "and2");
    auto r2 = evaluate_detail(partial, c("t"), g, s);
    EXPECT_FALSE(r2.result);
    EXPECT_EQ(r2.satisfied, 1u);
    EXPECT_EQ(r2.total, 2u);
    // one record for the composite and one per child
    EXPECT_EQ(r2.records.size(), 3u);
}

TEST(evaluate, records_are_stored_and_monotone) {
    Store s = small_store();
    auto cond = has("A");
    EXPECT_FALSE(evaluate(cond, c("t"), g, s));
    EXPECT_EQ(s.evaluation(cond.id, c("t"), g), std::optional<bool>(false));
    s.insert_assertion(at("t", "A"));
    EXPECT_TRUE(evaluate(cond, c("t"), g, s));
    EXPECT_EQ(s.evaluation(cond.id, c("t"), g), std::optional<bool>(true));
    s.record_evaluation({cond.id, c("t"), g, false});
    EXPECT_EQ(s.evaluation(cond.id, c("t"), g), std::optional<bool>(true));
}

// composite truth against enumeration, up to four children
TEST(evaluate, composite_truth_tables) {
    const std::vector<std::string> names{"A", "B", "C", "D"};
    for (std::size_t n = 1; n <= 4; ++n) {
        for (unsigned bits = 0; bits < (1u << n); ++bits) {
            Store s = small_store();
            std::vector<Condition> children;
            bool all = true, any = false;
            for (std::size_t i = 0; i < n; ++i) {
                children.push_back(has(names[i]));
                bool on = bits & (1u << i);
                if (on) s.insert_assertion(at("t", names[i]));
                all = all && on;
                any = any || on;
            }
            auto and_r = evaluate_detail(composite(LogicalOperator::all_of, children, "and"), c("t"), g, s);
            auto or_r = evaluate_detail(composite(LogicalOperator::any_of, children, "or"), c("t"), g, s);
            ASSERT_EQ(and_r.result, all) << n << " " << bits;
            ASSERT_EQ(or_r.result, any) << n << " " << bits;
            ASSERT_EQ(and_r.satisfied, static_cast<std::size_t>(__builtin_popcount(bits)));
        }
    }
}

TEST(resolve_parameter, container_then_config_then_default) {
    Environment env;
    env.add_visible(g, c("t"));
    ContainerId config(vocab::config_container(g.str()));
    env.add_visible(g, config);
    Store s(env);
    ParameterSource kanon{l("KAnon"), "minimumCohortSize", std::nullopt};
    s.insert_assertion(at("t", "KAnon", {{"minimumCohortSize", Value(5)}}));
    auto r = resolve_parameter(kanon, c("t"), g, s);
    EXPECT_EQ(r.value, Value(5));
    EXPECT_EQ(r.origin, "container");

    ParameterSource threshold{l("Threshold"), "k", Value(3)};
    auto d = resolve_parameter(threshold, c("t"), g, s);
    EXPECT_EQ(d.value, Value(3));
    EXPECT_EQ(d.origin, "default");

    s.insert_assertion({config, l("Threshold"), g, f, true, {{"k", Value(7)}}});
    auto cfg = resolve_parameter(threshold, c("t"), g, s);
    EXPECT_EQ(cfg.value, Value(7));
    EXPECT_EQ(cfg.origin, "scope-config");
}

TEST(resolve_parameter, no_value_and_no_default_names_the_source) {
    Store s = small_store();
    ParameterSource src{l("KAnon"), "minimumCohortSize", std::nullopt};
    try {
        resolve_parameter(src, c("t"), g, s);
        FAIL();
    } catch (const EvaluationError& e) {
        EXPECT_NE(std::string(e.what()).find("urn:x#KAnon.minimumCohortSize"), std::string::npos);
    }
}

TEST(compare_values, numeric_and_text) {
    EXPECT_TRUE(compare_values(Value(5), ComparisonOperator::less_than, Value(12)));
    EXPECT_TRUE(compare_values(Value(5), ComparisonOperator::less_than, Value(5.5)));
    EXPECT_TRUE(compare_values(Value(12), ComparisonOperator::greater_or_equal, Value(12)));
    EXPECT_TRUE(compare_values(Value(3), ComparisonOperator::equal, Value(3.0)));
    EXPECT_FALSE(compare_values(Value(3), ComparisonOperator::less_or_equal, Value(2)));
    // text comparison: "10" < "9" lexically
    EXPECT_TRUE(compare_values(Value("10"), ComparisonOperator::less_than, Value("9")));
    // large integers compare exactly
    EXPECT_TRUE(compare_values(Value(std::int64_t{9007199254740993}), ComparisonOperator::greater_than,
                               Value(std::int64_t{9007199254740992})));
}

EffectiveRules one_rule(Rule r) {
    EffectiveRules out;
    r.declared_by = f;
    out[f] = EffectiveRuleSet{f, {std::move(r)}};
    return out;
}

TEST(mark, conditional_marks_triggered_container_without_head) {
    Store s = small_store();
    s.insert_assertion(at("t", "A"));
    s.insert_assertion(at("ssn", "A"));
    s.insert_assertion(at("ssn", "H"));
    auto rules = one_rule(Rule{l("H"), ConditionalRule{l("A"), has("B")}, f, "d"});
    auto m = mark(s, rules);
    ConditionId id = std::get<ConditionalRule>(rules.at(f).rules[0].body).condition.id;
    EXPECT_TRUE(m.contains({id, c("t"), g}));
    EXPECT_FALSE(m.contains({id, c("ssn"), g})); // head already there
    EXPECT_FALSE(m.contains({id, c("db"), g}));  // no trigger
    EXPECT_EQ(m.pending.size(), 1u);
}

TEST(mark, composite_marks_reach_children) {
    Store s = small_store();
    s.insert_assertion(at("t", "A"));
    auto cond = composite(LogicalOperator::all_of, {has("B"), composite(LogicalOperator::any_of, {has("C"), has("D")}, "or")},
                          "and");
    auto rules = one_rule(Rule{l("H"), ConditionalRule{l("A"), cond}, f, "d"});
    auto m = mark(s, rules);
    for (const auto* id : {"urn:x#and", "urn:x#or", "urn:x#c-B-id", "urn:x#c-C-id", "urn:x#c-D-id"})
        EXPECT_TRUE(m.contains({ConditionId(id), c("t"), g})) << id;
    EXPECT_EQ(m.pending.size(), 5u);
}

TEST(mark, pure_implication_marks_every_visible_container_missing_head) {
    Store s = small_store();
    s.insert_assertion(at("t", "H"));
    auto rules = one_rule(Rule{l("H"), PureImplicationRule{has("B")}, f, "d"});
    auto m = mark(s, rules);
    EXPECT_EQ(m.pending.size(), 3u);
    EXPECT_FALSE(m.contains({ConditionId("urn:x#c-B-id"), c("t"), g}));
}

TEST(mark, strict_premises_requires_trigger_under_own_framework) {
    Store s = small_store();
    s.insert_assertion({c("t"), l("A"), g, FrameworkId("urn:x#Other"), true, {}});
    auto rules = one_rule(Rule{l("H"), ConditionalRule{l("A"), has("B")}, f, "d"});
    EXPECT_EQ(mark(s, rules).pending.size(), 1u);
    EXPECT_TRUE(mark(s, rules, true).empty());
}

TEST(mark, gdpr_personal_data_rule_marks_individuals_without_personal_data) {
    LoadOptions o;
    o.framework_dir = testing::framework_dir();
    o.env_paths = {testing::scenario("healthcare")};
    auto ws = load_workspace(o);
    Store s = seed_store(ws.env);
    s.materialize_containment();
    auto m = mark(s, ws.rules);
    auto gdpr = testing::framework("gdpr");
    auto individual = testing::base_label("Individual");
    auto personal = testing::label("gdpr", "PersonalData");
    const Rule* rule = nullptr;
    for (const auto& r : ws.rules.at(gdpr).rules)
        if (const auto* cr = std::get_if<ConditionalRule>(&r.body))
            if (cr->from == individual && r.head == personal && r.declared_by == gdpr) rule = &r;
    ASSERT_NE(rule, nullptr);
    const auto& cond = std::get<ConditionalRule>(rule->body).condition;
    std::size_t expected = 0;
    for (std::size_t i : s.by_label(individual)) {
        const auto& a = s.assertions()[i];
        bool lacks = !s.contains({a.container, personal, a.scope, gdpr});
        EXPECT_EQ(m.contains({cond.id, a.container, a.scope}), lacks) << a.container.str();
        expected += lacks;
    }
    EXPECT_GT(expected, 0u);
}

TEST(mark, fixed_point_with_every_head_present_marks_nothing) {
    Store s = small_store();
    for (const auto& d : {"db", "t", "ssn", "other"}) s.insert_assertion(at(d, "H"));
    s.insert_assertion(at("t", "A"));
    EffectiveRules rules;
    rules[f] = EffectiveRuleSet{f,
                                {Rule{l("H"), PureImplicationRule{has("B")}, f, "p"},
                                 Rule{l("H"), ConditionalRule{l("A"), has("C")}, f, "c"}}};
    EXPECT_TRUE(mark(s, rules).empty());
}

// marking only skips work: an unmarked condition evaluated on demand gives the
// truth the oracle derives, which is what the engine would have used
TEST(mark, on_demand_evaluation_agrees_with_marked_evaluation) {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = testing::random_instance(rng);
        Store s = seed_store(inst.env);
        Engine engine(inst.model, inst.rules);
        engine.run(s);
        // at the fixed point every recorded evaluation equals a fresh one
        for (const auto& e : s.evaluations()) {
            const Condition* cond = nullptr;
            for (const auto& [fid, set] : inst.rules)
                for (const auto& r : set.rules) {
                    const Condition* root = nullptr;
                    if (const auto* cr = std::get_if<ConditionalRule>(&r.body)) root = &cr->condition;
                    if (const auto* pr = std::get_if<PureImplicationRule>(&r.body)) root = &pr->condition;
                    if (!root) continue;
                    std::vector<const Condition*> stack{root};
                    while (!stack.empty() && !cond) {
                        const auto* x = stack.back();
                        stack.pop_back();
                        if (x->id == e.condition) cond = x;
                        if (const auto* comp = std::get_if<CompositeCondition>(&x->node))
                            for (const auto& ch : comp->children) stack.push_back(&ch);
                    }
                }
            ASSERT_NE(cond, nullptr);
            bool fresh = evaluate_detail(*cond, e.container, e.scope, s).result;
            // recorded true stays true; recorded false may since have become true
            if (e.result) ASSERT_TRUE(fresh);
        }
        // on-demand truth of every pure implication is already reflected in the store
        for (const auto& [fid, set] : inst.rules)
            for (const auto& r : set.rules) {
                const auto* pr = std::get_if<PureImplicationRule>(&r.body);
                if (!pr) continue;
                for (const auto& [gid, scope] : inst.env.scopes())
                    for (const auto& d : scope.visible)
                        if (evaluate_detail(pr->condition, d, gid, s).result)
                            ASSERT_TRUE(s.contains({d, r.head, gid, fid}));
            }
    }
}

} // namespace
} // namespace complr
