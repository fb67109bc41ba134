#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "complr/fact_store.hpp"
#include "complr/framework_resolver.hpp"
#include "complr/metamodel.hpp"

namespace complr {

struct Mark {
    ConditionId condition;
    ContainerId container;
    ScopeId scope;

    auto operator<=>(const Mark&) const = default;
    bool operator==(const Mark&) const = default;
};

/// Pending (condition, container, scope) tuples plus the condition bodies
/// they refer to.
struct MarkSet {
    std::set<Mark> pending;
    std::map<ConditionId, const Condition*> conditions;

    bool empty() const { return pending.empty(); }
    bool contains(const Mark& m) const { return pending.count(m) != 0; }
};

/// Marks every condition whose rule could fire but has not: conditional
/// rules with the trigger present and the head absent, pure implications
/// with the head absent on a visible container, and all sub-conditions of
/// marked composites. With `strict_premises` the trigger of a conditional
/// rule must be asserted under the rule's own framework.
/// The returned pointers refer into `rules`.
MarkSet mark(const Store& store, const EffectiveRules& rules, bool strict_premises = false);

struct ResolvedParameter {
    Value value;
    std::string origin;                    ///< "container", "scope-config" or "default"
    std::optional<AssertionKey> assertion; ///< the assertion the value came from
};

/// Value of `source` for container d in scope g: the source label's
/// assertion on d, then on the scope's configuration container, then the
/// default. Throws EvaluationError when none applies.
ResolvedParameter resolve_parameter(const ParameterSource& source, const ContainerId& d, const ScopeId& g,
                                    const Store& store);

struct EvaluationResult {
    bool result = false;
    std::size_t satisfied = 0;      ///< composites: satisfied children
    std::size_t total = 0;          ///< composites: all children
    std::vector<Premise> witnesses; ///< facts that made a true result true
    std::vector<ConditionEvaluation> records; ///< this condition and every sub-condition
};

/// Truth of `condition` at (d, g) against the store as it stands. Pure.
EvaluationResult evaluate_detail(const Condition& condition, const ContainerId& d, const ScopeId& g, const Store& store);

/// evaluate_detail plus recording of the ConditionEvaluation facts.
bool evaluate(const Condition& condition, const ContainerId& d, const ScopeId& g, Store& store);

/// Applies `op` to two resolved values: numerically if both are numeric,
/// otherwise on their text forms.
bool compare_values(const Value& left, ComparisonOperator op, const Value& right);

} // namespace complr
