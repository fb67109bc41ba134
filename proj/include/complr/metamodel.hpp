#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace complr {

/// Interned-by-value identifier. Ids are expanded IRIs; the tag keeps
/// containers, labels, scopes and frameworks from being mixed up.
template <class Tag>
class Id {
public:
    Id() = default;
    explicit Id(std::string value) : value_(std::move(value)) {}

    const std::string& str() const { return value_; }
    bool empty() const { return value_.empty(); }

    auto operator<=>(const Id&) const = default;
    bool operator==(const Id&) const = default;

private:
    std::string value_;
};

using ContainerId = Id<struct ContainerTag>;
using LabelId = Id<struct LabelTag>;
using FacetId = Id<struct FacetTag>;
using FrameworkId = Id<struct FrameworkTag>;
using ScopeId = Id<struct ScopeTag>;
using ConditionId = Id<struct ConditionTag>;

// ---------------------------------------------------------------------------
// Scalars

enum class ValueKind { integer, decimal, string, boolean };

struct Value {
    std::variant<std::int64_t, double, std::string, bool> data;

    Value() : data(std::int64_t{0}) {}
    Value(std::int64_t v) : data(v) {}
    Value(int v) : data(std::int64_t{v}) {}
    Value(double v) : data(v) {}
    Value(std::string v) : data(std::move(v)) {}
    Value(const char* v) : data(std::string(v)) {}
    Value(bool v) : data(v) {}

    ValueKind kind() const { return static_cast<ValueKind>(data.index()); }
    bool is_numeric() const { return kind() == ValueKind::integer || kind() == ValueKind::decimal; }
    double as_decimal() const;
    std::string to_string() const;

    bool operator==(const Value&) const = default;
};

std::string_view to_string(ValueKind kind);
std::optional<ValueKind> parse_value_kind(std::string_view name);

// ---------------------------------------------------------------------------
// Vocabulary

struct ParameterSpec {
    std::string name;
    ValueKind kind = ValueKind::integer;
};

struct Facet {
    FacetId id;
    std::string name;
    FrameworkId framework;
    std::optional<FacetId> parent;
};

struct Label {
    LabelId id;
    FacetId facet;
    FrameworkId framework;
    std::vector<ParameterSpec> parameters;
};

enum class FrameworkKind { internal, core, privacy, custom };

std::string_view to_string(FrameworkKind kind);
std::optional<FrameworkKind> parse_framework_kind(std::string_view name);

enum class RelationKind { id, child, parent, desc, sib, joinable };

std::string_view to_string(RelationKind kind);

// ---------------------------------------------------------------------------
// Conditions

enum class ComparisonOperator { less_than, less_or_equal, greater_than, greater_or_equal, equal };
enum class LogicalOperator { all_of, any_of };

std::string_view to_string(ComparisonOperator op);
std::string_view to_string(LogicalOperator op);

struct ParameterSource {
    std::optional<LabelId> label;
    std::optional<std::string> parameter;
    std::optional<Value> literal_or_default;
};

struct Condition;

struct HasLabelCondition {
    RelationKind relation = RelationKind::id;
    LabelId label;
};

struct ContainsLabelCondition {
    LabelId label;
};

struct ComparisonCondition {
    ParameterSource left;
    ParameterSource right;
    ComparisonOperator op = ComparisonOperator::less_than;
};

struct CompositeCondition {
    LogicalOperator op = LogicalOperator::all_of;
    std::vector<Condition> children;
};

struct Condition {
    ConditionId id;
    std::variant<HasLabelCondition, ContainsLabelCondition, ComparisonCondition, CompositeCondition> node;
};

std::string describe(const Condition& condition);

// ---------------------------------------------------------------------------
// Rules

struct SimpleRule {
    LabelId from;
};

struct ConditionalRule {
    LabelId from;
    Condition condition;
};

struct PureImplicationRule {
    Condition condition;
};

/// Propagation copies the head label from a source container to the
/// containers standing in `relation` to it (child = the source's children).
struct PropagationRule {
    RelationKind relation = RelationKind::child;
    std::optional<FacetId> facet; ///< set before facet expansion; head is empty until then
};

struct Rule {
    LabelId head;
    std::variant<SimpleRule, ConditionalRule, PureImplicationRule, PropagationRule> body;
    FrameworkId declared_by;
    std::string declaration; ///< id of the declaring node

    bool is_simple() const { return std::holds_alternative<SimpleRule>(body); }
    bool is_conditional() const { return std::holds_alternative<ConditionalRule>(body); }
    bool is_pure() const { return std::holds_alternative<PureImplicationRule>(body); }
    bool is_propagation() const { return std::holds_alternative<PropagationRule>(body); }

    /// Identity used for de-duplication: variant, head, body and declaring node.
    std::string key() const;
};

std::string describe(const Rule& rule);

struct Framework {
    FrameworkId id;
    std::string name;
    FrameworkKind kind = FrameworkKind::custom;
    std::vector<FrameworkId> parents;
    std::vector<Rule> declared_rules;
    std::vector<LabelId> labels;
    std::vector<FacetId> facets;
};

/// (X, L, F, ≺): facets, labels, frameworks and inheritance.
struct Model {
    std::map<FacetId, Facet> facets;
    std::map<LabelId, Label> labels;
    std::map<FrameworkId, Framework> frameworks;
    std::vector<FrameworkId> order; ///< dependency order, parents first

    const Framework& framework(const FrameworkId& id) const;
    const Label* find_label(const LabelId& id) const;

    /// Labels whose facet is `facet` or one of its sub-facets, sorted.
    std::vector<LabelId> labels_in_facet(const FacetId& facet) const;
    /// The label's facet followed by its ancestor facets.
    std::vector<FacetId> facet_chain(const LabelId& label) const;
    /// Transitive parents of `id` (excluding `id`), sorted.
    std::set<FrameworkId> ancestors(const FrameworkId& id) const;
    /// Frameworks in `order`, or sorted ids when no order was recorded.
    std::vector<FrameworkId> ordered_frameworks() const;
};

// ---------------------------------------------------------------------------
// Environment (D, G, A₀, ⊏, ⋈)

struct Container {
    ContainerId id;
    std::optional<ContainerId> parent;
    std::set<ContainerId> joinable_with;
};

struct Scope {
    ScopeId id;
    std::set<ContainerId> visible;
};

using Parameters = std::map<std::string, Value>;

struct AssertionKey {
    ContainerId container;
    LabelId label;
    ScopeId scope;
    FrameworkId framework;

    auto operator<=>(const AssertionKey&) const = default;
    bool operator==(const AssertionKey&) const = default;
};

std::string to_string(const AssertionKey& key);

struct ComplianceAssertion {
    ContainerId container;
    LabelId label;
    ScopeId scope;
    FrameworkId framework;
    bool ground = false;
    Parameters parameters;

    AssertionKey key() const { return {container, label, scope, framework}; }
};

struct ContainmentAssertion {
    ContainerId container;
    LabelId label;
    ScopeId scope;
    bool ground = false;
};

struct ConditionEvaluation {
    ConditionId condition;
    ContainerId container;
    ScopeId scope;
    bool result = false;
};

struct Diagnostic {
    std::string code;
    std::string message;
};

class Environment {
public:
    void add_container(const ContainerId& id);
    /// Records `parent ⊐ child`; conflicts are reported by validate().
    void add_containment(const ContainerId& parent, const ContainerId& child);
    void add_joinable(const ContainerId& a, const ContainerId& b);
    void add_scope(const ScopeId& id);
    void add_visible(const ScopeId& scope, const ContainerId& container);

    std::vector<ComplianceAssertion> ground;
    std::vector<ContainmentAssertion> ground_containments;

    /// Every violation of the containment, joinability and scope invariants.
    std::vector<Diagnostic> validate() const;
    /// Throws InputError listing all diagnostics when validate() is non-empty.
    void require_valid() const;

    bool has_container(const ContainerId& id) const { return containers_.count(id) != 0; }
    bool has_scope(const ScopeId& id) const { return scopes_.count(id) != 0; }
    bool visible(const ScopeId& scope, const ContainerId& container) const;

    const std::map<ContainerId, Container>& containers() const { return containers_; }
    const std::map<ScopeId, Scope>& scopes() const { return scopes_; }
    const Container& container(const ContainerId& id) const;
    const Scope& scope(const ScopeId& id) const;

    const std::vector<ContainerId>& children(const ContainerId& id) const;
    std::vector<ContainerId> ancestors(const ContainerId& id) const;
    std::vector<ContainerId> descendants(const ContainerId& id) const;

    /// Containers standing in `kind` relative to `d`: the set {x : kind(x, d)}.
    std::vector<ContainerId> related(RelationKind kind, const ContainerId& d) const;

private:
    std::map<ContainerId, Container> containers_;
    std::map<ScopeId, Scope> scopes_;
    std::vector<std::pair<ContainerId, ContainerId>> containment_edges_;
    std::map<ContainerId, std::vector<ContainerId>> children_;
};

/// Truth of the canonical relation kind(d1, d2): child(x,y) iff x ⊏ y,
/// parent(x,y) iff y ⊏ x, desc(x,y) iff x ⊏⁺ y, sib, id, joinable.
bool canonical_relation(RelationKind kind, const ContainerId& d1, const ContainerId& d2, const Environment& env);

} // namespace complr

template <class Tag>
struct std::hash<complr::Id<Tag>> {
    std::size_t operator()(const complr::Id<Tag>& id) const noexcept { return std::hash<std::string>{}(id.str()); }
};

template <>
struct std::hash<complr::AssertionKey> {
    std::size_t operator()(const complr::AssertionKey& k) const noexcept {
        std::size_t h = std::hash<std::string>{}(k.container.str());
        auto mix = [&h](const std::string& s) { h ^= std::hash<std::string>{}(s) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
        mix(k.label.str());
        mix(k.scope.str());
        mix(k.framework.str());
        return h;
    }
};
