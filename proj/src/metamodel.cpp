#include "complr/metamodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "complr/errors.hpp"

namespace complr {

double Value::as_decimal() const {
    switch (kind()) {
    case ValueKind::integer: return static_cast<double>(std::get<std::int64_t>(data));
    case ValueKind::decimal: return std::get<double>(data);
    default: throw EvaluationError("value '" + to_string() + "' is not numeric");
    }
}

std::string Value::to_string() const {
    switch (kind()) {
    case ValueKind::integer: return std::to_string(std::get<std::int64_t>(data));
    case ValueKind::decimal: {
        std::ostringstream out;
        out.precision(17);
        out << std::get<double>(data);
        std::string s = out.str();
        if (s.find_first_of(".eE") == std::string::npos && s.find_first_of("ni") == std::string::npos) s += ".0";
        return s;
    }
    case ValueKind::string: return std::get<std::string>(data);
    case ValueKind::boolean: return std::get<bool>(data) ? "true" : "false";
    }
    return {};
}

std::string_view to_string(ValueKind kind) {
    switch (kind) {
    case ValueKind::integer: return "integer";
    case ValueKind::decimal: return "decimal";
    case ValueKind::string: return "string";
    case ValueKind::boolean: return "boolean";
    }
    return "?";
}

std::optional<ValueKind> parse_value_kind(std::string_view name) {
    if (name == "integer" || name == "Integer") return ValueKind::integer;
    if (name == "decimal" || name == "Decimal") return ValueKind::decimal;
    if (name == "string" || name == "String") return ValueKind::string;
    if (name == "boolean" || name == "Boolean") return ValueKind::boolean;
    return std::nullopt;
}

std::string_view to_string(FrameworkKind kind) {
    switch (kind) {
    case FrameworkKind::internal: return "internal";
    case FrameworkKind::core: return "core";
    case FrameworkKind::privacy: return "privacy";
    case FrameworkKind::custom: return "custom";
    }
    return "?";
}

std::optional<FrameworkKind> parse_framework_kind(std::string_view name) {
    if (name == "internal") return FrameworkKind::internal;
    if (name == "core") return FrameworkKind::core;
    if (name == "privacy") return FrameworkKind::privacy;
    if (name == "custom") return FrameworkKind::custom;
    return std::nullopt;
}

std::string_view to_string(RelationKind kind) {
    switch (kind) {
    case RelationKind::id: return "id";
    case RelationKind::child: return "child";
    case RelationKind::parent: return "parent";
    case RelationKind::desc: return "desc";
    case RelationKind::sib: return "sib";
    case RelationKind::joinable: return "joinable";
    }
    return "?";
}

std::string_view to_string(ComparisonOperator op) {
    switch (op) {
    case ComparisonOperator::less_than: return "lessThan";
    case ComparisonOperator::less_or_equal: return "lessOrEqual";
    case ComparisonOperator::greater_than: return "greaterThan";
    case ComparisonOperator::greater_or_equal: return "greaterOrEqual";
    case ComparisonOperator::equal: return "equal";
    }
    return "?";
}

std::string_view to_string(LogicalOperator op) { return op == LogicalOperator::all_of ? "AND" : "OR"; }

namespace {

std::string describe_source(const ParameterSource& s) {
    std::string out;
    if (s.label) out = s.label->str() + "." + s.parameter.value_or("?");
    if (s.literal_or_default) out += (out.empty() ? "" : " default ") + s.literal_or_default->to_string();
    return out;
}

} // namespace

std::string describe(const Condition& condition) {
    return std::visit(
        [](const auto& node) -> std::string {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, HasLabelCondition>) {
                return "HasLabel[" + std::string(to_string(node.relation)) + "](" + node.label.str() + ")";
            } else if constexpr (std::is_same_v<T, ContainsLabelCondition>) {
                return "Contains(" + node.label.str() + ")";
            } else if constexpr (std::is_same_v<T, ComparisonCondition>) {
                return "(" + describe_source(node.left) + " " + std::string(to_string(node.op)) + " " +
                       describe_source(node.right) + ")";
            } else {
                std::string out = "(";
                for (std::size_t i = 0; i < node.children.size(); ++i) {
                    if (i) out += node.op == LogicalOperator::all_of ? " AND " : " OR ";
                    out += describe(node.children[i]);
                }
                return out + ")";
            }
        },
        condition.node);
}

std::string Rule::key() const {
    std::string k = std::to_string(body.index()) + "|" + head.str() + "|";
    std::visit(
        [&k](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, SimpleRule>) {
                k += b.from.str();
            } else if constexpr (std::is_same_v<T, ConditionalRule>) {
                k += b.from.str() + "|" + b.condition.id.str();
            } else if constexpr (std::is_same_v<T, PureImplicationRule>) {
                k += b.condition.id.str();
            } else {
                k += std::string(to_string(b.relation)) + "|" + (b.facet ? b.facet->str() : "");
            }
        },
        body);
    return k + "|" + declaration;
}

std::string describe(const Rule& rule) {
    return std::visit(
        [&rule](const auto& b) -> std::string {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, SimpleRule>) {
                return "simple " + b.from.str() + " -> " + rule.head.str();
            } else if constexpr (std::is_same_v<T, ConditionalRule>) {
                return "conditional " + b.from.str() + " -[" + describe(b.condition) + "]-> " + rule.head.str();
            } else if constexpr (std::is_same_v<T, PureImplicationRule>) {
                return "implication " + describe(b.condition) + " => " + rule.head.str();
            } else {
                return "propagation[" + std::string(to_string(b.relation)) + "] " +
                       (rule.head.empty() && b.facet ? "facet " + b.facet->str() : rule.head.str());
            }
        },
        rule.body);
}

std::string to_string(const AssertionKey& key) {
    return "(" + key.container.str() + ", " + key.label.str() + ", " + key.scope.str() + ", " + key.framework.str() + ")";
}

// ---------------------------------------------------------------------------

const Framework& Model::framework(const FrameworkId& id) const {
    auto it = frameworks.find(id);
    if (it == frameworks.end()) throw NotFoundError("unknown framework " + id.str());
    return it->second;
}

const Label* Model::find_label(const LabelId& id) const {
    auto it = labels.find(id);
    return it == labels.end() ? nullptr : &it->second;
}

std::vector<LabelId> Model::labels_in_facet(const FacetId& facet) const {
    std::vector<LabelId> out;
    for (const auto& [id, label] : labels) {
        for (const auto& f : facet_chain(id)) {
            if (f == facet) {
                out.push_back(id);
                break;
            }
        }
    }
    return out;
}

std::vector<FacetId> Model::facet_chain(const LabelId& label) const {
    std::vector<FacetId> chain;
    const Label* l = find_label(label);
    if (!l) return chain;
    std::optional<FacetId> cur = l->facet;
    while (cur && std::find(chain.begin(), chain.end(), *cur) == chain.end()) {
        chain.push_back(*cur);
        auto it = facets.find(*cur);
        cur = it == facets.end() ? std::nullopt : it->second.parent;
    }
    return chain;
}

std::set<FrameworkId> Model::ancestors(const FrameworkId& id) const {
    std::set<FrameworkId> seen;
    std::vector<FrameworkId> stack{id};
    while (!stack.empty()) {
        FrameworkId cur = stack.back();
        stack.pop_back();
        auto it = frameworks.find(cur);
        if (it == frameworks.end()) continue;
        for (const auto& p : it->second.parents) {
            if (p != id && seen.insert(p).second) stack.push_back(p);
        }
    }
    return seen;
}

std::vector<FrameworkId> Model::ordered_frameworks() const {
    if (!order.empty()) return order;
    std::vector<FrameworkId> out;
    for (const auto& [id, fw] : frameworks) out.push_back(id);
    return out;
}

// ---------------------------------------------------------------------------

void Environment::add_container(const ContainerId& id) {
    auto [it, inserted] = containers_.try_emplace(id);
    if (inserted) it->second.id = id;
}

void Environment::add_containment(const ContainerId& parent, const ContainerId& child) {
    add_container(parent);
    add_container(child);
    if (std::find(containment_edges_.begin(), containment_edges_.end(), std::pair{parent, child}) !=
        containment_edges_.end())
        return;
    containment_edges_.emplace_back(parent, child);
    auto& c = containers_.at(child);
    if (!c.parent) {
        c.parent = parent;
        auto& kids = children_[parent];
        kids.insert(std::upper_bound(kids.begin(), kids.end(), child), child);
    }
}

void Environment::add_joinable(const ContainerId& a, const ContainerId& b) {
    add_container(a);
    add_container(b);
    containers_.at(a).joinable_with.insert(b);
    containers_.at(b).joinable_with.insert(a);
}

void Environment::add_scope(const ScopeId& id) {
    auto [it, inserted] = scopes_.try_emplace(id);
    if (inserted) it->second.id = id;
}

void Environment::add_visible(const ScopeId& scope, const ContainerId& container) {
    add_scope(scope);
    add_container(container);
    scopes_.at(scope).visible.insert(container);
}

bool Environment::visible(const ScopeId& scope, const ContainerId& container) const {
    auto it = scopes_.find(scope);
    return it != scopes_.end() && it->second.visible.count(container) != 0;
}

const Container& Environment::container(const ContainerId& id) const {
    auto it = containers_.find(id);
    if (it == containers_.end()) throw InputError("unknown container " + id.str());
    return it->second;
}

const Scope& Environment::scope(const ScopeId& id) const {
    auto it = scopes_.find(id);
    if (it == scopes_.end()) throw InputError("unknown scope " + id.str());
    return it->second;
}

const std::vector<ContainerId>& Environment::children(const ContainerId& id) const {
    static const std::vector<ContainerId> none;
    auto it = children_.find(id);
    return it == children_.end() ? none : it->second;
}

std::vector<ContainerId> Environment::ancestors(const ContainerId& id) const {
    std::vector<ContainerId> out;
    std::optional<ContainerId> cur = container(id).parent;
    while (cur && *cur != id && std::find(out.begin(), out.end(), *cur) == out.end()) {
        out.push_back(*cur);
        cur = container(*cur).parent;
    }
    return out;
}

std::vector<ContainerId> Environment::descendants(const ContainerId& id) const {
    std::vector<ContainerId> out;
    std::set<ContainerId> seen{id};
    std::vector<ContainerId> stack(children(id).rbegin(), children(id).rend());
    while (!stack.empty()) {
        ContainerId cur = stack.back();
        stack.pop_back();
        if (!seen.insert(cur).second) continue;
        out.push_back(cur);
        const auto& kids = children(cur);
        stack.insert(stack.end(), kids.rbegin(), kids.rend());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ContainerId> Environment::related(RelationKind kind, const ContainerId& d) const {
    const Container& c = container(d);
    switch (kind) {
    case RelationKind::id: return {d};
    case RelationKind::child: return children(d);
    case RelationKind::parent: return c.parent ? std::vector<ContainerId>{*c.parent} : std::vector<ContainerId>{};
    case RelationKind::desc: return descendants(d);
    case RelationKind::sib: {
        if (!c.parent) return {};
        std::vector<ContainerId> out;
        for (const auto& s : children(*c.parent))
            if (s != d) out.push_back(s);
        return out;
    }
    case RelationKind::joinable: return {c.joinable_with.begin(), c.joinable_with.end()};
    }
    return {};
}

std::vector<Diagnostic> Environment::validate() const {
    std::vector<Diagnostic> out;
    std::map<ContainerId, std::vector<ContainerId>> parents;
    for (const auto& [p, c] : containment_edges_) {
        if (p == c) {
            out.push_back({"containment-reflexive", c.str() + " contains itself"});
            continue;
        }
        parents[c].push_back(p);
    }
    for (const auto& [child, ps] : parents) {
        if (ps.size() > 1) {
            std::string msg = child.str() + " has " + std::to_string(ps.size()) + " parents:";
            for (const auto& p : ps) msg += " [" + p.str() + " contains " + child.str() + "]";
            out.push_back({"containment-multiple-parents", msg});
        }
    }
    // Cycle detection over the full edge set (not only the first-parent forest).
    std::map<ContainerId, std::vector<ContainerId>> adj;
    for (const auto& [p, c] : containment_edges_)
        if (p != c) adj[p].push_back(c);
    std::map<ContainerId, int> color;
    std::vector<ContainerId> path;
    std::set<std::string> reported;
    std::function<void(const ContainerId&)> dfs = [&](const ContainerId& n) {
        color[n] = 1;
        path.push_back(n);
        for (const auto& m : adj[n]) {
            if (color[m] == 1) {
                auto start = std::find(path.begin(), path.end(), m);
                std::vector<ContainerId> cyc(start, path.end());
                std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
                std::string msg = "containment cycle:";
                for (const auto& x : cyc) msg += " " + x.str();
                if (reported.insert(msg).second) out.push_back({"containment-cycle", msg});
            } else if (color[m] == 0) {
                dfs(m);
            }
        }
        path.pop_back();
        color[n] = 2;
    };
    for (const auto& [id, c] : containers_)
        if (color[id] == 0) dfs(id);

    for (const auto& [id, c] : containers_) {
        for (const auto& j : c.joinable_with) {
            if (j == id) out.push_back({"joinable-reflexive", id.str() + " is joinable with itself"});
            auto it = containers_.find(j);
            if (it == containers_.end() || it->second.joinable_with.count(id) == 0)
                out.push_back({"joinable-asymmetric", id.str() + " joinable with " + j.str() + " but not conversely"});
        }
    }
    for (const auto& a : ground) {
        if (!has_scope(a.scope)) {
            out.push_back({"unknown-scope", "assertion " + to_string(a.key()) + " names unknown scope"});
        } else if (!visible(a.scope, a.container)) {
            out.push_back({"scope-visibility", "assertion " + to_string(a.key()) + " on container not visible in scope"});
        }
    }
    for (const auto& c : ground_containments) {
        if (!visible(c.scope, c.container))
            out.push_back({"scope-visibility", "containment assertion (" + c.container.str() + ", " + c.label.str() +
                                                   ", " + c.scope.str() + ") on container not visible in scope"});
    }
    return out;
}

void Environment::require_valid() const {
    auto diags = validate();
    if (diags.empty()) return;
    std::string msg = "invalid environment:";
    for (const auto& d : diags) msg += "\n  [" + d.code + "] " + d.message;
    throw InputError(msg);
}

bool canonical_relation(RelationKind kind, const ContainerId& d1, const ContainerId& d2, const Environment& env) {
    if (!env.has_container(d1)) throw InputError("unknown container " + d1.str());
    if (!env.has_container(d2)) throw InputError("unknown container " + d2.str());
    const auto& c1 = env.container(d1);
    const auto& c2 = env.container(d2);
    switch (kind) {
    case RelationKind::id: return d1 == d2;
    case RelationKind::child: return c1.parent && *c1.parent == d2;
    case RelationKind::parent: return c2.parent && *c2.parent == d1;
    case RelationKind::desc: {
        auto anc = env.ancestors(d1);
        return std::find(anc.begin(), anc.end(), d2) != anc.end();
    }
    case RelationKind::sib: return d1 != d2 && c1.parent && c2.parent && *c1.parent == *c2.parent;
    case RelationKind::joinable: return c1.joinable_with.count(d2) != 0;
    }
    return false;
}

} // namespace complr
