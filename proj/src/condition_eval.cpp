#include "complr/condition_eval.hpp"

#include "complr/errors.hpp"
#include "complr/vocab.hpp"

namespace complr {

namespace {

void collect(const Condition& c, MarkSet& out) {
    out.conditions.emplace(c.id, &c);
    if (const auto* comp = std::get_if<CompositeCondition>(&c.node))
        for (const auto& child : comp->children) collect(child, out);
}

void mark_tree(const Condition& c, const ContainerId& d, const ScopeId& g, MarkSet& out) {
    if (!out.pending.insert({c.id, d, g}).second) return;
    if (const auto* comp = std::get_if<CompositeCondition>(&c.node))
        for (const auto& child : comp->children) mark_tree(child, d, g, out);
}

} // namespace

MarkSet mark(const Store& store, const EffectiveRules& rules, bool strict_premises) {
    MarkSet out;
    const Environment& env = store.env();
    for (const auto& [fid, set] : rules) {
        for (const auto& rule : set.rules) {
            if (const auto* c = std::get_if<ConditionalRule>(&rule.body)) {
                collect(c->condition, out);
                for (std::size_t i : store.by_label(c->from)) {
                    const auto& a = store.assertions()[i];
                    if (strict_premises && a.framework != fid) continue;
                    if (store.contains({a.container, rule.head, a.scope, fid})) continue;
                    mark_tree(c->condition, a.container, a.scope, out);
                }
            } else if (const auto* p = std::get_if<PureImplicationRule>(&rule.body)) {
                collect(p->condition, out);
                for (const auto& [gid, scope] : env.scopes())
                    for (const auto& d : scope.visible)
                        if (!store.contains({d, rule.head, gid, fid})) mark_tree(p->condition, d, gid, out);
            }
        }
    }
    return out;
}

ResolvedParameter resolve_parameter(const ParameterSource& source, const ContainerId& d, const ScopeId& g,
                                    const Store& store) {
    if (source.label && source.parameter) {
        auto lookup = [&](const ContainerId& c) -> std::optional<ResolvedParameter> {
            for (const auto& f : store.frameworks_for(c, *source.label, g)) {
                AssertionKey key{c, *source.label, g, f};
                const auto* a = store.find(key);
                if (!a) continue;
                auto it = a->parameters.find(*source.parameter);
                if (it != a->parameters.end()) return ResolvedParameter{it->second, "", key};
            }
            return std::nullopt;
        };
        if (auto r = lookup(d)) {
            r->origin = "container";
            return *r;
        }
        ContainerId config(vocab::config_container(g.str()));
        if (config != d && store.env().has_container(config)) {
            if (auto r = lookup(config)) {
                r->origin = "scope-config";
                return *r;
            }
        }
    }
    if (source.literal_or_default) return ResolvedParameter{*source.literal_or_default, "default", std::nullopt};
    std::string name = source.label ? source.label->str() + "." + source.parameter.value_or("?") : "<literal>";
    throw EvaluationError("cannot resolve parameter " + name + " for " + d.str() + " in " + g.str() +
                          ": no assertion carries it and no default is declared");
}

bool compare_values(const Value& left, ComparisonOperator op, const Value& right) {
    int cmp;
    if (left.is_numeric() && right.is_numeric()) {
        if (left.kind() == ValueKind::integer && right.kind() == ValueKind::integer) {
            auto l = std::get<std::int64_t>(left.data), r = std::get<std::int64_t>(right.data);
            cmp = l < r ? -1 : (l > r ? 1 : 0);
        } else {
            double l = left.as_decimal(), r = right.as_decimal();
            cmp = l < r ? -1 : (l > r ? 1 : 0);
        }
    } else {
        cmp = left.to_string().compare(right.to_string());
        cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
    }
    switch (op) {
    case ComparisonOperator::less_than: return cmp < 0;
    case ComparisonOperator::less_or_equal: return cmp <= 0;
    case ComparisonOperator::greater_than: return cmp > 0;
    case ComparisonOperator::greater_or_equal: return cmp >= 0;
    case ComparisonOperator::equal: return cmp == 0;
    }
    return false;
}

namespace {

Premise assertion_premise(const Store& store, const ContainerId& c, const LabelId& l, const ScopeId& g) {
    auto fws = store.frameworks_for(c, l, g);
    return Premise{Premise::Kind::assertion, {c, l, g, fws.front()}, ""};
}

EvaluationResult evaluate_node(const Condition& condition, const ContainerId& d, const ScopeId& g, const Store& store) {
    EvaluationResult out;
    const Environment& env = store.env();
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, HasLabelCondition>) {
                for (const auto& x : env.related(node.relation, d)) {
                    if (store.has_label(x, node.label, g)) {
                        out.result = true;
                        out.witnesses.push_back(assertion_premise(store, x, node.label, g));
                        break;
                    }
                }
            } else if constexpr (std::is_same_v<T, ContainsLabelCondition>) {
                if (store.contains_label(d, node.label, g)) {
                    out.result = true;
                    bool found = false;
                    for (const auto& x : env.descendants(d)) {
                        if (store.has_label(x, node.label, g)) {
                            out.witnesses.push_back(assertion_premise(store, x, node.label, g));
                            found = true;
                            break;
                        }
                    }
                    if (!found)
                        out.witnesses.push_back(
                            Premise{Premise::Kind::ground_containment, {d, node.label, g, FrameworkId()}, "declared"});
                }
            } else if constexpr (std::is_same_v<T, ComparisonCondition>) {
                auto l = resolve_parameter(node.left, d, g, store);
                auto r = resolve_parameter(node.right, d, g, store);
                out.result = compare_values(l.value, node.op, r.value);
                for (const auto* p : {&l, &r}) {
                    const ParameterSource& src = p == &l ? node.left : node.right;
                    std::string what = src.label ? src.label->str() + "." + *src.parameter : "literal";
                    Premise prem{Premise::Kind::parameter, p->assertion.value_or(AssertionKey{}),
                                 what + " = " + p->value.to_string() + " (" + p->origin + ")"};
                    out.witnesses.push_back(std::move(prem));
                }
            } else {
                out.total = node.children.size();
                bool first_true = true;
                for (const auto& child : node.children) {
                    auto r = evaluate_node(child, d, g, store);
                    out.records.insert(out.records.end(), r.records.begin(), r.records.end());
                    if (!r.result) continue;
                    ++out.satisfied;
                    if (node.op == LogicalOperator::all_of || first_true)
                        out.witnesses.insert(out.witnesses.end(), r.witnesses.begin(), r.witnesses.end());
                    first_true = false;
                }
                out.result = node.op == LogicalOperator::all_of ? out.satisfied == out.total : out.satisfied >= 1;
            }
        },
        condition.node);
    if (!out.result) out.witnesses.clear();
    out.records.push_back({condition.id, d, g, out.result});
    return out;
}

} // namespace

EvaluationResult evaluate_detail(const Condition& condition, const ContainerId& d, const ScopeId& g, const Store& store) {
    return evaluate_node(condition, d, g, store);
}

bool evaluate(const Condition& condition, const ContainerId& d, const ScopeId& g, Store& store) {
    auto r = evaluate_detail(condition, d, g, store);
    for (const auto& e : r.records) store.record_evaluation(e);
    return r.result;
}

} // namespace complr
