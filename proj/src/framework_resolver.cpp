#include "complr/framework_resolver.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "complr/errors.hpp"
#include "complr/vocab.hpp"

namespace complr {

namespace {

using rdf::Term;
using vocab::cx;

std::string local_name(const std::string& iri) {
    auto pos = iri.find_last_of("#/:");
    return pos == std::string::npos ? iri : iri.substr(pos + 1);
}

// Objects with RDF collections spliced in, so `:p a, b` and `:p (a b)` read alike.
std::vector<Term> flatten(const std::vector<Term>& objects) {
    std::vector<Term> out;
    for (const auto& o : objects) {
        if (o.is_list())
            out.insert(out.end(), o.items.begin(), o.items.end());
        else
            out.push_back(o);
    }
    return out;
}

std::vector<Term> objects(const rdf::GraphIndex& ix, const std::string& subject, std::string_view local) {
    return flatten(ix.objects(subject, cx(local)));
}

std::optional<Term> at_most_one(const rdf::GraphIndex& ix, const std::string& subject, std::string_view local) {
    auto objs = ix.objects(subject, cx(local));
    if (objs.empty()) return std::nullopt;
    if (objs.size() > 1) throw InputError(subject + ": expected a single cx:" + std::string(local) + " value");
    return objs.front();
}

class RuleExtractor {
public:
    RuleExtractor(const rdf::GraphIndex& ix, FrameworkId framework, const Model& model)
        : ix_(ix), framework_(std::move(framework)), model_(model) {}

    std::vector<Rule> run() {
        const std::string& fw = framework_.str();
        std::vector<Rule> rules;
        for (const auto& n : node_objects(fw, "declaresSubclassOf")) subclass(n, rules);
        for (const auto& n : node_objects(fw, "declaresImplication")) implication(n, rules);
        for (const auto& n : node_objects(fw, "declaresEquivalent")) equivalence(n, rules);
        for (const auto& n : node_objects(fw, "declaresPropagation")) propagation(n, rules);
        std::sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) { return a.key() < b.key(); });
        rules.erase(std::unique(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) { return a.key() == b.key(); }),
                    rules.end());
        return rules;
    }

private:
    const rdf::GraphIndex& ix_;
    FrameworkId framework_;
    const Model& model_;

    std::vector<std::string> node_objects(const std::string& subject, std::string_view pred) {
        std::vector<std::string> out;
        for (const auto& t : ix_.objects(subject, cx(pred))) {
            if (!t.is_iri()) throw InputError(subject + ": cx:" + std::string(pred) + " must point at a declaration node");
            out.push_back(t.value);
        }
        return out;
    }

    LabelId label(const Term& t, const std::string& context) {
        if (!t.is_iri()) throw InputError(context + ": expected a label, found literal '" + t.value + "'");
        LabelId id(t.value);
        if (!model_.labels.count(id)) throw InputError(context + ": unknown label '" + t.value + "'");
        return id;
    }

    std::vector<LabelId> labels(const std::string& node, std::string_view pred) {
        std::vector<LabelId> out;
        for (const auto& t : objects(ix_, node, pred)) out.push_back(label(t, node));
        return out;
    }

    Rule make(LabelId head, decltype(Rule::body) body, const std::string& node) {
        return Rule{std::move(head), std::move(body), framework_, node};
    }

    void subclass(const std::string& n, std::vector<Rule>& out) {
        auto froms = labels(n, "fromLabel");
        auto any = labels(n, "fromAnyLabel");
        froms.insert(froms.end(), any.begin(), any.end());
        auto tos = labels(n, "isSubclassOf");
        auto to2 = labels(n, "toLabel");
        tos.insert(tos.end(), to2.begin(), to2.end());
        if (froms.empty()) throw InputError(n + ": subclass declaration without cx:fromLabel or cx:fromAnyLabel");
        if (tos.empty()) throw InputError(n + ": subclass declaration without cx:isSubclassOf or cx:toLabel");
        for (const auto& to : tos)
            for (const auto& from : froms) out.push_back(make(to, SimpleRule{from}, n));
    }

    void implication(const std::string& n, std::vector<Rule>& out) {
        auto froms = labels(n, "fromLabel");
        auto tos = labels(n, "toLabel");
        if (tos.empty()) throw InputError(n + ": implication without cx:toLabel");
        auto cond = ix_.objects(n, cx("hasCondition"));
        if (cond.size() != 1) throw InputError(n + ": implication needs exactly one cx:hasCondition");
        Condition c = condition(cond.front(), 0);
        for (const auto& to : tos) {
            if (froms.empty())
                out.push_back(make(to, PureImplicationRule{c}, n));
            else
                for (const auto& from : froms) out.push_back(make(to, ConditionalRule{from, c}, n));
        }
    }

    void equivalence(const std::string& n, std::vector<Rule>& out) {
        auto parts = labels(n, "fromAllLabels");
        auto tos = labels(n, "toLabel");
        if (parts.empty()) throw InputError(n + ": equivalence without cx:fromAllLabels");
        if (tos.size() != 1) throw InputError(n + ": equivalence needs exactly one cx:toLabel");
        CompositeCondition all{LogicalOperator::all_of, {}};
        for (std::size_t i = 0; i < parts.size(); ++i)
            all.children.push_back(
                Condition{ConditionId(n + "#all/" + std::to_string(i)), HasLabelCondition{RelationKind::id, parts[i]}});
        out.push_back(make(tos.front(), PureImplicationRule{Condition{ConditionId(n + "#all"), std::move(all)}}, n));
        for (const auto& p : parts) out.push_back(make(p, SimpleRule{tos.front()}, n));
    }

    void propagation(const std::string& n, std::vector<Rule>& out) {
        auto subjects = labels(n, "propagatesLabel");
        std::vector<FacetId> facets;
        for (const auto& t : objects(ix_, n, "propagatesFacet")) {
            FacetId f(t.value);
            if (!t.is_iri() || !model_.facets.count(f)) throw InputError(n + ": unknown facet '" + t.value + "'");
            facets.push_back(f);
        }
        if (subjects.empty() && facets.empty())
            throw InputError(n + ": propagation without cx:propagatesLabel or cx:propagatesFacet");
        auto dirs = objects(ix_, n, "propagationDirection");
        if (dirs.empty()) throw InputError(n + ": propagation without cx:propagationDirection");
        for (const auto& d : dirs) {
            RelationKind rel = direction(d, n);
            for (const auto& l : subjects) out.push_back(make(l, PropagationRule{rel, std::nullopt}, n));
            for (const auto& f : facets) out.push_back(make(LabelId(), PropagationRule{rel, f}, n));
        }
    }

    static RelationKind direction(const Term& t, const std::string& n) {
        if (t.is_iri()) {
            if (t.value == cx("Inward")) return RelationKind::child;
            if (t.value == cx("Outward")) return RelationKind::parent;
            if (t.value == cx("Peer")) return RelationKind::sib;
            if (t.value == cx("Joinable")) return RelationKind::joinable;
        }
        throw InputError(n + ": propagation direction must be Inward, Outward, Peer or Joinable, found '" + t.value + "'");
    }

    static RelationKind relation(const Term& t, const std::string& n) {
        if (t.is_iri()) {
            if (t.value == cx("Self") || t.value == cx("Id")) return RelationKind::id;
            if (t.value == cx("Child")) return RelationKind::child;
            if (t.value == cx("Parent")) return RelationKind::parent;
            if (t.value == cx("Descendant")) return RelationKind::desc;
            if (t.value == cx("Sibling")) return RelationKind::sib;
        }
        throw InputError(n + ": unknown relation '" + t.value + "' (expected Self, Child, Parent, Descendant or Sibling)");
    }

    static ComparisonOperator comparison(const Term& t, const std::string& n) {
        if (t.is_iri()) {
            if (t.value == cx("lessThan")) return ComparisonOperator::less_than;
            if (t.value == cx("lessOrEqual")) return ComparisonOperator::less_or_equal;
            if (t.value == cx("greaterThan")) return ComparisonOperator::greater_than;
            if (t.value == cx("greaterOrEqual")) return ComparisonOperator::greater_or_equal;
            if (t.value == cx("equal") || t.value == cx("equals")) return ComparisonOperator::equal;
        }
        throw InputError(n + ": unknown comparison operator '" + t.value + "'");
    }

    ParameterSource source(const Term& t, const std::string& owner) {
        if (!t.is_iri()) throw InputError(owner + ": malformed parameter source");
        const std::string& n = t.value;
        ParameterSource s;
        if (auto l = at_most_one(ix_, n, "sourceLabel")) s.label = label(*l, n);
        if (auto p = at_most_one(ix_, n, "sourceParameter")) {
            if (!p->is_literal()) throw InputError(n + ": cx:sourceParameter must be a string");
            s.parameter = p->value;
        }
        auto def = at_most_one(ix_, n, "defaultValue");
        if (!def) def = at_most_one(ix_, n, "literalValue");
        if (def) {
            if (!def->is_literal()) throw InputError(n + ": default value must be a literal");
            s.literal_or_default = def->to_value();
        }
        if (s.label.has_value() != s.parameter.has_value())
            throw InputError(n + ": cx:sourceLabel and cx:sourceParameter must be given together");
        if (!s.label && !s.literal_or_default) throw InputError(n + ": parameter source has neither a label nor a value");
        return s;
    }

    Condition condition(const Term& t, int depth) {
        if (!t.is_iri()) throw InputError(framework_.str() + ": malformed condition node '" + t.value + "'");
        if (depth > 64) throw InputError(t.value + ": condition nesting too deep (cyclic?)");
        const std::string& n = t.value;
        std::set<std::string> types;
        for (const auto& ty : ix_.objects(n, rdf::rdf_type)) types.insert(ty.value);
        ConditionId id(n);

        if (types.count(cx("CompositeCondition")) || !ix_.objects(n, cx("logicalOperator")).empty()) {
            auto op = at_most_one(ix_, n, "logicalOperator");
            if (!op) throw InputError(n + ": composite condition without cx:logicalOperator");
            CompositeCondition c;
            if (op->value == cx("AND"))
                c.op = LogicalOperator::all_of;
            else if (op->value == cx("OR"))
                c.op = LogicalOperator::any_of;
            else
                throw InputError(n + ": logical operator must be cx:AND or cx:OR");
            for (const auto& child : objects(ix_, n, "hasCondition")) c.children.push_back(condition(child, depth + 1));
            if (c.children.empty()) throw InputError(n + ": empty composite condition");
            std::sort(c.children.begin(), c.children.end(),
                      [](const Condition& a, const Condition& b) { return a.id < b.id; });
            return Condition{id, std::move(c)};
        }
        if (types.count(cx("ComparisonCondition")) || types.count(cx("ParameterCheckCondition")) ||
            !ix_.objects(n, cx("leftSource")).empty()) {
            auto left = at_most_one(ix_, n, "leftSource");
            auto right = at_most_one(ix_, n, "rightSource");
            auto op = at_most_one(ix_, n, "comparisonOperator");
            if (!left || !right || !op)
                throw InputError(n + ": comparison needs cx:leftSource, cx:rightSource and cx:comparisonOperator");
            return Condition{id, ComparisonCondition{source(*left, n), source(*right, n), comparison(*op, n)}};
        }
        if (auto c = at_most_one(ix_, n, "requiresContains")) return Condition{id, ContainsLabelCondition{label(*c, n)}};
        if (auto l = at_most_one(ix_, n, "requiresLabel")) {
            RelationKind rel = RelationKind::id;
            if (auto r = at_most_one(ix_, n, "onRelation")) rel = relation(*r, n);
            return Condition{id, HasLabelCondition{rel, label(*l, n)}};
        }
        throw InputError(n + ": malformed condition node (no recognised condition properties)");
    }
};

std::optional<ValueKind> parameter_kind(const Term& t) {
    if (t.is_iri()) {
        if (t.value == cx("Integer")) return ValueKind::integer;
        if (t.value == cx("Decimal")) return ValueKind::decimal;
        if (t.value == cx("String")) return ValueKind::string;
        if (t.value == cx("Boolean")) return ValueKind::boolean;
    }
    if (t.is_literal()) return parse_value_kind(t.value);
    return std::nullopt;
}

} // namespace

std::vector<Rule> extract_rules(const rdf::GraphIndex& index, const FrameworkId& framework, const Model& vocabulary) {
    return RuleExtractor(index, framework, vocabulary).run();
}

Model build_model(const std::vector<FrameworkSource>& sources) {
    Model model;
    std::vector<rdf::GraphIndex> indexes;
    indexes.reserve(sources.size());
    for (const auto& src : sources) {
        indexes.emplace_back(src.graph);
        const auto& ix = indexes.back();
        FrameworkId fid(src.manifest.iri);
        if (model.frameworks.count(fid)) throw InputError("framework '" + fid.str() + "' declared twice");
        Framework fw{fid, src.manifest.id, src.manifest.kind, {}, {}, {}, {}};

        for (const auto& f : ix.instances_of(cx("Facet"))) {
            FacetId id(f);
            if (model.facets.count(id))
                throw InputError("facet '" + f + "' declared by both " + model.facets.at(id).framework.str() + " and " +
                                 fid.str());
            Facet facet{id, local_name(f), fid, std::nullopt};
            if (auto n = at_most_one(ix, f, "name")) facet.name = n->value;
            if (auto p = at_most_one(ix, f, "subFacetOf")) facet.parent = FacetId(p->value);
            model.facets.emplace(id, facet);
            fw.facets.push_back(id);
        }
        for (const auto& l : ix.instances_of(cx("ComplianceLabel"))) {
            LabelId id(l);
            if (model.labels.count(id))
                throw InputError("label '" + l + "' declared by both " + model.labels.at(id).framework.str() + " and " +
                                 fid.str());
            auto facets = ix.objects(l, cx("inFacet"));
            if (facets.size() != 1) throw InputError(l + ": a label belongs to exactly one facet (cx:inFacet)");
            Label label{id, FacetId(facets.front().value), fid, {}};
            std::set<std::string> names;
            for (const auto& spec : ix.objects(l, cx("hasParameterSpec"))) {
                auto name = at_most_one(ix, spec.value, "parameterName");
                auto kind = at_most_one(ix, spec.value, "parameterKind");
                if (!name) throw InputError(l + ": parameter spec without cx:parameterName");
                std::optional<ValueKind> k = kind ? parameter_kind(*kind) : ValueKind::decimal;
                if (!k) throw InputError(l + ": unknown parameter kind '" + kind->value + "'");
                if (!names.insert(name->value).second) throw InputError(l + ": duplicate parameter '" + name->value + "'");
                label.parameters.push_back({name->value, *k});
            }
            model.labels.emplace(id, std::move(label));
            fw.labels.push_back(id);
        }
        model.frameworks.emplace(fid, std::move(fw));
        model.order.push_back(fid);
    }

    for (const auto& [id, facet] : model.facets)
        if (facet.parent && !model.facets.count(*facet.parent))
            throw InputError("facet '" + id.str() + "' has unknown parent facet '" + facet.parent->str() + "'");
    for (const auto& [id, label] : model.labels)
        if (!model.facets.count(label.facet))
            throw InputError("label '" + id.str() + "' is in unknown facet '" + label.facet.str() + "'");

    for (std::size_t i = 0; i < sources.size(); ++i) {
        Framework& fw = model.frameworks.at(model.order[i]);
        for (const auto& p : indexes[i].objects(fw.id.str(), cx("extends"))) {
            FrameworkId parent(p.value);
            if (!model.frameworks.count(parent))
                throw InputError("framework '" + fw.id.str() + "' extends unknown framework '" + p.value + "'");
            fw.parents.push_back(parent);
        }
        fw.declared_rules = extract_rules(indexes[i], fw.id, model);
    }
    return model;
}

std::vector<Rule> expand_facets(const std::vector<Rule>& rules, const Model& model) {
    std::vector<Rule> out;
    for (const auto& r : rules) {
        const auto* prop = std::get_if<PropagationRule>(&r.body);
        if (!prop || !prop->facet) {
            out.push_back(r);
            continue;
        }
        for (const auto& l : model.labels_in_facet(*prop->facet)) {
            Rule e = r;
            e.head = l;
            out.push_back(std::move(e));
        }
    }
    return out;
}

EffectiveRules resolve_effective_rules(const Model& model) {
    EffectiveRules out;
    // every rule declared by a framework or any of its ancestors, before override
    std::map<FrameworkId, std::map<std::string, Rule>> pool;
    std::map<FrameworkId, int> state; // 1 = in progress, 2 = done
    std::vector<FrameworkId> path;

    std::function<const std::map<std::string, Rule>&(const FrameworkId&)> resolve =
        [&](const FrameworkId& id) -> const std::map<std::string, Rule>& {
        if (state[id] == 2) return pool.at(id);
        if (state[id] == 1) {
            std::string msg = "inheritance cycle: [";
            auto start = std::find(path.begin(), path.end(), id);
            for (auto it = start; it != path.end(); ++it) msg += (it == start ? "" : ",") + it->str();
            throw InputError(msg + "]");
        }
        auto fit = model.frameworks.find(id);
        if (fit == model.frameworks.end()) throw InputError("unknown framework '" + id.str() + "'");
        state[id] = 1;
        path.push_back(id);

        std::vector<Rule> declared = expand_facets(fit->second.declared_rules, model);
        std::set<LabelId> heads;
        for (const auto& r : declared) heads.insert(r.head);
        std::map<std::string, Rule> rules, all;
        for (const auto& r : declared) {
            rules.emplace(r.key(), r);
            all.emplace(r.key(), r);
        }
        // ancestor closure: a grandparent's rule still arrives when the middle
        // framework overrode its head, only the child's own heads suppress it
        for (const auto& parent : fit->second.parents) {
            for (const auto& [k, r] : resolve(parent)) {
                all.emplace(k, r);
                if (!heads.count(r.head)) rules.emplace(k, r);
            }
        }

        EffectiveRuleSet set{id, {}};
        for (auto& [k, r] : rules) set.rules.push_back(std::move(r));
        out.emplace(id, std::move(set));
        path.pop_back();
        state[id] = 2;
        return pool.emplace(id, std::move(all)).first->second;
    };

    for (const auto& [id, fw] : model.frameworks) resolve(id);
    return out;
}

} // namespace complr
