#include "complr/inference_engine.hpp"

#include <regex>
#include <set>
#include <sstream>

#include "complr/errors.hpp"

namespace complr {

std::string RunReport::to_text(bool with_timing) const {
    std::ostringstream out;
    out << "rounds: " << rounds << "\n";
    out << "new_per_round: [";
    for (std::size_t i = 0; i < new_per_round.size(); ++i) out << (i ? ", " : "") << new_per_round[i];
    out << "]\n";
    out << "ground_assertions: " << ground_assertions << "\n";
    out << "total_assertions: " << total_assertions << "\n";
    out << "universe_bound: " << universe_bound << "\n";
    out << "cache_hit: " << (cache_hit ? "true" : "false") << "\n";
    for (const auto& p : phases) out << "phase: " << p << "\n";
    if (with_timing) out << "wall_time_ms: " << std::chrono::duration<double, std::milli>(wall_time).count() << "\n";
    return out.str();
}

Store seed_store(const Environment& env) {
    Store store(env);
    for (auto a : env.ground) {
        a.ground = true;
        store.insert_assertion(a);
    }
    for (auto c : env.ground_containments) {
        c.ground = true;
        store.insert_containment(c);
    }
    return store;
}

Engine::Engine(const Model& model, EffectiveRules rules, EngineOptions options)
    : model_(model), rules_(std::move(rules)), options_(options) {}

std::uint64_t Engine::universe_bound(const Store& store) const {
    std::set<LabelId> labels;
    std::set<FrameworkId> frameworks;
    for (const auto& [id, l] : model_.labels) labels.insert(id);
    for (const auto& [id, f] : model_.frameworks) frameworks.insert(id);
    for (const auto& a : store.assertions()) {
        labels.insert(a.label);
        frameworks.insert(a.framework);
    }
    const auto& env = store.env();
    return static_cast<std::uint64_t>(env.containers().size()) * labels.size() * env.scopes().size() * frameworks.size();
}

std::size_t Engine::step(Store& store) {
    ++round_;
    const Environment& env = store.env();
    const std::size_t end = store.size();
    const std::size_t delta_from = options_.semi_naive ? delta_begin_ : 0;

    // containment, then marking and evaluation of the marked rule conditions
    store.materialize_containment();
    MarkSet marks = mark(store, rules_, options_.strict_premises);
    std::set<ConditionId> rule_conditions;
    for (const auto& [fid, set] : rules_)
        for (const auto& r : set.rules) {
            if (const auto* c = std::get_if<ConditionalRule>(&r.body)) rule_conditions.insert(c->condition.id);
            if (const auto* p = std::get_if<PureImplicationRule>(&r.body)) rule_conditions.insert(p->condition.id);
        }
    std::map<Mark, EvaluationResult> results;
    for (const auto& m : marks.pending) {
        if (!rule_conditions.count(m.condition)) continue;
        results.emplace(m, evaluate_detail(*marks.conditions.at(m.condition), m.container, m.scope, store));
    }
    auto truth = [&](const Condition& c, const ContainerId& d, const ScopeId& g) -> const EvaluationResult* {
        auto it = results.find({c.id, d, g});
        return it != results.end() && it->second.result ? &it->second : nullptr;
    };

    // derivation against the snapshot; first proposal per key wins
    std::map<AssertionKey, Derivation> fresh;
    auto propose = [&](const AssertionKey& key, const Rule& rule, std::vector<Premise> premises) {
        if (store.contains(key) || fresh.count(key)) return;
        fresh.emplace(key, Derivation{key.framework, describe(rule), rule.declared_by, round_, std::move(premises)});
    };
    auto premise = [](const ComplianceAssertion& a) { return Premise{Premise::Kind::assertion, a.key(), ""}; };

    std::vector<FrameworkId> order = model_.ordered_frameworks();
    for (const auto& [fid, set] : rules_)
        if (std::find(order.begin(), order.end(), fid) == order.end()) order.push_back(fid);

    for (const auto& fid : order) {
        auto it = rules_.find(fid);
        if (it == rules_.end()) continue;
        for (const auto& rule : it->second.rules) {
            std::visit(
                [&](const auto& body) {
                    using T = std::decay_t<decltype(body)>;
                    if constexpr (std::is_same_v<T, SimpleRule>) {
                        for (std::size_t i : store.by_label(body.from)) {
                            if (i < delta_from || i >= end) continue;
                            const auto& a = store.assertions()[i];
                            if (options_.strict_premises && a.framework != fid) continue;
                            propose({a.container, rule.head, a.scope, fid}, rule, {premise(a)});
                        }
                    } else if constexpr (std::is_same_v<T, ConditionalRule>) {
                        for (std::size_t i : store.by_label(body.from)) {
                            if (i >= end) continue;
                            const auto& a = store.assertions()[i];
                            if (options_.strict_premises && a.framework != fid) continue;
                            if (const auto* r = truth(body.condition, a.container, a.scope)) {
                                std::vector<Premise> ps{premise(a)};
                                ps.insert(ps.end(), r->witnesses.begin(), r->witnesses.end());
                                propose({a.container, rule.head, a.scope, fid}, rule, std::move(ps));
                            }
                        }
                    } else if constexpr (std::is_same_v<T, PureImplicationRule>) {
                        for (const auto& [gid, scope] : env.scopes())
                            for (const auto& d : scope.visible)
                                if (const auto* r = truth(body.condition, d, gid))
                                    propose({d, rule.head, gid, fid}, rule, r->witnesses);
                    } else {
                        for (std::size_t i : store.by_label(rule.head)) {
                            if (i < delta_from || i >= end) continue;
                            const auto& a = store.assertions()[i];
                            if (a.framework != fid) continue;
                            for (const auto& t : env.related(body.relation, a.container))
                                if (env.visible(a.scope, t)) propose({t, rule.head, a.scope, fid}, rule, {premise(a)});
                        }
                    }
                },
                rule.body);
        }
    }

    // commit
    for (const auto& [m, r] : results)
        for (const auto& e : r.records) store.record_evaluation(e);
    for (auto& [key, d] : fresh) {
        store.insert_assertion(ComplianceAssertion{key.container, key.label, key.scope, key.framework, false, {}});
        store.record_derivation(key, std::move(d));
    }
    delta_begin_ = end;
    return fresh.size();
}

RunReport Engine::run(Store& store) {
    auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    round_ = 0;
    delta_begin_ = 0;
    report.universe_bound = universe_bound(store);
    for (const auto& a : store.assertions()) report.ground_assertions += a.ground ? 1 : 0;
    report.phases.push_back("index: " + std::to_string(store.size()) + " assertions");
    while (true) {
        std::size_t before_containments = store.containments().size();
        std::size_t n = step(store);
        ++report.rounds;
        report.new_per_round.push_back(n);
        report.phases.push_back("iterate round " + std::to_string(report.rounds) + ": containment +" +
                                std::to_string(store.containments().size() - before_containments) + ", derived +" +
                                std::to_string(n));
        if (n == 0) break;
        if (report.rounds > report.universe_bound + 1)
            throw Error("no fixed point after " + std::to_string(report.rounds) + " rounds (bound exceeded)");
    }
    store.materialize_containment();
    report.total_assertions = store.size();
    report.wall_time = std::chrono::steady_clock::now() - t0;
    return report;
}

std::pair<Store, RunReport> run_to_fixed_point(const Environment& env, const Model& model, const EffectiveRules& rules,
                                               EngineOptions options) {
    env.require_valid();
    Store store = seed_store(env);
    Engine engine(model, rules, options);
    RunReport report = engine.run(store);
    return {std::move(store), std::move(report)};
}

std::size_t release(Store& store, const ContainerId& container, const ScopeId& from, const ScopeId& to) {
    Environment& env = store.env();
    if (!env.has_container(container)) throw NotFoundError("unknown container " + container.str());
    if (!env.has_scope(from)) throw NotFoundError("unknown scope " + from.str());
    if (!env.has_scope(to)) throw NotFoundError("unknown scope " + to.str());
    if (!env.visible(from, container))
        throw InputError("container " + container.str() + " is not visible in scope " + from.str());
    if (from == to) return 0;

    std::vector<ContainerId> moved{container};
    for (const auto& d : env.descendants(container))
        if (env.visible(from, d)) moved.push_back(d);
    for (const auto& d : moved) env.add_visible(to, d);

    std::vector<ComplianceAssertion> copies;
    for (const auto& d : moved)
        for (std::size_t i : store.by_container(d)) {
            const auto& a = store.assertions()[i];
            if (!a.ground || a.scope != from) continue;
            ComplianceAssertion c = a;
            c.scope = to;
            copies.push_back(std::move(c));
        }
    std::vector<ContainmentAssertion> containment_copies;
    for (const auto& c : store.containments())
        if (c.ground && c.scope == from && std::find(moved.begin(), moved.end(), c.container) != moved.end())
            containment_copies.push_back({c.container, c.label, to, true});

    std::size_t added = 0;
    for (const auto& c : copies) added += store.insert_assertion(c) ? 1 : 0;
    for (const auto& c : containment_copies) store.insert_containment(c);
    store.invalidate_containment();
    store.materialize_containment();
    return added;
}

namespace {

std::string key_text(const AssertionKey& k, const std::function<std::string(const std::string&)>& c) {
    return "(" + c(k.container.str()) + ", " + c(k.label.str()) + ", " + c(k.scope.str()) + ", " +
           c(k.framework.str()) + ")";
}

// rewrites every IRI inside free text (rule descriptions, parameter notes)
std::string compact_text(const std::string& text, const std::function<std::string(const std::string&)>& c) {
    static const std::regex iri(R"([A-Za-z][A-Za-z0-9+.\-]*:[^\s()\[\],<>]+)");
    std::string out;
    auto last = text.cbegin();
    for (std::sregex_iterator it(text.begin(), text.end(), iri), end; it != end; ++it) {
        out.append(last, text.cbegin() + it->position());
        out += c(it->str());
        last = text.cbegin() + it->position() + it->length();
    }
    out.append(last, text.cend());
    return out;
}

ExplainNode build(const Store& store, const AssertionKey& key, const std::function<std::string(const std::string&)>& c) {
    ExplainNode node{key_text(key, c), "", {}};
    const auto* a = store.find(key);
    if (!a) {
        node.how = "missing";
        return node;
    }
    if (a->ground) {
        node.how = "ground";
        return node;
    }
    const auto* d = store.derivation(key);
    if (!d) {
        node.how = "derived (no provenance recorded)";
        return node;
    }
    node.how = "round " + std::to_string(d->round) + ": " + compact_text(d->rule, c) + " [declared by " + c(d->rule_declared_by.str()) + "]";
    for (const auto& p : d->premises) {
        switch (p.kind) {
        case Premise::Kind::assertion: node.premises.push_back(build(store, p.key, c)); break;
        case Premise::Kind::ground_containment:
            node.premises.push_back(ExplainNode{"contains(" + c(p.key.container.str()) + ", " + c(p.key.label.str()) +
                                                    ", " + c(p.key.scope.str()) + ")",
                                                "ground containment", {}});
            break;
        case Premise::Kind::parameter: {
            ExplainNode param{compact_text(p.note, c), "parameter", {}};
            if (!p.key.container.empty()) param.premises.push_back(build(store, p.key, c));
            node.premises.push_back(std::move(param));
            break;
        }
        }
    }
    return node;
}

void render_into(const ExplainNode& n, std::size_t depth, std::string& out) {
    out += std::string(depth * 2, ' ') + n.fact + "  <- " + n.how + "\n";
    for (const auto& p : n.premises) render_into(p, depth + 1, out);
}

} // namespace

ExplainNode explain(const Store& store, const AssertionKey& key, const std::function<std::string(const std::string&)>& compact) {
    auto ident = [](const std::string& s) { return s; };
    const std::function<std::string(const std::string&)> c = compact ? compact : ident;
    if (!store.contains(key)) throw NotFoundError("no such assertion: " + key_text(key, c));
    return build(store, key, c);
}

std::string render(const ExplainNode& node) {
    std::string out;
    render_into(node, 0, out);
    return out;
}

} // namespace complr
