#include "complr/workspace.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "complr/errors.hpp"
#include "complr/skolem.hpp"
#include "complr/stats_kanon.hpp"
#include "complr/vocab.hpp"

namespace complr {

namespace fs = std::filesystem;
using vocab::cx;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void hash_file(std::string& acc, const fs::path& path) {
    std::string content = read_file(path);
    acc += "F" + std::to_string(path.generic_string().size()) + ":" + path.generic_string();
    acc += std::to_string(content.size()) + ":" + content;
}

} // namespace

Document load_document(const fs::path& path) {
    Document d{path, skolemize(rdf::parse_document(read_file(path), path.string()))};
    return d;
}

std::vector<fs::path> environment_files(const std::vector<fs::path>& paths) {
    std::vector<fs::path> out;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".ttl") out.push_back(e.path());
        } else if (fs::is_regular_file(p)) {
            out.push_back(p);
        } else {
            throw InputError("environment path not found: " + p.string());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Manifest> selected_manifests(const LoadOptions& options) {
    auto all = discover_manifests(options.framework_dir);
    std::vector<Manifest> chosen = options.frameworks ? select_with_dependencies(all, *options.frameworks) : all;
    auto order = topo_order(chosen);
    std::vector<Manifest> out;
    for (const auto& id : order)
        for (const auto& m : chosen)
            if (m.id == id) out.push_back(m);
    return out;
}

std::string input_hash(const LoadOptions& options) {
    std::string acc = "complr-input-v1\n";
    acc += options.strict_premises ? "strict\n" : "lenient\n";
    for (const auto& m : selected_manifests(options)) {
        acc += "M" + m.id + "\n";
        hash_file(acc, m.directory / "framework.toml");
        for (const auto& f : m.model_files) hash_file(acc, m.directory / f);
    }
    std::set<fs::path> records;
    for (const auto& p : options.env_paths) {
        fs::path dir = fs::is_directory(p) ? p : p.parent_path();
        if (dir.empty()) dir = ".";
        auto add = [&](const fs::path& f) {
            if (f.extension() == ".csv") records.insert(f);
        };
        if (fs::is_directory(p)) {
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file()) add(e.path());
        } else if (fs::is_directory(dir)) {
            for (const auto& e : fs::directory_iterator(dir))
                if (e.is_regular_file()) add(e.path());
        }
    }
    for (const auto& f : environment_files(options.env_paths)) hash_file(acc, f);
    for (const auto& f : records) hash_file(acc, f);
    return sha256_hex(acc);
}

namespace {

class EnvironmentBuilder {
public:
    EnvironmentBuilder(const std::vector<Document>& docs, const Model& model, std::vector<std::string>& warnings)
        : docs_(docs), model_(model), warnings_(warnings) {
        for (const auto& d : docs) {
            ix_.add(d.graph);
            for (const auto& t : d.graph.triples) origin_.emplace(t.subject.value, d.path.string());
        }
    }

    Environment run() {
        containers();
        structure();
        scopes();
        assertions();
        containments();
        statistics();
        return std::move(env_);
    }

private:
    const std::vector<Document>& docs_;
    const Model& model_;
    std::vector<std::string>& warnings_;
    rdf::GraphIndex ix_;
    std::map<std::string, std::string> origin_; ///< subject -> first document declaring it
    Environment env_;

    // error context: the document, plus the node when it has a readable name
    std::string at(const std::string& node) const {
        auto it = origin_.find(node);
        std::string where = it != origin_.end() ? it->second : "<environment>";
        if (node.rfind(std::string(skolem_namespace), 0) == 0) return where + ": anonymous node " + node.substr(skolem_namespace.size(), 12);
        return where + ": " + node;
    }

    void containers() {
        for (const char* type : {"DataContainer", "Database", "Table", "Column", "Field"})
            for (const auto& c : ix_.instances_of(cx(type))) env_.add_container(ContainerId(c));
    }

    ContainerId container(const rdf::Term& t, const std::string& context) {
        ContainerId id(t.value);
        if (!t.is_iri() || !env_.has_container(id))
            throw InputError(context + ": undeclared container '" + t.value + "' (declare it as cx:DataContainer)");
        return id;
    }

    ScopeId scope(const rdf::Term& t, const std::string& context) {
        ScopeId id(t.value);
        if (!t.is_iri() || !env_.has_scope(id))
            throw InputError(context + ": undeclared scope '" + t.value + "' (declare it as cx:GovernanceScope)");
        return id;
    }

    void structure() {
        for (const auto& p : ix_.subjects_with(cx("contains"))) {
            ContainerId parent = container(rdf::Term::iri(p), p);
            for (const auto& c : ix_.objects(p, cx("contains"))) env_.add_containment(parent, container(c, p));
        }
        for (const auto& a : ix_.subjects_with(cx("joinableWith"))) {
            ContainerId left = container(rdf::Term::iri(a), a);
            for (const auto& b : ix_.objects(a, cx("joinableWith"))) env_.add_joinable(left, container(b, a));
        }
    }

    void scopes() {
        auto ids = ix_.instances_of(cx("GovernanceScope"));
        for (const auto& g : ids) env_.add_scope(ScopeId(g));
        for (const auto& g : ids)
            for (const auto& c : ix_.objects(g, cx("includesContainer"))) env_.add_visible(ScopeId(g), container(c, g));
    }

    // A ground assertion may target `<scope>#config` without declaring it.
    ContainerId subject(const rdf::Term& t, const ScopeId& g, const std::string& context) {
        if (t.is_iri() && t.value == vocab::config_container(g.str())) {
            ContainerId id(t.value);
            env_.add_container(id);
            env_.add_visible(g, id);
            return id;
        }
        return container(t, context);
    }

    Value parameter_value(const LabelId& label, const std::string& name, const rdf::Term& t, const std::string& context) {
        if (!t.is_literal()) throw InputError(context + ": parameter '" + name + "' must have a literal value");
        Value v = t.to_value();
        const Label* l = model_.find_label(label);
        if (!l) return v;
        auto spec = std::find_if(l->parameters.begin(), l->parameters.end(), [&](const auto& p) { return p.name == name; });
        if (spec == l->parameters.end()) {
            warnings_.push_back(context + ": label " + label.str() + " declares no parameter '" + name + "'");
            return v;
        }
        if (spec->kind == v.kind()) return v;
        if (spec->kind == ValueKind::decimal && v.kind() == ValueKind::integer) return Value(v.as_decimal());
        throw InputError(context + ": parameter '" + name + "' of " + label.str() + " expects " +
                         std::string(to_string(spec->kind)) + ", found " + std::string(to_string(v.kind())));
    }

    void assertions() {
        for (const auto& n : ix_.instances_of(cx("ComplianceAssertion"))) {
            auto ons = ix_.objects(n, cx("assertedOn"));
            auto labels = ix_.objects(n, cx("assertsLabel"));
            auto scopes = ix_.objects(n, cx("assertedInScope"));
            auto fws = ix_.objects(n, cx("byFramework"));
            if (ons.empty() || labels.empty() || scopes.empty())
                throw InputError(at(n) + ": assertion needs cx:assertedOn, cx:assertsLabel and cx:assertedInScope");
            if (fws.size() > 1) throw InputError(at(n) + ": at most one cx:byFramework");
            for (const auto& lt : labels) {
                if (!lt.is_iri()) throw InputError(at(n) + ": cx:assertsLabel must name a label");
                LabelId label(lt.value);
                const Label* known = model_.find_label(label);
                FrameworkId fw;
                if (!fws.empty()) {
                    fw = FrameworkId(fws.front().value);
                    if (!known)
                        warnings_.push_back(at(n) + ": label " + label.str() + " is not declared by a loaded framework");
                    if (!model_.frameworks.count(fw))
                        warnings_.push_back(at(n) + ": framework " + fw.str() + " is not loaded");
                } else if (known) {
                    fw = known->framework;
                } else {
                    throw InputError(at(n) + ": label '" + label.str() +
                                     "' is not declared by a loaded framework; add cx:byFramework to attribute it");
                }
                Parameters params;
                for (const auto& p : ix_.objects(n, cx("hasParameter"))) {
                    auto name = ix_.objects(p.value, cx("parameterName"));
                    auto value = ix_.objects(p.value, cx("parameterValue"));
                    if (name.size() != 1 || value.size() != 1)
                        throw InputError(at(n) + ": parameter needs one cx:parameterName and one cx:parameterValue");
                    params[name.front().value] = parameter_value(label, name.front().value, value.front(), n);
                }
                for (const auto& gt : scopes) {
                    ScopeId g = scope(gt, n);
                    for (const auto& ct : ons) {
                        ContainerId d = subject(ct, g, n);
                        if (!env_.visible(g, d))
                            throw InputError(at(n) + ": container " + d.str() + " is not visible in scope " + g.str());
                        env_.ground.push_back(ComplianceAssertion{d, label, g, fw, true, params});
                    }
                }
            }
        }
    }

    void containments() {
        for (const auto& n : ix_.instances_of(cx("ContainmentAssertion"))) {
            auto ons = ix_.objects(n, cx("assertedOn"));
            auto labels = ix_.objects(n, cx("assertsLabel"));
            auto scopes = ix_.objects(n, cx("assertedInScope"));
            if (ons.empty() || labels.empty() || scopes.empty())
                throw InputError(at(n) + ": containment assertion needs cx:assertedOn, cx:assertsLabel and cx:assertedInScope");
            for (const auto& gt : scopes) {
                ScopeId g = scope(gt, n);
                for (const auto& ct : ons) {
                    ContainerId d = container(ct, n);
                    if (!env_.visible(g, d))
                        throw InputError(at(n) + ": container " + d.str() + " is not visible in scope " + g.str());
                    for (const auto& lt : labels) env_.ground_containments.push_back({d, LabelId(lt.value), g, true});
                }
            }
        }
    }

    void statistics() {
        for (const auto& doc : docs_) {
            rdf::GraphIndex local(doc.graph);
            for (const auto& c : local.subjects_with(cx("hasStatisticalAnalysis"))) {
                ContainerId d = container(rdf::Term::iri(c), c);
                for (const auto& node : local.objects(c, cx("hasStatisticalAnalysis"))) {
                    auto files = local.objects(node.value, cx("recordFile"));
                    if (files.size() != 1 || !files.front().is_literal())
                        throw InputError(at(c) + ": statistical analysis needs one cx:recordFile string");
                    std::vector<std::string> qis;
                    for (const auto& q : local.objects(node.value, cx("quasiIdentifiers"))) {
                        if (q.is_list())
                            for (const auto& i : q.items) qis.push_back(i.value);
                        else
                            qis.push_back(q.value);
                    }
                    fs::path file = doc.path.parent_path() / files.front().value;
                    RecordTable table = read_record_table(file, d, qis);
                    for (const auto& [gid, g] : env_.scopes())
                        if (g.visible.count(d))
                            env_.ground.push_back(emit_analysis(table, gid, FrameworkId(vocab::base_framework())));
                }
            }
        }
    }
};

} // namespace

Environment build_environment(const std::vector<Document>& documents, const Model& model,
                              std::vector<std::string>& warnings) {
    return EnvironmentBuilder(documents, model, warnings).run();
}

Catalog make_catalog(const Model& model, const std::vector<Manifest>& manifests,
                     const std::vector<const rdf::Graph*>& graphs) {
    Catalog c;
    for (const auto& [id, label] : model.labels) c.label_facets[id] = model.facet_chain(id);
    for (const auto& m : manifests) c.framework_names[FrameworkId(m.iri)] = m.id;
    c.prefixes["cx"] = std::string(vocab::core_ns);
    for (const auto* g : graphs)
        for (const auto& [p, ns] : g->prefixes)
            if (!p.empty()) c.prefixes.emplace(p, ns);
    return c;
}

Workspace load_workspace(const LoadOptions& options) {
    Workspace ws;
    ws.manifests = selected_manifests(options);
    std::vector<FrameworkSource> sources;
    std::vector<Document> framework_docs;
    for (const auto& m : ws.manifests) {
        FrameworkSource src{m, {}};
        src.graph.base = m.id;
        std::set<rdf::Triple> seen;
        for (const auto& f : m.model_files) {
            Document d = load_document(m.directory / f);
            for (const auto& t : d.graph.triples)
                if (seen.insert(t).second) src.graph.triples.push_back(t);
            for (const auto& [p, ns] : d.graph.prefixes) src.graph.prefixes.emplace(p, ns);
            framework_docs.push_back(std::move(d));
        }
        if (!m.construct_files.empty())
            ws.warnings.push_back("framework '" + m.id + "': construct files are not supported and were ignored");
        sources.push_back(std::move(src));
    }
    ws.model = build_model(sources);
    ws.rules = resolve_effective_rules(ws.model);

    std::vector<Document> env_docs;
    for (const auto& f : environment_files(options.env_paths)) env_docs.push_back(load_document(f));
    ws.env = build_environment(env_docs, ws.model, ws.warnings);

    std::set<rdf::Triple> seen;
    std::vector<const rdf::Graph*> graphs;
    for (const auto* docs : {&framework_docs, &env_docs})
        for (const auto& d : *docs) {
            graphs.push_back(&d.graph);
            for (const auto& t : d.graph.triples)
                if (seen.insert(t).second) ws.declarations.triples.push_back(t);
        }
    ws.catalog = make_catalog(ws.model, ws.manifests, graphs);
    return ws;
}

std::vector<Diagnostic> validate_inputs(const LoadOptions& options) {
    std::vector<Diagnostic> out;
    try {
        Workspace ws = load_workspace(options);
        auto env = ws.env.validate();
        out.insert(out.end(), env.begin(), env.end());
    } catch (const SyntaxError& e) {
        out.push_back({"syntax", e.what()});
    } catch (const SkolemizationError& e) {
        out.push_back({"skolemization", e.what()});
    } catch (const Error& e) {
        out.push_back({"input", e.what()});
    }
    return out;
}

} // namespace complr
