// complr: command-line front end for the compliance inference engine.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "complr/compare.hpp"
#include "complr/errors.hpp"
#include "complr/fact_store.hpp"
#include "complr/inference_engine.hpp"
#include "complr/naming.hpp"
#include "complr/workspace.hpp"

#ifndef COMPLR_DEFAULT_FRAMEWORK_DIR
#define COMPLR_DEFAULT_FRAMEWORK_DIR "frameworks"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string framework_dir = COMPLR_DEFAULT_FRAMEWORK_DIR;
    std::vector<std::string> frameworks;
    std::vector<std::string> env;
    std::string format = "table";
};

struct RunOptions {
    std::string cache;
    bool strict_premises = false;
    bool semi_naive = false;
    bool timing = false;
    bool no_report = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--framework-dir", o.framework_dir, "Directory holding <name>/framework.toml bundles")
        ->capture_default_str();
    cmd->add_option("--frameworks", o.frameworks, "Frameworks to load (manifest ids; 'none' for zero; default all)")
        ->delimiter(',');
    cmd->add_option("--env", o.env, "Environment .ttl files or directories")->delimiter(',');
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "json"}))->capture_default_str();
}

void add_run(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--cache", o.cache, "Store cache file (reused when inputs are unchanged)");
    cmd->add_flag("--strict-premises", o.strict_premises, "Require rule triggers to be asserted under the rule's framework");
    cmd->add_flag("--semi-naive", o.semi_naive, "Delta-driven evaluation of simple and propagation rules");
    cmd->add_flag("--timing", o.timing, "Include wall time in the run report");
}

complr::LoadOptions load_options(const CommonOptions& c, const RunOptions* r) {
    complr::LoadOptions o;
    o.framework_dir = c.framework_dir;
    if (!c.frameworks.empty()) {
        if (c.frameworks.size() == 1 && c.frameworks.front() == "none")
            o.frameworks = std::vector<std::string>{};
        else
            o.frameworks = c.frameworks;
    }
    for (const auto& e : c.env) o.env_paths.emplace_back(e);
    if (r) o.strict_premises = r->strict_premises;
    return o;
}

struct Session {
    complr::Store store;
    complr::RunReport report;
    complr::Names names;
};

Session run_pipeline(const CommonOptions& common, const RunOptions& run) {
    if (common.env.empty()) throw UsageError("--env is required");
    complr::LoadOptions options = load_options(common, &run);
    std::string hash;
    if (!run.cache.empty()) {
        hash = complr::input_hash(options);
        if (fs::exists(run.cache)) {
            try {
                auto t0 = std::chrono::steady_clock::now();
                complr::Store store = complr::load_cache(run.cache, hash);
                complr::RunReport report;
                report.cache_hit = true;
                report.phases.push_back("cache: hit, load and iterate skipped");
                report.total_assertions = store.size();
                for (const auto& a : store.assertions()) report.ground_assertions += a.ground ? 1 : 0;
                auto it = store.metadata.find("universe_bound");
                if (it != store.metadata.end()) report.universe_bound = std::stoull(it->second);
                report.wall_time = std::chrono::steady_clock::now() - t0;
                complr::Names names(store.catalog.prefixes);
                return {std::move(store), std::move(report), std::move(names)};
            } catch (const complr::CacheError& e) {
                std::cerr << "warning: cache not used: " << e.what() << "\n";
            }
        }
    }

    auto t0 = std::chrono::steady_clock::now();
    complr::Workspace ws = complr::load_workspace(options);
    for (const auto& w : ws.warnings) std::cerr << "warning: " << w << "\n";
    ws.env.require_valid();
    complr::Store store = complr::seed_store(ws.env);
    complr::Engine engine(ws.model, ws.rules, {run.semi_naive, run.strict_premises});
    complr::RunReport report = engine.run(store);
    report.phases.insert(report.phases.begin(), "load: " + std::to_string(ws.manifests.size()) + " framework(s), " +
                                                    std::to_string(ws.env.containers().size()) + " container(s), " +
                                                    std::to_string(ws.env.scopes().size()) + " scope(s)");
    report.wall_time = std::chrono::steady_clock::now() - t0;
    for (const auto& w : store.warnings()) std::cerr << "warning: " << w << "\n";

    store.catalog = std::move(ws.catalog);
    store.declarations = std::move(ws.declarations);
    store.metadata["universe_bound"] = std::to_string(report.universe_bound);
    store.metadata["rounds"] = std::to_string(report.rounds);
    if (!run.cache.empty()) {
        complr::save_cache(store, run.cache, hash);
        report.phases.push_back("cache: written");
    }
    complr::Names names(store.catalog.prefixes);
    return {std::move(store), std::move(report), std::move(names)};
}

std::string framework_name(const complr::Store& store, const complr::Names& names, const complr::FrameworkId& f) {
    auto it = store.catalog.framework_names.find(f);
    return it != store.catalog.framework_names.end() ? it->second : names.compact(f.str());
}

std::string parameters_text(const complr::Parameters& params) {
    std::string out;
    for (const auto& [k, v] : params) out += (out.empty() ? "" : ";") + k + "=" + v.to_string();
    return out;
}

json parameters_json(const complr::Parameters& params) {
    json out = json::object();
    for (const auto& [k, v] : params) {
        std::visit([&](const auto& x) { out[k] = x; }, v.data);
    }
    return out;
}

struct Row {
    std::vector<std::string> cells;
    const complr::ComplianceAssertion* assertion;
};

std::vector<Row> assertion_rows(const Session& s, const std::vector<const complr::ComplianceAssertion*>& list) {
    std::vector<Row> rows;
    for (const auto* a : list)
        rows.push_back({{s.names.compact(a->container.str()), s.names.compact(a->label.str()),
                         s.names.compact(a->scope.str()), framework_name(s.store, s.names, a->framework),
                         a->ground ? "ground" : "derived", parameters_text(a->parameters)},
                        a});
    std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.cells < y.cells; });
    return rows;
}

void print_table(std::ostream& out, const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            s += cells[i];
            if (i + 1 < cells.size()) s += std::string(width[i] - cells[i].size() + 2, ' ');
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        out << s << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
}

void print_assertions(std::ostream& out, const Session& s, const std::vector<const complr::ComplianceAssertion*>& list,
                      const std::string& format) {
    auto rows = assertion_rows(s, list);
    if (format == "json") {
        for (const auto& r : rows) {
            json j{{"type", "assertion"},     {"container", r.cells[0]}, {"label", r.cells[1]},
                   {"scope", r.cells[2]},     {"framework", r.cells[3]}, {"status", r.cells[4]},
                   {"parameters", parameters_json(r.assertion->parameters)}};
            out << j.dump() << "\n";
        }
        return;
    }
    std::vector<std::vector<std::string>> cells;
    for (auto& r : rows) cells.push_back(r.cells);
    print_table(out, {"container", "label", "scope", "framework", "status", "parameters"}, cells);
}

void print_report(std::ostream& out, const complr::RunReport& r, const std::string& format, bool timing) {
    if (format == "json") {
        json j{{"type", "report"},
               {"rounds", r.rounds},
               {"new_per_round", r.new_per_round},
               {"ground_assertions", r.ground_assertions},
               {"total_assertions", r.total_assertions},
               {"universe_bound", r.universe_bound},
               {"cache_hit", r.cache_hit},
               {"phases", r.phases}};
        if (timing) j["wall_time_ms"] = std::chrono::duration<double, std::milli>(r.wall_time).count();
        out << j.dump() << "\n";
        return;
    }
    out << "\n# run report\n" << r.to_text(timing);
}

// --- id resolution -----------------------------------------------------------

template <class Map>
std::vector<std::string> keys_of(const Map& m) {
    std::vector<std::string> out;
    for (const auto& [k, v] : m) out.push_back(k.str());
    return out;
}

std::string resolve_container(const Session& s, const std::string& text) {
    return s.names.resolve(text, keys_of(s.store.env().containers()), "container");
}

std::string resolve_scope(const Session& s, const std::string& text) {
    return s.names.resolve(text, keys_of(s.store.env().scopes()), "scope");
}

std::string resolve_label(const Session& s, const std::string& text) {
    std::vector<std::string> labels = keys_of(s.store.catalog.label_facets);
    for (const auto& a : s.store.assertions())
        if (std::find(labels.begin(), labels.end(), a.label.str()) == labels.end()) labels.push_back(a.label.str());
    return s.names.resolve(text, labels, "label");
}

std::string resolve_framework(const Session& s, const std::string& text) {
    for (const auto& [iri, name] : s.store.catalog.framework_names)
        if (name == text) return iri.str();
    std::vector<std::string> fws = keys_of(s.store.catalog.framework_names);
    for (const auto& a : s.store.assertions())
        if (std::find(fws.begin(), fws.end(), a.framework.str()) == fws.end()) fws.push_back(a.framework.str());
    return s.names.resolve(text, fws, "framework");
}

// --- commands ------------------------------------------------------------------

int cmd_validate(const CommonOptions& common) {
    complr::LoadOptions options = load_options(common, nullptr);
    auto diags = complr::validate_inputs(options);
    if (common.format == "json") {
        for (const auto& d : diags) std::cout << json{{"type", "diagnostic"}, {"code", d.code}, {"message", d.message}}.dump() << "\n";
        std::cout << json{{"type", "summary"}, {"valid", diags.empty()}, {"diagnostics", diags.size()}}.dump() << "\n";
    } else {
        for (const auto& d : diags) std::cout << d.code << ": " << d.message << "\n";
        std::cout << (diags.empty() ? "valid" : std::to_string(diags.size()) + " problem(s)") << "\n";
    }
    return diags.empty() ? exit_ok : exit_failure;
}

int cmd_infer(const CommonOptions& common, const RunOptions& run) {
    Session s = run_pipeline(common, run);
    std::vector<const complr::ComplianceAssertion*> all;
    for (const auto& a : s.store.assertions()) all.push_back(&a);
    print_assertions(std::cout, s, all, common.format);
    if (!run.no_report) print_report(std::cout, s.report, common.format, run.timing);
    return exit_ok;
}

struct QueryOptions {
    std::string container, label, scope, framework;
    bool ground_only = false;
};

int cmd_query(const CommonOptions& common, const RunOptions& run, const QueryOptions& q) {
    if (q.container.empty() && q.label.empty() && q.scope.empty() && q.framework.empty() && !q.ground_only)
        throw UsageError("query needs at least one filter (--container, --label, --scope, --framework, --ground-only)");
    Session s = run_pipeline(common, run);
    // an id nobody knows cannot match anything: empty result, not an error
    auto lookup = [](auto&& fn, const std::string& text) -> std::optional<std::string> {
        if (text.empty()) return std::nullopt;
        try {
            return fn(text);
        } catch (const complr::NotFoundError&) {
            return std::string("\x01");
        }
    };
    auto c = lookup([&](const std::string& t) { return resolve_container(s, t); }, q.container);
    auto l = lookup([&](const std::string& t) { return resolve_label(s, t); }, q.label);
    auto g = lookup([&](const std::string& t) { return resolve_scope(s, t); }, q.scope);
    auto f = lookup([&](const std::string& t) { return resolve_framework(s, t); }, q.framework);
    std::vector<const complr::ComplianceAssertion*> hits;
    for (const auto& a : s.store.assertions()) {
        if (c && a.container.str() != *c) continue;
        if (l && a.label.str() != *l) continue;
        if (g && a.scope.str() != *g) continue;
        if (f && a.framework.str() != *f) continue;
        if (q.ground_only && !a.ground) continue;
        hits.push_back(&a);
    }
    print_assertions(std::cout, s, hits, common.format);
    return exit_ok;
}

int cmd_explain(const CommonOptions& common, const RunOptions& run, const QueryOptions& q) {
    if (q.container.empty() || q.label.empty() || q.scope.empty() || q.framework.empty())
        throw UsageError("explain needs --container, --label, --scope and --framework");
    Session s = run_pipeline(common, run);
    complr::AssertionKey key{complr::ContainerId(resolve_container(s, q.container)), complr::LabelId(resolve_label(s, q.label)),
                             complr::ScopeId(resolve_scope(s, q.scope)),
                             complr::FrameworkId(resolve_framework(s, q.framework))};
    auto compact = [&](const std::string& iri) {
        auto it = s.store.catalog.framework_names.find(complr::FrameworkId(iri));
        return it != s.store.catalog.framework_names.end() ? it->second : s.names.compact(iri);
    };
    auto tree = complr::explain(s.store, key, compact);
    if (common.format == "json") {
        std::function<json(const complr::ExplainNode&)> to_json = [&](const complr::ExplainNode& n) {
            json j{{"fact", n.fact}, {"how", n.how}, {"premises", json::array()}};
            for (const auto& p : n.premises) j["premises"].push_back(to_json(p));
            return j;
        };
        std::cout << to_json(tree).dump() << "\n";
    } else {
        std::cout << complr::render(tree);
    }
    return exit_ok;
}

int cmd_compare(const CommonOptions& common, const RunOptions& run, const std::vector<std::string>& containers,
                const std::vector<std::string>& scopes) {
    if (containers.empty()) throw UsageError("compare needs at least one --container");
    Session s = run_pipeline(common, run);

    std::vector<complr::FrameworkId> columns;
    if (!common.frameworks.empty() && common.frameworks.front() != "none") {
        for (const auto& f : common.frameworks) columns.emplace_back(resolve_framework(s, f));
    } else {
        for (const auto& [iri, name] : s.store.catalog.framework_names) columns.push_back(iri);
        std::sort(columns.begin(), columns.end(), [&](const auto& a, const auto& b) {
            return s.store.catalog.framework_names.at(a) < s.store.catalog.framework_names.at(b);
        });
    }

    std::vector<std::pair<complr::ContainerId, complr::ScopeId>> cases;
    for (const auto& c : containers) {
        complr::ContainerId d(resolve_container(s, c));
        if (scopes.empty()) {
            for (const auto& [gid, g] : s.store.env().scopes())
                if (g.visible.count(d)) cases.emplace_back(d, gid);
        } else {
            for (const auto& g : scopes) {
                complr::ScopeId gid(resolve_scope(s, g));
                if (!s.store.env().visible(gid, d))
                    throw complr::InputError("container " + c + " is not visible in scope " + g);
                cases.emplace_back(d, gid);
            }
        }
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> details;
    for (const auto& [d, g] : cases) {
        std::vector<std::string> row{s.names.compact(d.str()), s.names.compact(g.str())};
        for (const auto& f : columns) {
            auto v = complr::release_verdict(s.store, d, g, f);
            std::string fname = framework_name(s.store, s.names, f);
            std::vector<std::string> labels;
            for (const auto& l : v.controlled) labels.push_back(s.names.compact(l.str()));
            if (common.format == "json") {
                std::cout << json{{"type", "verdict"},       {"container", row[0]}, {"scope", row[1]},
                                  {"framework", fname},      {"suitable", v.suitable},
                                  {"controlled", labels}}
                                 .dump()
                          << "\n";
            }
            row.push_back(v.suitable ? "✓" : "✗");
            if (!v.suitable) {
                std::string line = "  " + row[0] + " @ " + row[1] + " [" + fname + "]:";
                for (const auto& l : labels) line += " " + l;
                details.push_back(line);
            }
        }
        rows.push_back(std::move(row));
    }
    if (common.format == "json") return exit_ok;

    std::vector<std::string> header{"container", "scope"};
    for (const auto& f : columns) header.push_back(framework_name(s.store, s.names, f));
    // the check marks are one column wide but three bytes long
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& r : rows)
        for (std::size_t i = 0; i < 2; ++i) width[i] = std::max(width[i], r[i].size());
    auto line = [&](const std::vector<std::string>& cells, bool marks) {
        std::string out;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            std::size_t shown = (marks && i >= 2) ? 1 : cells[i].size();
            out += cells[i];
            if (i + 1 < cells.size()) out += std::string(width[i] - shown + 2, ' ');
        }
        std::cout << out << "\n";
    };
    line(header, false);
    for (const auto& r : rows) line(r, true);
    if (!details.empty()) {
        std::cout << "\ncontrolled labels:\n";
        for (const auto& d : details) std::cout << d << "\n";
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"complr: context-dependent compliance classification of data containers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "complr 0.1.0");

    CommonOptions common;
    RunOptions run;
    QueryOptions query;
    std::vector<std::string> compare_containers, compare_scopes;

    auto* validate = app.add_subcommand("validate", "Check frameworks and environment for errors");
    add_common(validate, common);

    auto* infer = app.add_subcommand("infer", "Run inference to the fixed point and dump every assertion");
    add_common(infer, common);
    add_run(infer, run);
    infer->add_flag("--no-report", run.no_report, "Omit the run report");

    auto* q = app.add_subcommand("query", "Print assertions matching all given filters");
    add_common(q, common);
    add_run(q, run);
    q->add_option("--container", query.container, "Container id");
    q->add_option("--label", query.label, "Label id");
    q->add_option("--scope", query.scope, "Scope id");
    q->add_option("--framework", query.framework, "Framework (manifest id or IRI)");
    q->add_flag("--ground-only", query.ground_only, "Only ground assertions");

    auto* ex = app.add_subcommand("explain", "Show how an assertion was derived");
    add_common(ex, common);
    add_run(ex, run);
    ex->add_option("--container", query.container, "Container id")->required();
    ex->add_option("--label", query.label, "Label id")->required();
    ex->add_option("--scope", query.scope, "Scope id")->required();
    ex->add_option("--framework", query.framework, "Framework (manifest id or IRI)")->required();

    auto* cmp = app.add_subcommand("compare", "Release suitability per framework (container x scope rows)");
    add_common(cmp, common);
    add_run(cmp, run);
    cmp->add_option("--container", compare_containers, "Container id (repeatable)")->required();
    cmp->add_option("--scope", compare_scopes, "Scope id (repeatable; default every scope showing the container)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*validate) return cmd_validate(common);
        if (*infer) return cmd_infer(common, run);
        if (*q) return cmd_query(common, run, query);
        if (*ex) return cmd_explain(common, run, query);
        if (*cmp) return cmd_compare(common, run, compare_containers, compare_scopes);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const complr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_usage;
}
