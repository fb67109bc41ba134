#include "fixtures.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "complr/vocab.hpp"

namespace complr::testing {

namespace fs = std::filesystem;

fs::path source_dir() { return COMPLR_SOURCE_DIR; }
fs::path framework_dir() { return source_dir() / "frameworks"; }
fs::path scenario(const std::string& name) { return source_dir() / "scenarios" / name; }
fs::path cli_binary() { return COMPLR_CLI_PATH; }

TempDir::TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("complr-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

fs::path TempDir::write(const std::string& relative, const std::string& text) const {
    fs::path p = path_ / relative;
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

Run run_inputs(const std::vector<fs::path>& env, std::optional<std::vector<std::string>> frameworks,
               EngineOptions options) {
    LoadOptions lo;
    lo.framework_dir = framework_dir();
    lo.frameworks = std::move(frameworks);
    lo.env_paths = env;
    lo.strict_premises = options.strict_premises;
    Workspace ws = load_workspace(lo);
    auto [store, report] = run_to_fixed_point(ws.env, ws.model, ws.rules, options);
    store.catalog = ws.catalog;
    return {std::move(ws), std::move(store), std::move(report)};
}

ContainerId hc(const std::string& local) { return ContainerId("urn:complr:scenario:healthcare#" + local); }
ScopeId hc_scope(const std::string& local) { return ScopeId("urn:complr:scenario:healthcare#" + local); }
LabelId base_label(const std::string& local) { return LabelId(std::string(vocab::base_ns) + local); }
LabelId label(const std::string& ns, const std::string& local) { return LabelId("urn:complr:" + ns + "#" + local); }

FrameworkId framework(const std::string& id) {
    static const std::map<std::string, std::string> iris{
        {"base", "urn:complr:base#BaseFramework"},
        {"hipaa", "urn:complr:hipaa#HIPAAFramework"},
        {"hipaa-safe-harbor", "urn:complr:hipaa-sh#HIPAASafeHarborFramework"},
        {"hipaa-expert-determination", "urn:complr:hipaa-ed#HIPAAExpertDeterminationFramework"},
        {"gdpr", "urn:complr:gdpr#GDPRFramework"},
        {"ema", "urn:complr:ema#EMAFramework"},
        {"italian-dpa", "urn:complr:itdpa#ItalianDPAFramework"},
    };
    return FrameworkId(iris.at(id));
}

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

Command run_cli(const std::string& args) {
    TempDir tmp;
    fs::path out = tmp.path() / "out", err = tmp.path() / "err";
    std::string cmd = "'" + cli_binary().string() + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    int raw = std::system(cmd.c_str());
    Command c;
    c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    c.out = slurp(out);
    c.err = slurp(err);
    return c;
}

} // namespace complr::testing
