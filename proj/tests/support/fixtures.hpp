#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "complr/fact_store.hpp"
#include "complr/inference_engine.hpp"
#include "complr/workspace.hpp"

namespace complr::testing {

std::filesystem::path source_dir();
std::filesystem::path framework_dir();
std::filesystem::path scenario(const std::string& name);
std::filesystem::path cli_binary();

/// Directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path write(const std::string& relative, const std::string& text) const;

private:
    std::filesystem::path path_;
};

struct Run {
    Workspace ws;
    Store store;
    RunReport report;
};

/// Loads frameworks and environment and runs to the fixed point; the
/// store carries the catalog like the CLI's does.
Run run_inputs(const std::vector<std::filesystem::path>& env, std::optional<std::vector<std::string>> frameworks = {},
               EngineOptions options = {});

/// Shorthands for ids in the bundled namespaces.
ContainerId hc(const std::string& local);
ScopeId hc_scope(const std::string& local);
LabelId base_label(const std::string& local);
FrameworkId framework(const std::string& manifest_id);
LabelId label(const std::string& ns, const std::string& local);

/// Result of running the CLI binary.
struct Command {
    int status = -1;
    std::string out;
    std::string err;
};

Command run_cli(const std::string& args);

} // namespace complr::testing
