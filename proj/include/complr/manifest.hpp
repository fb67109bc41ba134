#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "complr/metamodel.hpp"

namespace complr {

/// Contents of a `framework.toml`.
///
///     [framework]
///     id = "gdpr"                               # required, short name
///     iri = "urn:complr:gdpr#GDPRFramework"     # required, framework resource
///     kind = "privacy"                          # internal | core | privacy | custom
///     dependencies = ["base"]
///
///     [inputs]
///     models = ["model/gdpr.ttl"]
///     constructs = []
struct Manifest {
    std::string id;
    std::string iri;
    FrameworkKind kind = FrameworkKind::custom;
    std::string description;
    std::vector<std::string> dependencies;
    std::vector<std::string> model_files;
    std::vector<std::string> construct_files;
    std::filesystem::path directory; ///< set by discovery; model paths are relative to it
};

Manifest parse_manifest(std::string_view text, const std::string& source = "framework.toml");

/// Dependency order: every framework after its dependencies, ties broken
/// by kind (internal < core < privacy < custom) and then by id.
std::vector<std::string> topo_order(const std::vector<Manifest>& manifests);

/// Reads every `<root>/<name>/framework.toml`.
std::vector<Manifest> discover_manifests(const std::filesystem::path& root);

/// `wanted` plus their transitive dependencies; throws on unknown names.
std::vector<Manifest> select_with_dependencies(const std::vector<Manifest>& all, const std::vector<std::string>& wanted);

} // namespace complr
