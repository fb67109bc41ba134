#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "complr/fact_store.hpp"
#include "complr/framework_resolver.hpp"
#include "complr/manifest.hpp"
#include "complr/metamodel.hpp"
#include "complr/turtle.hpp"

namespace complr {

struct LoadOptions {
    std::filesystem::path framework_dir;
    std::optional<std::vector<std::string>> frameworks; ///< manifest ids; nullopt = every bundle
    std::vector<std::filesystem::path> env_paths;       ///< files or directories of .ttl
    bool strict_premises = false;
};

/// A parsed declaration document.
struct Document {
    std::filesystem::path path;
    rdf::Graph graph; ///< skolemized
};

struct Workspace {
    std::vector<Manifest> manifests; ///< dependency order
    Model model;
    EffectiveRules rules;
    Environment env;
    rdf::Graph declarations; ///< every framework and environment triple
    Catalog catalog;
    std::vector<std::string> warnings;
};

/// Parses and skolemizes one document.
Document load_document(const std::filesystem::path& path);

/// Environment .ttl files named by `paths` (directories are searched
/// recursively), sorted.
std::vector<std::filesystem::path> environment_files(const std::vector<std::filesystem::path>& paths);

/// Manifests selected by the options, in dependency order.
std::vector<Manifest> selected_manifests(const LoadOptions& options);

/// SHA-256 over every input the options name: the selected manifests and
/// their model files, the environment files, record files next to them,
/// and the options themselves. Cheap enough to compute before a cache load.
std::string input_hash(const LoadOptions& options);

/// Builds the environment (D, G, A₀, ⊏, ⋈) from environment documents.
/// Statistical-analysis directives are computed here and added to A₀.
Environment build_environment(const std::vector<Document>& documents, const Model& model,
                              std::vector<std::string>& warnings);

Catalog make_catalog(const Model& model, const std::vector<Manifest>& manifests,
                     const std::vector<const rdf::Graph*>& graphs);

/// Full load: frameworks, rules, environment. Does not validate the
/// environment invariants (see Environment::validate).
Workspace load_workspace(const LoadOptions& options);

/// Every problem found while loading, as diagnostics instead of exceptions.
std::vector<Diagnostic> validate_inputs(const LoadOptions& options);

} // namespace complr
