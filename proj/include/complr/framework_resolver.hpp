#pragma once

#include <map>
#include <vector>

#include "complr/manifest.hpp"
#include "complr/metamodel.hpp"
#include "complr/turtle.hpp"

namespace complr {

/// One framework's manifest and its (skolemized, merged) model documents.
struct FrameworkSource {
    Manifest manifest;
    rdf::Graph graph;
};

struct EffectiveRuleSet {
    FrameworkId framework;
    std::vector<Rule> rules; ///< sorted by Rule::key(); each carries declared_by/declaration
};

using EffectiveRules = std::map<FrameworkId, EffectiveRuleSet>;

/// Builds (X, L, F, ≺) from framework sources given in dependency order.
/// Vocabulary is collected from every source before any rule is extracted,
/// so rules may refer to labels of frameworks loaded later.
Model build_model(const std::vector<FrameworkSource>& sources);

/// Rules declared by `framework` in `index`. Labels and facets must already
/// be present in `vocabulary`.
std::vector<Rule> extract_rules(const rdf::GraphIndex& index, const FrameworkId& framework, const Model& vocabulary);

/// Facet propagation rules replaced by one rule per label in the facet
/// (sub-facets included); other rules are returned unchanged.
std::vector<Rule> expand_facets(const std::vector<Rule>& rules, const Model& model);

/// R_f = declared(f) ∪ { r declared by any ancestor of f : head(r) not declared by f }.
/// Ancestors are the transitive closure of parents; only f's own heads
/// override, and rules reached by two paths are kept once (Rule::key).
/// Throws InputError on an inheritance cycle or an unknown parent.
EffectiveRules resolve_effective_rules(const Model& model);

} // namespace complr
