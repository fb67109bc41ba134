#pragma once

#include <string>
#include <vector>

#include "complr/fact_store.hpp"
#include "complr/metamodel.hpp"

namespace complr {

/// Release suitability of one container in one scope under one framework.
struct Verdict {
    ContainerId container;
    ScopeId scope;
    FrameworkId framework;
    bool suitable = true;
    std::vector<LabelId> controlled; ///< controlled labels asserted under the framework, sorted
};

/// Labels whose facet is the Base Control facet or one of its sub-facets.
std::vector<LabelId> controlled_labels(const Catalog& catalog);

/// Suitable iff no controlled label is asserted on the container in the
/// scope under the framework.
Verdict release_verdict(const Store& store, const ContainerId& container, const ScopeId& scope,
                        const FrameworkId& framework);

} // namespace complr
