#include "complr/compare.hpp"

#include <algorithm>
#include <set>

#include "complr/vocab.hpp"

namespace complr {

std::vector<LabelId> controlled_labels(const Catalog& catalog) {
    const FacetId control(vocab::control_facet());
    std::vector<LabelId> out;
    for (const auto& [label, chain] : catalog.label_facets)
        if (std::find(chain.begin(), chain.end(), control) != chain.end()) out.push_back(label);
    return out;
}

Verdict release_verdict(const Store& store, const ContainerId& container, const ScopeId& scope,
                        const FrameworkId& framework) {
    auto controlled = controlled_labels(store.catalog);
    std::set<LabelId> wanted(controlled.begin(), controlled.end());
    Verdict v{container, scope, framework, true, {}};
    std::set<LabelId> found;
    for (std::size_t i : store.by_container(container)) {
        const auto& a = store.assertions()[i];
        if (a.scope == scope && a.framework == framework && wanted.count(a.label)) found.insert(a.label);
    }
    v.controlled.assign(found.begin(), found.end());
    v.suitable = v.controlled.empty();
    return v;
}

} // namespace complr
