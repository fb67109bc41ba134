#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "complr/metamodel.hpp"
#include "complr/turtle.hpp"

namespace complr {

/// One premise of a recorded derivation.
struct Premise {
    enum class Kind { assertion, ground_containment, parameter };
    Kind kind = Kind::assertion;
    AssertionKey key;  ///< assertion premises; containment premises use container/label/scope
    std::string note;  ///< parameter premises: "label.param = value (source)"
};

/// First derivation of an assertion: the rule instance and its premises.
struct Derivation {
    FrameworkId framework;
    std::string rule;
    FrameworkId rule_declared_by;
    std::size_t round = 0;
    std::vector<Premise> premises;
};

/// Vocabulary facts the CLI needs after a cache hit (no model is loaded then).
struct Catalog {
    std::map<LabelId, std::vector<FacetId>> label_facets;
    std::map<FrameworkId, std::string> framework_names;
    std::map<std::string, std::string> prefixes;
};

/// Assertions, containments and condition evaluations over one environment,
/// with lookup indexes. Set semantics throughout.
class Store {
public:
    Store() = default;
    explicit Store(Environment env) : env_(std::move(env)) {}

    const Environment& env() const { return env_; }
    Environment& env() { return env_; }

    rdf::Graph declarations;
    Catalog catalog;
    std::map<std::string, std::string> metadata;

    // -- compliance assertions ------------------------------------------------

    /// True iff the assertion was new. Duplicates merge parameters: missing
    /// names are added, conflicting values keep the first and add a warning.
    bool insert_assertion(const ComplianceAssertion& a);

    std::size_t size() const { return assertions_.size(); }
    const std::vector<ComplianceAssertion>& assertions() const { return assertions_; }
    const ComplianceAssertion* find(const AssertionKey& key) const;
    bool contains(const AssertionKey& key) const { return find(key) != nullptr; }

    /// l ∈ [d]_g under any framework.
    bool has_label(const ContainerId& d, const LabelId& l, const ScopeId& g) const;
    /// Frameworks under which l ∈_f [d]_g, sorted.
    std::vector<FrameworkId> frameworks_for(const ContainerId& d, const LabelId& l, const ScopeId& g) const;

    const std::vector<std::size_t>& by_container(const ContainerId& id) const;
    const std::vector<std::size_t>& by_label(const LabelId& id) const;
    const std::vector<std::size_t>& by_scope(const ScopeId& id) const;
    const std::vector<std::size_t>& by_framework(const FrameworkId& id) const;

    /// Assertions sorted by (container, label, scope, framework).
    std::vector<ComplianceAssertion> sorted_assertions() const;

    // -- containment ------------------------------------------------------------

    /// Adds (d,l,g) for every strict ancestor d of an asserted container,
    /// visible in g. Returns the number added by this call.
    std::size_t materialize_containment();
    void insert_containment(const ContainmentAssertion& c);
    bool contains_label(const ContainerId& d, const LabelId& l, const ScopeId& g) const;
    std::vector<ContainmentAssertion> containments() const;

    // -- condition evaluations ---------------------------------------------------

    /// Records an outcome; a true result is never overwritten by false.
    void record_evaluation(const ConditionEvaluation& e);
    std::optional<bool> evaluation(const ConditionId& c, const ContainerId& d, const ScopeId& g) const;
    std::vector<ConditionEvaluation> evaluations() const;

    // -- provenance ----------------------------------------------------------------

    void record_derivation(const AssertionKey& key, Derivation d);
    const Derivation* derivation(const AssertionKey& key) const;
    const std::map<AssertionKey, Derivation>& derivations() const { return derivations_; }

    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Forces the next materialize_containment() to rescan every assertion
    /// (needed after visibility changes).
    void invalidate_containment() { materialized_upto_ = 0; }

    /// Logical equality of assertion, containment and evaluation sets.
    bool same_facts(const Store& other) const;

private:
    using LabelAt = std::tuple<ContainerId, LabelId, ScopeId>;
    struct LabelAtHash {
        std::size_t operator()(const LabelAt& k) const noexcept;
    };

    Environment env_;
    std::vector<ComplianceAssertion> assertions_;
    std::unordered_map<AssertionKey, std::size_t> index_;
    std::unordered_map<LabelAt, std::vector<std::size_t>, LabelAtHash> label_at_;
    std::map<ContainerId, std::vector<std::size_t>> by_container_;
    std::map<LabelId, std::vector<std::size_t>> by_label_;
    std::map<ScopeId, std::vector<std::size_t>> by_scope_;
    std::map<FrameworkId, std::vector<std::size_t>> by_framework_;
    std::map<LabelAt, bool> containments_; ///< value: ground
    std::map<std::tuple<ConditionId, ContainerId, ScopeId>, bool> evaluations_;
    std::map<AssertionKey, Derivation> derivations_;
    std::vector<std::string> warnings_;
    std::size_t materialized_upto_ = 0;
};

inline constexpr std::uint32_t cache_format_version = 1;

/// Length-prefixed binary record stream:
///   "CMPLRSTO" | u32 version | u32 len + input hash (hex) | records... | end record
/// where each record is u8 tag | u32 field count | (u32 len + bytes)*.
void save_cache(const Store& store, const std::filesystem::path& path, const std::string& input_hash);

/// Throws CacheError on a version mismatch, a stale input hash, or a corrupt file.
Store load_cache(const std::filesystem::path& path, const std::string& expected_input_hash);

} // namespace complr
