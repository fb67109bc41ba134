#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "complr/condition_eval.hpp"
#include "complr/fact_store.hpp"
#include "complr/framework_resolver.hpp"
#include "complr/metamodel.hpp"

namespace complr {

struct EngineOptions {
    bool semi_naive = false;      ///< simple/propagation rules only look at the previous round's delta
    bool strict_premises = false; ///< simple/conditional triggers must be asserted under the rule's framework
};

struct RunReport {
    std::size_t rounds = 0;
    std::vector<std::size_t> new_per_round;
    std::size_t ground_assertions = 0;
    std::size_t total_assertions = 0;
    std::uint64_t universe_bound = 0; ///< |D|·|L|·|G|·|F|
    std::chrono::nanoseconds wall_time{0};
    bool cache_hit = false;
    std::vector<std::string> phases; ///< phase log, in execution order

    /// `key: value` lines; wall time only when `with_timing`.
    std::string to_text(bool with_timing) const;
};

/// Store seeded with A₀: every ground assertion and ground containment of `env`.
Store seed_store(const Environment& env);

class Engine {
public:
    Engine(const Model& model, EffectiveRules rules, EngineOptions options = {});

    /// One application of T against a snapshot of the store (all rule
    /// instances see the same state; new facts are committed together).
    /// Returns the number of assertions added.
    std::size_t step(Store& store);

    /// Iterates step() until a round adds nothing.
    RunReport run(Store& store);

    const EffectiveRules& rules() const { return rules_; }
    std::uint64_t universe_bound(const Store& store) const;

private:
    const Model& model_;
    EffectiveRules rules_;
    EngineOptions options_;
    std::size_t round_ = 0;
    std::size_t delta_begin_ = 0; ///< assertions from this index on were added by the previous round
};

/// Validates `env`, seeds A₀ and runs to the least fixed point.
std::pair<Store, RunReport> run_to_fixed_point(const Environment& env, const Model& model, const EffectiveRules& rules,
                                               EngineOptions options = {});

/// Moves `container` and its descendants visible in `from` into `to`,
/// copying their ground assertions (never derived ones). Returns the number
/// of assertions copied that were new in `to`.
std::size_t release(Store& store, const ContainerId& container, const ScopeId& from, const ScopeId& to);

struct ExplainNode {
    std::string fact;   ///< rendered assertion key or premise note
    std::string how;    ///< "ground", rule description, or premise kind
    std::vector<ExplainNode> premises;
};

/// Derivation tree of an assertion down to ground facts.
/// Throws NotFoundError for an unknown key.
ExplainNode explain(const Store& store, const AssertionKey& key,
                    const std::function<std::string(const std::string&)>& compact = {});

/// Indented text form of an explanation tree.
std::string render(const ExplainNode& node);

} // namespace complr
