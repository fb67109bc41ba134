#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "complr/fact_store.hpp"
#include "complr/framework_resolver.hpp"
#include "complr/metamodel.hpp"

namespace complr::testing {

struct OracleResult {
    std::set<AssertionKey> facts;
    std::size_t rounds = 0; ///< applications of T, the last one adding nothing
};

/// Naive saturation straight from the one-step derivability rules: every
/// round enumerates all (d, l, g, f) candidates against the previous set,
/// with containment and relations recomputed by brute force. No marking,
/// no indexes, nothing shared with the engine beyond the input types.
OracleResult naive_saturation(const Environment& env, const EffectiveRules& rules);

/// Brute-force relation kind(x, y) from the parent pointers alone.
bool brute_relation(RelationKind kind, const ContainerId& x, const ContainerId& y, const Environment& env);

/// A random small instance: environment, model and the model's rules.
struct Instance {
    Environment env;
    Model model;
    EffectiveRules rules;
    std::uint64_t universe = 0; ///< |D|·|L|·|G|·|F|
};

struct InstanceLimits {
    int containers = 8;
    int labels = 10;
    int scopes = 2;
    int frameworks = 3;
    int rules = 12;
    int ground = 14;
};

Instance random_instance(std::mt19937_64& rng, const InstanceLimits& limits = {});

/// Extra random ground assertions for `inst` (never on the parameter label,
/// so extensional comparison inputs stay fixed).
std::vector<ComplianceAssertion> random_ground(std::mt19937_64& rng, const Instance& inst, int count);

/// Label ids of an instance: "urn:t#L0".. plus the parameter label.
LabelId label_id(int i);
LabelId stat_label();

std::set<AssertionKey> keys_of(const Store& store);

} // namespace complr::testing
