#pragma once

#include <string>
#include <string_view>

#include "complr/turtle.hpp"

namespace complr {

inline constexpr std::string_view skolem_namespace = "urn:complr:sk:";

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Replaces every anonymous node with `urn:complr:sk:<sha256>` where the hash
/// is taken over the node's canonical signature: its (predicate, object)
/// pairs, sorted, with nested anonymous objects replaced by their own hash,
/// lists kept in order and literals tagged with their kind. Duplicate
/// triples collapse. Throws SkolemizationError on cycles among anonymous nodes.
rdf::Graph skolemize(const rdf::Graph& graph);

/// Canonical byte signature of an anonymous node given the hashes already
/// assigned to its anonymous children. Exposed for tests.
std::string canonical_signature(const std::vector<std::pair<std::string, std::string>>& predicate_objects);

} // namespace complr
