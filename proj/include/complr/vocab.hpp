#pragma once

#include <string>
#include <string_view>

// Core declaration vocabulary. Every term lives under one namespace,
// conventionally bound to the `cx:` prefix in declaration files.
namespace complr::vocab {

inline constexpr std::string_view core_ns = "urn:complr:core#";
inline constexpr std::string_view base_ns = "urn:complr:base#";

inline std::string cx(std::string_view local) { return std::string(core_ns) + std::string(local); }

// Well-known Base terms used by the engine itself.
inline std::string base_framework() { return std::string(base_ns) + "BaseFramework"; }
inline std::string kanonymity_label() { return std::string(base_ns) + "KAnonymityAnalysis"; }
inline std::string control_facet() { return std::string(base_ns) + "Control"; }
inline constexpr std::string_view cohort_parameter = "minimumCohortSize";

/// Per-scope configuration container consulted for threshold parameters.
inline std::string config_container(const std::string& scope) { return scope + "#config"; }

} // namespace complr::vocab
