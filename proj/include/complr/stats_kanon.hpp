#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "complr/metamodel.hpp"

namespace complr {

struct RecordTable {
    ContainerId container;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> quasi_identifiers;

    /// Throws InputError on ragged rows or unknown quasi-identifiers.
    void validate() const;
};

/// RFC 4180-style CSV: `,` separator, `"` quoting with `""` escapes,
/// header row required. Returns header followed by data rows.
std::vector<std::vector<std::string>> parse_csv(std::string_view text, const std::string& source = "<csv>");

RecordTable read_record_table(const std::filesystem::path& path, ContainerId container,
                              std::vector<std::string> quasi_identifiers);

/// Minimum group size after partitioning rows by their (trimmed)
/// quasi-identifier values. Throws EvaluationError for an empty table.
std::size_t compute_k(const RecordTable& table);

/// Ground KAnonymityAnalysis assertion for the table's container in `scope`,
/// attributed to `framework`, with minimumCohortSize = compute_k(table).
ComplianceAssertion emit_analysis(const RecordTable& table, const ScopeId& scope, const FrameworkId& framework);

} // namespace complr
