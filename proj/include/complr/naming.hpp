#pragma once

#include <map>
#include <string>
#include <vector>

namespace complr {

/// Prefix table for writing IRIs compactly and reading user-supplied ids.
class Names {
public:
    explicit Names(std::map<std::string, std::string> prefixes = {});

    /// `prefix:local` for the longest matching namespace, else the IRI itself.
    std::string compact(const std::string& iri) const;

    /// Accepts a full IRI, a `prefix:local` name, or a bare local name that
    /// is unique among `candidates`. Throws NotFoundError (unknown) or
    /// InputError (ambiguous).
    std::string resolve(const std::string& text, const std::vector<std::string>& candidates,
                        const std::string& what) const;

private:
    std::map<std::string, std::string> prefixes_;
};

} // namespace complr
