#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "complr/metamodel.hpp"

// Declaration documents: a Turtle subset covering @prefix/PREFIX, prefixed
// names, <iri>, `a`, anonymous [ ... ] nodes, _:labels, ( ... ) collections,
// string/integer/decimal/boolean literals, and ; , lists.
namespace complr::rdf {

inline constexpr std::string_view rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

enum class TermKind { iri, blank, literal, list };

struct Term {
    TermKind kind = TermKind::iri;
    std::string value;                            ///< IRI, blank handle, or literal lexical form
    ValueKind literal_kind = ValueKind::string;   ///< literals only
    std::vector<Term> items;                      ///< lists only

    static Term iri(std::string v) { return {TermKind::iri, std::move(v), ValueKind::string, {}}; }
    static Term blank(std::string v) { return {TermKind::blank, std::move(v), ValueKind::string, {}}; }
    static Term literal(std::string lexical, ValueKind kind) { return {TermKind::literal, std::move(lexical), kind, {}}; }
    static Term list(std::vector<Term> items) { return {TermKind::list, {}, ValueKind::string, std::move(items)}; }

    bool is_iri() const { return kind == TermKind::iri; }
    bool is_blank() const { return kind == TermKind::blank; }
    bool is_literal() const { return kind == TermKind::literal; }
    bool is_list() const { return kind == TermKind::list; }

    /// Typed value of a literal term; throws InputError for non-literals.
    Value to_value() const;
};

bool operator==(const Term& a, const Term& b);
bool operator<(const Term& a, const Term& b);
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

struct Triple {
    Term subject;
    std::string predicate;
    Term object;
};

bool operator==(const Triple& a, const Triple& b);
bool operator<(const Triple& a, const Triple& b);

struct Graph {
    std::string base;                              ///< source document id
    std::vector<Triple> triples;                   ///< in document order
    std::map<std::string, std::string> prefixes;   ///< prefix -> namespace, as declared
};

/// Parses `text`; errors are SyntaxError with base/line/column.
Graph parse_document(std::string_view text, const std::string& base);

/// Writes `graph` back as Turtle using full IRIs and `_:bN` blank labels.
std::string serialize(const Graph& graph);

/// Subject -> (predicate, object) index over a graph.
class GraphIndex {
public:
    GraphIndex() = default;
    explicit GraphIndex(const Graph& graph);
    void add(const Graph& graph);

    /// Objects of (subject, predicate) in insertion order.
    std::vector<Term> objects(const std::string& subject, std::string_view predicate) const;
    const std::vector<std::pair<std::string, Term>>& properties(const std::string& subject) const;
    /// Subjects having `rdf:type type`, sorted.
    std::vector<std::string> instances_of(std::string_view type) const;
    /// Subjects carrying `predicate`, sorted.
    std::vector<std::string> subjects_with(std::string_view predicate) const;
    bool has(const std::string& subject) const { return props_.count(subject) != 0; }

private:
    std::map<std::string, std::vector<std::pair<std::string, Term>>> props_;
};

} // namespace complr::rdf
