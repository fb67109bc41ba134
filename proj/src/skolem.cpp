#include "complr/skolem.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <map>
#include <set>

#include "complr/errors.hpp"

namespace complr {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

namespace {

void put(std::string& out, std::string_view s) {
    out += std::to_string(s.size());
    out += ':';
    out += s;
}

char kind_tag(ValueKind k) {
    switch (k) {
    case ValueKind::integer: return 'i';
    case ValueKind::decimal: return 'd';
    case ValueKind::string: return 's';
    case ValueKind::boolean: return 'b';
    }
    return '?';
}

class Skolemizer {
public:
    explicit Skolemizer(const rdf::Graph& g) : graph_(g) {
        for (const auto& t : g.triples) {
            note_blanks(t.subject);
            note_blanks(t.object);
            if (t.subject.is_blank()) props_[t.subject.value].emplace_back(t.predicate, t.object);
        }
    }

    rdf::Graph run() {
        for (const auto& b : blanks_) hash_of(b);
        rdf::Graph out;
        out.base = graph_.base;
        out.prefixes = graph_.prefixes;
        std::set<rdf::Triple> seen;
        for (const auto& t : graph_.triples) {
            rdf::Triple r{replace(t.subject), t.predicate, replace(t.object)};
            if (seen.insert(r).second) out.triples.push_back(std::move(r));
        }
        return out;
    }

private:
    const rdf::Graph& graph_;
    std::set<std::string> blanks_;
    std::map<std::string, std::vector<std::pair<std::string, rdf::Term>>> props_;
    std::map<std::string, std::string> hashes_;
    std::vector<std::string> in_progress_;

    void note_blanks(const rdf::Term& t) {
        if (t.is_blank()) blanks_.insert(t.value);
        for (const auto& i : t.items) note_blanks(i);
    }

    std::string canonical_object(const rdf::Term& t) {
        std::string out;
        switch (t.kind) {
        case rdf::TermKind::iri: out += 'I'; put(out, t.value); break;
        case rdf::TermKind::literal:
            out += 'L';
            out += kind_tag(t.literal_kind);
            put(out, t.value);
            break;
        case rdf::TermKind::blank: out += 'B'; put(out, hash_of(t.value)); break;
        case rdf::TermKind::list:
            out += 'T';
            out += std::to_string(t.items.size());
            out += '[';
            for (const auto& i : t.items) put(out, canonical_object(i));
            out += ']';
            break;
        }
        return out;
    }

    const std::string& hash_of(const std::string& blank) {
        if (auto it = hashes_.find(blank); it != hashes_.end()) return it->second;
        if (std::find(in_progress_.begin(), in_progress_.end(), blank) != in_progress_.end()) {
            auto start = std::find(in_progress_.begin(), in_progress_.end(), blank);
            std::string msg = graph_.base + ": cycle among anonymous nodes:";
            for (auto it = start; it != in_progress_.end(); ++it) msg += " " + *it;
            throw SkolemizationError(msg);
        }
        in_progress_.push_back(blank);
        std::vector<std::pair<std::string, std::string>> pairs;
        for (const auto& [p, o] : props_[blank]) pairs.emplace_back(p, canonical_object(o));
        in_progress_.pop_back();
        std::string iri = std::string(skolem_namespace) + sha256_hex(canonical_signature(pairs));
        return hashes_.emplace(blank, std::move(iri)).first->second;
    }

    rdf::Term replace(const rdf::Term& t) {
        if (t.is_blank()) return rdf::Term::iri(hashes_.at(t.value));
        if (t.is_list()) {
            std::vector<rdf::Term> items;
            for (const auto& i : t.items) items.push_back(replace(i));
            return rdf::Term::list(std::move(items));
        }
        return t;
    }
};

} // namespace

std::string canonical_signature(const std::vector<std::pair<std::string, std::string>>& predicate_objects) {
    std::vector<std::string> entries;
    for (const auto& [p, o] : predicate_objects) {
        std::string e;
        put(e, p);
        put(e, o);
        entries.push_back(std::move(e));
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
    std::string sig = "N" + std::to_string(entries.size()) + "{";
    for (const auto& e : entries) put(sig, e);
    return sig + "}";
}

rdf::Graph skolemize(const rdf::Graph& graph) { return Skolemizer(graph).run(); }

} // namespace complr
