#include "complr/turtle.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "complr/errors.hpp"

namespace complr::rdf {

Value Term::to_value() const {
    if (!is_literal()) throw InputError("expected a literal, found '" + value + "'");
    switch (literal_kind) {
    case ValueKind::integer: return Value(static_cast<std::int64_t>(std::stoll(value)));
    case ValueKind::decimal: return Value(std::stod(value));
    case ValueKind::boolean: return Value(value == "true");
    case ValueKind::string: return Value(value);
    }
    return Value(value);
}

bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.value == b.value && (a.kind != TermKind::literal || a.literal_kind == b.literal_kind) &&
           a.items == b.items;
}

bool operator<(const Term& a, const Term& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.value != b.value) return a.value < b.value;
    if (a.kind == TermKind::literal && a.literal_kind != b.literal_kind) return a.literal_kind < b.literal_kind;
    return std::lexicographical_compare(a.items.begin(), a.items.end(), b.items.begin(), b.items.end());
}

bool operator==(const Triple& a, const Triple& b) {
    return a.subject == b.subject && a.predicate == b.predicate && a.object == b.object;
}

bool operator<(const Triple& a, const Triple& b) {
    if (a.subject != b.subject) return a.subject < b.subject;
    if (a.predicate != b.predicate) return a.predicate < b.predicate;
    return a.object < b.object;
}

namespace {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || (c & 0x80); }
bool is_name_char(char c) { return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-'; }

class Parser {
public:
    Parser(std::string_view text, const std::string& base) : text_(text) { graph_.base = base; }

    Graph run() {
        skip_ws();
        while (!at_end()) {
            statement();
            skip_ws();
        }
        return std::move(graph_);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    Graph graph_;
    std::size_t anon_ = 0;

    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(graph_.base, line_, col_, what); }
    [[noreturn]] void fail_at(std::size_t line, std::size_t col, const std::string& what) const {
        throw SyntaxError(graph_.base, line, col, what);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

    char get() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws() {
        while (!at_end()) {
            char c = peek();
            if (c == '#') {
                while (!at_end() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'" + found());
        get();
    }

    std::string found() const {
        if (at_end()) return ", found end of input";
        return std::string(", found '") + peek() + "'";
    }

    bool starts_with_word(std::string_view w) const {
        if (text_.substr(pos_, w.size()) != w) return false;
        char after = peek(w.size());
        return !is_name_char(after) && after != ':';
    }

    void statement() {
        if (peek() == '@') {
            if (text_.substr(pos_, 7) == "@prefix") {
                for (int i = 0; i < 7; ++i) get();
                prefix_directive();
                expect('.');
                return;
            }
            fail("unsupported directive");
        }
        if (starts_with_word("PREFIX") || starts_with_word("prefix")) {
            for (int i = 0; i < 6; ++i) get();
            prefix_directive();
            return;
        }
        triples();
        expect('.');
    }

    void prefix_directive() {
        skip_ws();
        std::string prefix;
        while (!at_end() && peek() != ':') {
            if (!is_name_char(peek()) && peek() != '.') fail("malformed prefix name");
            prefix += get();
        }
        if (at_end()) fail("expected ':' in prefix declaration");
        get();
        skip_ws();
        if (peek() != '<') fail("expected <iri> in prefix declaration" + found());
        graph_.prefixes[prefix] = iriref();
    }

    std::string iriref() {
        std::size_t l = line_, c = col_;
        get(); // <
        std::string out;
        while (!at_end() && peek() != '>') {
            char ch = get();
            if (ch == '\n' || ch == ' ') fail_at(l, c, "unterminated IRI");
            out += ch;
        }
        if (at_end()) fail_at(l, c, "unterminated IRI");
        get();
        return out;
    }

    std::string prefixed_name() {
        std::size_t l = line_, c = col_;
        std::string prefix;
        while (!at_end() && peek() != ':') {
            if (!is_name_char(peek()) && !(peek() == '.' && is_name_char(peek(1)))) fail("malformed prefixed name" + found());
            prefix += get();
        }
        if (at_end()) fail_at(l, c, "malformed prefixed name");
        get(); // ':'
        std::string local;
        while (!at_end()) {
            char ch = peek();
            if (is_name_char(ch) || ch == ':') {
                local += get();
            } else if (ch == '.' && (is_name_char(peek(1)) || peek(1) == ':')) {
                local += get();
            } else {
                break;
            }
        }
        auto it = graph_.prefixes.find(prefix);
        if (it == graph_.prefixes.end()) fail_at(l, c, "undefined prefix '" + prefix + "'");
        return it->second + local;
    }

    Term iri_term() {
        if (peek() == '<') return Term::iri(iriref());
        return Term::iri(prefixed_name());
    }

    Term fresh_blank() { return Term::blank("_:#" + std::to_string(anon_++)); }

    Term blank_label() {
        get();
        get(); // _:
        std::string label;
        while (!at_end() && (is_name_char(peek()) || (peek() == '.' && is_name_char(peek(1))))) label += get();
        if (label.empty()) fail("empty blank node label");
        return Term::blank("_:" + label);
    }

    void triples() {
        skip_ws();
        if (peek() == '[') {
            Term node = bracket_node();
            skip_ws();
            if (peek() != '.') predicate_object_list(node);
            return;
        }
        Term subject = subject_term();
        skip_ws();
        predicate_object_list(subject);
    }

    Term subject_term() {
        char c = peek();
        if (c == '_' && peek(1) == ':') return blank_label();
        if (c == '<' || c == ':' || is_name_start(c)) {
            if (starts_with_word("a")) fail("'a' cannot be a subject");
            return iri_term();
        }
        if (c == '(') fail("collections are not supported as subjects");
        fail("expected subject" + found());
    }

    Term bracket_node() {
        get(); // [
        Term node = fresh_blank();
        skip_ws();
        if (peek() == ']') {
            get();
            return node;
        }
        predicate_object_list(node);
        expect(']');
        return node;
    }

    void predicate_object_list(const Term& subject) {
        for (;;) {
            skip_ws();
            std::string predicate = verb();
            object_list(subject, predicate);
            skip_ws();
            if (peek() != ';') break;
            while (peek() == ';') {
                get();
                skip_ws();
            }
            if (peek() == '.' || peek() == ']' || at_end()) break;
        }
    }

    std::string verb() {
        if (starts_with_word("a")) {
            get();
            return std::string(rdf_type);
        }
        char c = peek();
        if (c == '<' || c == ':' || is_name_start(c)) return iri_term().value;
        fail("expected predicate" + found());
    }

    void object_list(const Term& subject, const std::string& predicate) {
        for (;;) {
            skip_ws();
            Term obj = object();
            graph_.triples.push_back({subject, predicate, std::move(obj)});
            skip_ws();
            if (peek() != ',') break;
            get();
        }
    }

    Term object() {
        char c = peek();
        if (c == '[') return bracket_node();
        if (c == '(') return collection();
        if (c == '"' || c == '\'') return string_literal();
        if (std::isdigit(static_cast<unsigned char>(c)) || ((c == '+' || c == '-' || c == '.') && peek(1) != '\0'))
            if (std::isdigit(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(peek(1))) ||
                (peek(1) == '.' && std::isdigit(static_cast<unsigned char>(peek(2)))))
                return numeric_literal();
        if (c == '_' && peek(1) == ':') return blank_label();
        if (starts_with_word("true")) {
            for (int i = 0; i < 4; ++i) get();
            return Term::literal("true", ValueKind::boolean);
        }
        if (starts_with_word("false")) {
            for (int i = 0; i < 5; ++i) get();
            return Term::literal("false", ValueKind::boolean);
        }
        if (c == '<' || c == ':' || is_name_start(c)) return iri_term();
        fail("expected object" + found());
    }

    Term collection() {
        get(); // (
        std::vector<Term> items;
        for (;;) {
            skip_ws();
            if (at_end()) fail("unterminated collection");
            if (peek() == ')') {
                get();
                break;
            }
            items.push_back(object());
        }
        return Term::list(std::move(items));
    }

    Term string_literal() {
        std::size_t l = line_, c = col_;
        char quote = get();
        std::string out;
        for (;;) {
            if (at_end()) fail_at(l, c, "malformed literal: unterminated string");
            char ch = get();
            if (ch == quote) break;
            if (ch == '\n') fail_at(l, c, "malformed literal: newline in string");
            if (ch == '\\') {
                if (at_end()) fail_at(l, c, "malformed literal: dangling escape");
                char e = get();
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\'': out += '\''; break;
                case '\\': out += '\\'; break;
                default: fail_at(line_, col_ - 2, std::string("malformed literal: unknown escape \\") + e);
                }
            } else {
                out += ch;
            }
        }
        if (peek() == '^' && peek(1) == '^') fail("malformed literal: datatype tags are not supported");
        if (peek() == '@') fail("malformed literal: language tags are not supported");
        return Term::literal(std::move(out), ValueKind::string);
    }

    Term numeric_literal() {
        std::size_t l = line_, c = col_;
        std::string out;
        if (peek() == '+' || peek() == '-') out += get();
        bool decimal = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) out += get();
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            decimal = true;
            out += get();
            while (std::isdigit(static_cast<unsigned char>(peek()))) out += get();
        }
        if (peek() == 'e' || peek() == 'E') {
            decimal = true;
            out += get();
            if (peek() == '+' || peek() == '-') out += get();
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail_at(l, c, "malformed literal: bad exponent");
            while (std::isdigit(static_cast<unsigned char>(peek()))) out += get();
        }
        if (out.empty() || out == "+" || out == "-") fail_at(l, c, "malformed literal");
        if (is_name_char(peek()) || (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))
            fail_at(l, c, "malformed literal '" + out + peek() + "'");
        if (out[0] == '+') out.erase(0, 1);
        return Term::literal(out, decimal ? ValueKind::decimal : ValueKind::integer);
    }
};

void write_term(std::ostream& out, const Term& t, const std::map<std::string, std::string>& blank_names) {
    switch (t.kind) {
    case TermKind::iri: out << '<' << t.value << '>'; break;
    case TermKind::blank: out << blank_names.at(t.value); break;
    case TermKind::literal:
        if (t.literal_kind == ValueKind::string) {
            out << '"';
            for (char c : t.value) {
                switch (c) {
                case '"': out << "\\\""; break;
                case '\\': out << "\\\\"; break;
                case '\n': out << "\\n"; break;
                case '\t': out << "\\t"; break;
                case '\r': out << "\\r"; break;
                default: out << c;
                }
            }
            out << '"';
        } else if (t.literal_kind == ValueKind::decimal && t.value.find_first_of(".eE") == std::string::npos) {
            out << t.value << ".0";
        } else {
            out << t.value;
        }
        break;
    case TermKind::list:
        out << "(";
        for (const auto& item : t.items) {
            out << ' ';
            write_term(out, item, blank_names);
        }
        out << " )";
        break;
    }
}

void collect_blanks(const Term& t, std::map<std::string, std::string>& names) {
    if (t.is_blank() && !names.count(t.value)) names.emplace(t.value, "_:b" + std::to_string(names.size()));
    for (const auto& i : t.items) collect_blanks(i, names);
}

} // namespace

Graph parse_document(std::string_view text, const std::string& base) { return Parser(text, base).run(); }

std::string serialize(const Graph& graph) {
    std::map<std::string, std::string> names;
    for (const auto& t : graph.triples) {
        collect_blanks(t.subject, names);
        collect_blanks(t.object, names);
    }
    std::ostringstream out;
    for (const auto& t : graph.triples) {
        write_term(out, t.subject, names);
        out << " <" << t.predicate << "> ";
        write_term(out, t.object, names);
        out << " .\n";
    }
    return out.str();
}

GraphIndex::GraphIndex(const Graph& graph) { add(graph); }

void GraphIndex::add(const Graph& graph) {
    for (const auto& t : graph.triples) {
        auto& props = props_[t.subject.value];
        std::pair<std::string, Term> entry{t.predicate, t.object};
        if (std::find(props.begin(), props.end(), entry) == props.end()) props.push_back(std::move(entry));
    }
}

std::vector<Term> GraphIndex::objects(const std::string& subject, std::string_view predicate) const {
    std::vector<Term> out;
    auto it = props_.find(subject);
    if (it == props_.end()) return out;
    for (const auto& [p, o] : it->second)
        if (p == predicate) out.push_back(o);
    return out;
}

const std::vector<std::pair<std::string, Term>>& GraphIndex::properties(const std::string& subject) const {
    static const std::vector<std::pair<std::string, Term>> none;
    auto it = props_.find(subject);
    return it == props_.end() ? none : it->second;
}

std::vector<std::string> GraphIndex::instances_of(std::string_view type) const {
    std::vector<std::string> out;
    for (const auto& [s, props] : props_)
        for (const auto& [p, o] : props)
            if (p == rdf_type && o.is_iri() && o.value == type) {
                out.push_back(s);
                break;
            }
    return out;
}

std::vector<std::string> GraphIndex::subjects_with(std::string_view predicate) const {
    std::vector<std::string> out;
    for (const auto& [s, props] : props_)
        for (const auto& [p, o] : props)
            if (p == predicate) {
                out.push_back(s);
                break;
            }
    return out;
}

} // namespace complr::rdf
