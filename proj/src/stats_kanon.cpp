#include "complr/stats_kanon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "complr/errors.hpp"
#include "complr/vocab.hpp"

namespace complr {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

void RecordTable::validate() const {
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].size() != columns.size())
            throw InputError(container.str() + ": row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                             " fields, header has " + std::to_string(columns.size()));
    for (const auto& q : quasi_identifiers)
        if (std::find(columns.begin(), columns.end(), q) == columns.end())
            throw InputError(container.str() + ": quasi-identifier '" + q + "' is not a column");
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text, const std::string& source) {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    std::size_t line = 1;
    auto end_row = [&] {
        row.push_back(std::move(field));
        field.clear();
        // skip blank lines
        if (!(row.size() == 1 && row.front().empty() && !any)) out.push_back(std::move(row));
        row.clear();
        any = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field += ch;
            }
            continue;
        }
        switch (ch) {
        case '"':
            quoted = true;
            any = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            any = true;
            break;
        case '\r': break;
        case '\n':
            end_row();
            ++line;
            break;
        default: field += ch; any = true;
        }
    }
    if (quoted) throw SyntaxError(source, line, 1, "unterminated quoted field");
    if (any || !field.empty() || !row.empty()) end_row();
    if (out.empty()) throw InputError(source + ": missing header row");
    return out;
}

RecordTable read_record_table(const std::filesystem::path& path, ContainerId container,
                              std::vector<std::string> quasi_identifiers) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read record file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto rows = parse_csv(buf.str(), path.string());
    RecordTable t;
    t.container = std::move(container);
    for (auto& h : rows.front()) t.columns.push_back(trim(h));
    t.rows.assign(rows.begin() + 1, rows.end());
    t.quasi_identifiers = std::move(quasi_identifiers);
    t.validate();
    return t;
}

std::size_t compute_k(const RecordTable& table) {
    table.validate();
    if (table.rows.empty()) throw EvaluationError(table.container.str() + ": k is undefined for an empty table");
    std::vector<std::size_t> idx;
    for (const auto& q : table.quasi_identifiers)
        idx.push_back(static_cast<std::size_t>(std::find(table.columns.begin(), table.columns.end(), q) - table.columns.begin()));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::map<std::vector<std::string>, std::size_t> groups;
    for (const auto& row : table.rows) {
        std::vector<std::string> key;
        key.reserve(idx.size());
        for (std::size_t i : idx) key.push_back(trim(row[i]));
        ++groups[key];
    }
    std::size_t k = table.rows.size();
    for (const auto& [key, n] : groups) k = std::min(k, n);
    return k;
}

ComplianceAssertion emit_analysis(const RecordTable& table, const ScopeId& scope, const FrameworkId& framework) {
    std::size_t k = compute_k(table);
    ComplianceAssertion a{table.container, LabelId(vocab::kanonymity_label()), scope, framework, true, {}};
    a.parameters.emplace(std::string(vocab::cohort_parameter), Value(static_cast<std::int64_t>(k)));
    return a;
}

} // namespace complr
