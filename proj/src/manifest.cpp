#include "complr/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "complr/errors.hpp"

namespace complr {

namespace {

struct TomlValue {
    bool is_array = false;
    std::vector<std::string> items;
};

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

class Reader {
public:
    Reader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    std::map<std::string, TomlValue> run() {
        std::map<std::string, TomlValue> out;
        std::string section;
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start <= text_.size()) {
            std::size_t end = text_.find('\n', start);
            if (end == std::string_view::npos) end = text_.size();
            ++line_no;
            std::string line = strip_comment(text_.substr(start, end - start));
            start = end + 1;
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw SyntaxError(source_, line_no, 1, "malformed section header");
                section = trim(std::string_view(line).substr(1, line.size() - 2));
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) throw SyntaxError(source_, line_no, 1, "expected key = value");
            std::string key = trim(std::string_view(line).substr(0, eq));
            if (key.empty()) throw SyntaxError(source_, line_no, 1, "empty key");
            std::string full = section.empty() ? key : section + "." + key;
            out[full] = value(trim(std::string_view(line).substr(eq + 1)), line_no, eq + 2);
        }
        return out;
    }

private:
    std::string_view text_;
    std::string source_;

    static std::string strip_comment(std::string_view line) {
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
            if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
        }
        return std::string(line);
    }

    TomlValue value(const std::string& raw, std::size_t line, std::size_t col) {
        TomlValue v;
        if (raw.empty()) throw SyntaxError(source_, line, col, "missing value");
        if (raw.front() == '[') {
            if (raw.back() != ']') throw SyntaxError(source_, line, col, "unterminated array");
            v.is_array = true;
            std::string body = raw.substr(1, raw.size() - 2);
            std::size_t i = 0;
            while (i < body.size()) {
                while (i < body.size() && (std::isspace(static_cast<unsigned char>(body[i])) || body[i] == ',')) ++i;
                if (i >= body.size()) break;
                std::size_t j = i;
                v.items.push_back(scalar(body, j, line, col + i));
                i = j;
            }
            return v;
        }
        std::size_t i = 0;
        v.items.push_back(scalar(raw, i, line, col));
        if (!trim(std::string_view(raw).substr(i)).empty()) throw SyntaxError(source_, line, col, "trailing characters");
        return v;
    }

    std::string scalar(const std::string& s, std::size_t& i, std::size_t line, std::size_t col) {
        if (s[i] == '"') {
            std::string out;
            ++i;
            while (i < s.size() && s[i] != '"') {
                if (s[i] == '\\' && i + 1 < s.size()) ++i;
                out += s[i++];
            }
            if (i >= s.size()) throw SyntaxError(source_, line, col, "unterminated string");
            ++i;
            return out;
        }
        std::size_t b = i;
        while (i < s.size() && s[i] != ',' && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::string bare = s.substr(b, i - b);
        if (bare.empty()) throw SyntaxError(source_, line, col, "empty value");
        return bare;
    }
};

std::string single(const std::map<std::string, TomlValue>& kv, std::initializer_list<const char*> keys,
                   const std::string& source) {
    for (const char* k : keys) {
        auto it = kv.find(k);
        if (it == kv.end()) continue;
        if (it->second.is_array || it->second.items.size() != 1)
            throw InputError(source + ": key '" + k + "' must be a single value");
        return it->second.items.front();
    }
    return {};
}

std::vector<std::string> list(const std::map<std::string, TomlValue>& kv, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        auto it = kv.find(k);
        if (it != kv.end()) return it->second.items;
    }
    return {};
}

} // namespace

Manifest parse_manifest(std::string_view text, const std::string& source) {
    auto kv = Reader(text, source).run();
    Manifest m;
    m.id = single(kv, {"framework.id", "id"}, source);
    if (m.id.empty()) throw InputError(source + ": missing framework id");
    m.iri = single(kv, {"framework.iri", "iri"}, source);
    if (m.iri.empty()) throw InputError(source + ": missing framework iri for '" + m.id + "'");
    std::string kind = single(kv, {"framework.kind", "kind", "framework.type", "type"}, source);
    if (kind.empty()) throw InputError(source + ": missing framework kind for '" + m.id + "'");
    auto parsed = parse_framework_kind(kind);
    if (!parsed) throw InputError(source + ": unknown framework kind '" + kind + "'");
    m.kind = *parsed;
    m.description = single(kv, {"framework.description", "description"}, source);
    m.dependencies = list(kv, {"framework.dependencies", "dependencies"});
    m.model_files = list(kv, {"inputs.models", "models"});
    m.construct_files = list(kv, {"inputs.constructs", "constructs"});
    return m;
}

std::vector<std::string> topo_order(const std::vector<Manifest>& manifests) {
    std::map<std::string, const Manifest*> by_id;
    for (const auto& m : manifests) {
        if (!by_id.emplace(m.id, &m).second) throw InputError("duplicate framework id '" + m.id + "'");
    }
    for (const auto& m : manifests)
        for (const auto& d : m.dependencies)
            if (!by_id.count(d)) throw InputError("framework '" + m.id + "' depends on missing framework '" + d + "'");

    // Cycle report via DFS before ordering so the message names the cycle.
    std::map<std::string, int> color;
    std::vector<std::string> path;
    std::function<void(const std::string&)> dfs = [&](const std::string& n) {
        color[n] = 1;
        path.push_back(n);
        for (const auto& d : by_id.at(n)->dependencies) {
            if (color[d] == 1) {
                std::vector<std::string> cyc(std::find(path.begin(), path.end(), d), path.end());
                std::string msg = "framework dependency cycle: [";
                for (std::size_t i = 0; i < cyc.size(); ++i) msg += (i ? "," : "") + cyc[i];
                throw InputError(msg + "]");
            }
            if (color[d] == 0) dfs(d);
        }
        path.pop_back();
        color[n] = 2;
    };
    for (const auto& [id, m] : by_id)
        if (color[id] == 0) dfs(id);

    auto rank = [&](const std::string& id) { return std::pair{static_cast<int>(by_id.at(id)->kind), id}; };
    std::map<std::string, std::size_t> pending;
    for (const auto& [id, m] : by_id) {
        std::set<std::string> deps(m->dependencies.begin(), m->dependencies.end());
        pending[id] = deps.size();
    }
    std::set<std::pair<int, std::string>> ready;
    for (const auto& [id, n] : pending)
        if (n == 0) ready.insert(rank(id));
    std::vector<std::string> out;
    while (!ready.empty()) {
        std::string id = ready.begin()->second;
        ready.erase(ready.begin());
        out.push_back(id);
        for (const auto& [other, m] : by_id) {
            std::set<std::string> deps(m->dependencies.begin(), m->dependencies.end());
            if (deps.count(id) && --pending[other] == 0) ready.insert(rank(other));
        }
    }
    return out;
}

std::vector<Manifest> discover_manifests(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw InputError("framework directory not found: " + root.string());
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / "framework.toml")) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    std::vector<Manifest> out;
    for (const auto& dir : dirs) {
        std::ifstream in(dir / "framework.toml", std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        Manifest m = parse_manifest(buf.str(), (dir / "framework.toml").string());
        m.directory = dir;
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<Manifest> select_with_dependencies(const std::vector<Manifest>& all, const std::vector<std::string>& wanted) {
    std::map<std::string, const Manifest*> by_id;
    for (const auto& m : all) by_id[m.id] = &m;
    std::set<std::string> chosen;
    std::vector<std::string> stack(wanted.begin(), wanted.end());
    while (!stack.empty()) {
        std::string id = stack.back();
        stack.pop_back();
        auto it = by_id.find(id);
        if (it == by_id.end()) throw InputError("unknown framework '" + id + "'");
        if (!chosen.insert(id).second) continue;
        for (const auto& d : it->second->dependencies) stack.push_back(d);
    }
    std::vector<Manifest> out;
    for (const auto& m : all)
        if (chosen.count(m.id)) out.push_back(m);
    return out;
}

} // namespace complr
