#include "complr/fact_store.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "complr/errors.hpp"

namespace complr {

std::size_t Store::LabelAtHash::operator()(const LabelAt& k) const noexcept {
    std::size_t h = std::hash<std::string>{}(std::get<0>(k).str());
    h ^= std::hash<std::string>{}(std::get<1>(k).str()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::string>{}(std::get<2>(k).str()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

bool Store::insert_assertion(const ComplianceAssertion& a) {
    if (!env_.visible(a.scope, a.container))
        throw ScopeVisibilityError("container " + a.container.str() + " is not visible in scope " + a.scope.str());
    AssertionKey key = a.key();
    if (auto it = index_.find(key); it != index_.end()) {
        auto& existing = assertions_[it->second];
        for (const auto& [name, value] : a.parameters) {
            auto [pos, added] = existing.parameters.emplace(name, value);
            if (!added && !(pos->second == value))
                warnings_.push_back("conflicting value for parameter '" + name + "' on " + to_string(key) + ": kept " +
                                    pos->second.to_string() + ", ignored " + value.to_string());
        }
        return false;
    }
    std::size_t pos = assertions_.size();
    assertions_.push_back(a);
    index_.emplace(key, pos);
    label_at_[{a.container, a.label, a.scope}].push_back(pos);
    by_container_[a.container].push_back(pos);
    by_label_[a.label].push_back(pos);
    by_scope_[a.scope].push_back(pos);
    by_framework_[a.framework].push_back(pos);
    return true;
}

const ComplianceAssertion* Store::find(const AssertionKey& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &assertions_[it->second];
}

bool Store::has_label(const ContainerId& d, const LabelId& l, const ScopeId& g) const {
    return label_at_.count({d, l, g}) != 0;
}

std::vector<FrameworkId> Store::frameworks_for(const ContainerId& d, const LabelId& l, const ScopeId& g) const {
    std::vector<FrameworkId> out;
    auto it = label_at_.find({d, l, g});
    if (it == label_at_.end()) return out;
    for (std::size_t i : it->second) out.push_back(assertions_[i].framework);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

template <class K>
const std::vector<std::size_t>& lookup(const std::map<K, std::vector<std::size_t>>& m, const K& k) {
    static const std::vector<std::size_t> none;
    auto it = m.find(k);
    return it == m.end() ? none : it->second;
}

} // namespace

const std::vector<std::size_t>& Store::by_container(const ContainerId& id) const { return lookup(by_container_, id); }
const std::vector<std::size_t>& Store::by_label(const LabelId& id) const { return lookup(by_label_, id); }
const std::vector<std::size_t>& Store::by_scope(const ScopeId& id) const { return lookup(by_scope_, id); }
const std::vector<std::size_t>& Store::by_framework(const FrameworkId& id) const { return lookup(by_framework_, id); }

std::vector<ComplianceAssertion> Store::sorted_assertions() const {
    std::vector<ComplianceAssertion> out = assertions_;
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    return out;
}

std::size_t Store::materialize_containment() {
    std::size_t added = 0;
    for (; materialized_upto_ < assertions_.size(); ++materialized_upto_) {
        const auto& a = assertions_[materialized_upto_];
        for (const auto& anc : env_.ancestors(a.container)) {
            if (!env_.visible(a.scope, anc)) continue;
            if (containments_.emplace(LabelAt{anc, a.label, a.scope}, false).second) ++added;
        }
    }
    return added;
}

void Store::insert_containment(const ContainmentAssertion& c) {
    if (!env_.visible(c.scope, c.container))
        throw ScopeVisibilityError("container " + c.container.str() + " is not visible in scope " + c.scope.str());
    auto [it, added] = containments_.emplace(LabelAt{c.container, c.label, c.scope}, c.ground);
    if (!added && c.ground) it->second = true;
}

bool Store::contains_label(const ContainerId& d, const LabelId& l, const ScopeId& g) const {
    return containments_.count({d, l, g}) != 0;
}

std::vector<ContainmentAssertion> Store::containments() const {
    std::vector<ContainmentAssertion> out;
    for (const auto& [k, ground] : containments_) out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), ground});
    return out;
}

void Store::record_evaluation(const ConditionEvaluation& e) {
    auto [it, added] = evaluations_.emplace(std::tuple{e.condition, e.container, e.scope}, e.result);
    if (!added && e.result) it->second = true;
}

std::optional<bool> Store::evaluation(const ConditionId& c, const ContainerId& d, const ScopeId& g) const {
    auto it = evaluations_.find({c, d, g});
    if (it == evaluations_.end()) return std::nullopt;
    return it->second;
}

std::vector<ConditionEvaluation> Store::evaluations() const {
    std::vector<ConditionEvaluation> out;
    for (const auto& [k, r] : evaluations_) out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), r});
    return out;
}

void Store::record_derivation(const AssertionKey& key, Derivation d) { derivations_.emplace(key, std::move(d)); }

const Derivation* Store::derivation(const AssertionKey& key) const {
    auto it = derivations_.find(key);
    return it == derivations_.end() ? nullptr : &it->second;
}

bool Store::same_facts(const Store& other) const {
    auto a = sorted_assertions();
    auto b = other.sorted_assertions();
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].key() != b[i].key() || a[i].ground != b[i].ground || !(a[i].parameters == b[i].parameters))
            return false;
    return containments_ == other.containments_ && evaluations_ == other.evaluations_;
}

// ---------------------------------------------------------------------------
// Cache

namespace {

constexpr char cache_magic[8] = {'C', 'M', 'P', 'L', 'R', 'S', 'T', 'O'};

enum Tag : std::uint8_t {
    tag_container = 1,
    tag_scope = 2,
    tag_assertion = 3,
    tag_containment = 4,
    tag_evaluation = 5,
    tag_derivation = 6,
    tag_label_facets = 7,
    tag_framework_name = 8,
    tag_prefix = 9,
    tag_triple = 10,
    tag_metadata = 11,
    tag_ground = 12,
    tag_ground_containment = 13,
    tag_end = 0xff,
};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void record(Tag tag, const std::vector<std::string>& fields) {
        u8(tag);
        u32(static_cast<std::uint32_t>(fields.size()));
        for (const auto& f : fields) str(f);
        ++count_;
    }
    std::size_t count() const { return count_; }

private:
    std::ostream& out_;
    std::size_t count_ = 0;
};

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}

    bool done() const { return pos_ >= data_.size(); }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
        return v;
    }
    std::string str() {
        std::uint32_t n = u32();
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::string raw(std::size_t n) {
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

private:
    std::string data_;
    std::size_t pos_ = 0;

    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw CacheError("corrupt cache file: truncated record");
    }
};

std::vector<std::string> encode_value(const Value& v) { return {std::string(to_string(v.kind())), v.to_string()}; }

Value decode_value(const std::string& kind, const std::string& text) {
    auto k = parse_value_kind(kind);
    if (!k) throw CacheError("corrupt cache file: bad value kind");
    switch (*k) {
    case ValueKind::integer: return Value(static_cast<std::int64_t>(std::stoll(text)));
    case ValueKind::decimal: return Value(std::stod(text));
    case ValueKind::boolean: return Value(text == "true");
    case ValueKind::string: return Value(text);
    }
    return Value(text);
}

std::vector<std::string> encode_assertion(const ComplianceAssertion& a) {
    std::vector<std::string> f{a.container.str(), a.label.str(), a.scope.str(), a.framework.str(), a.ground ? "1" : "0"};
    for (const auto& [name, value] : a.parameters) {
        f.push_back(name);
        auto v = encode_value(value);
        f.insert(f.end(), v.begin(), v.end());
    }
    return f;
}

ComplianceAssertion decode_assertion(const std::vector<std::string>& f) {
    if (f.size() < 5 || (f.size() - 5) % 3 != 0) throw CacheError("corrupt cache file: bad assertion record");
    ComplianceAssertion a{ContainerId(f[0]), LabelId(f[1]), ScopeId(f[2]), FrameworkId(f[3]), f[4] == "1", {}};
    for (std::size_t i = 5; i < f.size(); i += 3) a.parameters.emplace(f[i], decode_value(f[i + 1], f[i + 2]));
    return a;
}

std::vector<std::string> encode_term(const rdf::Term& t) {
    std::vector<std::string> out{std::to_string(static_cast<int>(t.kind)), t.value,
                                 std::to_string(static_cast<int>(t.literal_kind)), std::to_string(t.items.size())};
    for (const auto& i : t.items) {
        auto sub = encode_term(i);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

rdf::Term decode_term(const std::vector<std::string>& f, std::size_t& i) {
    if (i + 4 > f.size()) throw CacheError("corrupt cache file: bad term");
    rdf::Term t;
    t.kind = static_cast<rdf::TermKind>(std::stoi(f[i]));
    t.value = f[i + 1];
    t.literal_kind = static_cast<ValueKind>(std::stoi(f[i + 2]));
    std::size_t n = std::stoul(f[i + 3]);
    i += 4;
    for (std::size_t k = 0; k < n; ++k) t.items.push_back(decode_term(f, i));
    return t;
}

} // namespace

void save_cache(const Store& store, const std::filesystem::path& path, const std::string& input_hash) {
    std::ostringstream buf(std::ios::binary);
    buf.write(cache_magic, sizeof cache_magic);
    Writer w(buf);
    w.u32(cache_format_version);
    w.str(input_hash);

    const Environment& env = store.env();
    for (const auto& [id, c] : env.containers()) {
        std::vector<std::string> f{id.str(), c.parent ? c.parent->str() : ""};
        for (const auto& j : c.joinable_with) f.push_back(j.str());
        w.record(tag_container, f);
    }
    for (const auto& [id, s] : env.scopes()) {
        std::vector<std::string> f{id.str()};
        for (const auto& c : s.visible) f.push_back(c.str());
        w.record(tag_scope, f);
    }
    for (const auto& a : env.ground) w.record(tag_ground, encode_assertion(a));
    for (const auto& c : env.ground_containments)
        w.record(tag_ground_containment, {c.container.str(), c.label.str(), c.scope.str()});
    for (const auto& a : store.sorted_assertions()) w.record(tag_assertion, encode_assertion(a));
    for (const auto& c : store.containments())
        w.record(tag_containment, {c.container.str(), c.label.str(), c.scope.str(), c.ground ? "1" : "0"});
    for (const auto& e : store.evaluations())
        w.record(tag_evaluation, {e.condition.str(), e.container.str(), e.scope.str(), e.result ? "1" : "0"});
    for (const auto& [key, d] : store.derivations()) {
        std::vector<std::string> f{key.container.str(),  key.label.str(), key.scope.str(),
                                   key.framework.str(),  d.framework.str(), d.rule,
                                   d.rule_declared_by.str(), std::to_string(d.round)};
        for (const auto& p : d.premises) {
            f.insert(f.end(), {std::to_string(static_cast<int>(p.kind)), p.key.container.str(), p.key.label.str(),
                               p.key.scope.str(), p.key.framework.str(), p.note});
        }
        w.record(tag_derivation, f);
    }
    for (const auto& [label, facets] : store.catalog.label_facets) {
        std::vector<std::string> f{label.str()};
        for (const auto& x : facets) f.push_back(x.str());
        w.record(tag_label_facets, f);
    }
    for (const auto& [id, name] : store.catalog.framework_names) w.record(tag_framework_name, {id.str(), name});
    for (const auto& [p, ns] : store.catalog.prefixes) w.record(tag_prefix, {p, ns});
    for (const auto& t : store.declarations.triples) {
        std::vector<std::string> f = encode_term(t.subject);
        f.push_back(t.predicate);
        auto o = encode_term(t.object);
        f.insert(f.end(), o.begin(), o.end());
        w.record(tag_triple, f);
    }
    for (const auto& [k, v] : store.metadata) w.record(tag_metadata, {k, v});
    std::size_t n = w.count();
    w.record(tag_end, {std::to_string(n)});

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError("cannot write cache file " + path.string());
    const std::string bytes = buf.str();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Store load_cache(const std::filesystem::path& path, const std::string& expected_input_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError("cannot read cache file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    Reader r(buf.str());
    if (r.raw(sizeof cache_magic) != std::string(cache_magic, sizeof cache_magic))
        throw CacheError("corrupt cache file: bad magic");
    std::uint32_t version = r.u32();
    if (version != cache_format_version)
        throw CacheError("cache version mismatch: file has " + std::to_string(version) + ", expected " +
                         std::to_string(cache_format_version));
    std::string hash = r.str();
    if (hash != expected_input_hash) throw CacheError("stale cache: input content hash mismatch");

    Environment env;
    std::vector<ComplianceAssertion> assertions;
    std::vector<ContainmentAssertion> containments;
    std::vector<ConditionEvaluation> evaluations;
    std::vector<std::pair<AssertionKey, Derivation>> derivations;
    Catalog catalog;
    rdf::Graph declarations;
    std::map<std::string, std::string> metadata;
    std::vector<std::pair<ContainerId, ContainerId>> edges;
    std::size_t records = 0;
    bool ended = false;
    while (!r.done()) {
        auto tag = static_cast<Tag>(r.u8());
        std::uint32_t n = r.u32();
        std::vector<std::string> f;
        for (std::uint32_t i = 0; i < n; ++i) f.push_back(r.str());
        auto need = [&](std::size_t k) {
            if (f.size() < k) throw CacheError("corrupt cache file: short record");
        };
        switch (tag) {
        case tag_container:
            need(2);
            env.add_container(ContainerId(f[0]));
            if (!f[1].empty()) edges.emplace_back(ContainerId(f[1]), ContainerId(f[0]));
            for (std::size_t i = 2; i < f.size(); ++i) env.add_joinable(ContainerId(f[0]), ContainerId(f[i]));
            break;
        case tag_scope:
            need(1);
            env.add_scope(ScopeId(f[0]));
            for (std::size_t i = 1; i < f.size(); ++i) env.add_visible(ScopeId(f[0]), ContainerId(f[i]));
            break;
        case tag_ground: env.ground.push_back(decode_assertion(f)); break;
        case tag_ground_containment:
            need(3);
            env.ground_containments.push_back({ContainerId(f[0]), LabelId(f[1]), ScopeId(f[2]), true});
            break;
        case tag_assertion: assertions.push_back(decode_assertion(f)); break;
        case tag_containment:
            need(4);
            containments.push_back({ContainerId(f[0]), LabelId(f[1]), ScopeId(f[2]), f[3] == "1"});
            break;
        case tag_evaluation:
            need(4);
            evaluations.push_back({ConditionId(f[0]), ContainerId(f[1]), ScopeId(f[2]), f[3] == "1"});
            break;
        case tag_derivation: {
            need(8);
            if ((f.size() - 8) % 6 != 0) throw CacheError("corrupt cache file: bad derivation record");
            AssertionKey key{ContainerId(f[0]), LabelId(f[1]), ScopeId(f[2]), FrameworkId(f[3])};
            Derivation d{FrameworkId(f[4]), f[5], FrameworkId(f[6]), std::stoul(f[7]), {}};
            for (std::size_t i = 8; i < f.size(); i += 6) {
                Premise p;
                p.kind = static_cast<Premise::Kind>(std::stoi(f[i]));
                p.key = {ContainerId(f[i + 1]), LabelId(f[i + 2]), ScopeId(f[i + 3]), FrameworkId(f[i + 4])};
                p.note = f[i + 5];
                d.premises.push_back(std::move(p));
            }
            derivations.emplace_back(std::move(key), std::move(d));
            break;
        }
        case tag_label_facets: {
            need(1);
            auto& v = catalog.label_facets[LabelId(f[0])];
            for (std::size_t i = 1; i < f.size(); ++i) v.emplace_back(f[i]);
            break;
        }
        case tag_framework_name: need(2); catalog.framework_names[FrameworkId(f[0])] = f[1]; break;
        case tag_prefix: need(2); catalog.prefixes[f[0]] = f[1]; break;
        case tag_triple: {
            std::size_t i = 0;
            rdf::Triple t;
            t.subject = decode_term(f, i);
            if (i >= f.size()) throw CacheError("corrupt cache file: bad triple");
            t.predicate = f[i++];
            t.object = decode_term(f, i);
            declarations.triples.push_back(std::move(t));
            break;
        }
        case tag_metadata: need(2); metadata[f[0]] = f[1]; break;
        case tag_end:
            need(1);
            if (std::to_string(records) != f[0]) throw CacheError("corrupt cache file: record count mismatch");
            ended = true;
            break;
        default: throw CacheError("corrupt cache file: unknown record tag " + std::to_string(static_cast<int>(tag)));
        }
        if (ended) break;
        ++records;
    }
    if (!ended || !r.done()) throw CacheError("corrupt cache file: missing end record");

    // Parents are restored before visibility-dependent facts.
    for (const auto& [p, c] : edges) env.add_containment(p, c);
    Store store(std::move(env));
    for (const auto& a : assertions) store.insert_assertion(a);
    for (const auto& c : containments) store.insert_containment(c);
    for (const auto& e : evaluations) store.record_evaluation(e);
    for (auto& [k, d] : derivations) store.record_derivation(k, std::move(d));
    store.catalog = std::move(catalog);
    store.declarations = std::move(declarations);
    store.metadata = std::move(metadata);
    store.materialize_containment();
    return store;
}

} // namespace complr
