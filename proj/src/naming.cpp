#include "complr/naming.hpp"

#include <algorithm>

#include "complr/errors.hpp"

namespace complr {

Names::Names(std::map<std::string, std::string> prefixes) : prefixes_(std::move(prefixes)) {}

std::string Names::compact(const std::string& iri) const {
    const std::string* best_prefix = nullptr;
    std::size_t best = 0;
    for (const auto& [p, ns] : prefixes_) {
        if (ns.size() > best && iri.size() > ns.size() && iri.compare(0, ns.size(), ns) == 0) {
            best = ns.size();
            best_prefix = &p;
        }
    }
    return best_prefix ? *best_prefix + ":" + iri.substr(best) : iri;
}

std::string Names::resolve(const std::string& text, const std::vector<std::string>& candidates,
                           const std::string& what) const {
    auto known = [&](const std::string& iri) { return std::find(candidates.begin(), candidates.end(), iri) != candidates.end(); };
    if (known(text)) return text;
    if (auto colon = text.find(':'); colon != std::string::npos) {
        auto it = prefixes_.find(text.substr(0, colon));
        if (it != prefixes_.end()) {
            std::string iri = it->second + text.substr(colon + 1);
            if (known(iri)) return iri;
        }
    }
    std::vector<std::string> hits;
    for (const auto& c : candidates) {
        auto pos = c.find_last_of("#/:");
        std::string local = pos == std::string::npos ? c : c.substr(pos + 1);
        if (local == text) hits.push_back(c);
    }
    if (hits.size() == 1) return hits.front();
    if (hits.empty()) throw NotFoundError("unknown " + what + " '" + text + "'");
    std::string msg = "ambiguous " + what + " '" + text + "':";
    for (const auto& h : hits) msg += " " + compact(h);
    throw InputError(msg);
}

} // namespace complr
