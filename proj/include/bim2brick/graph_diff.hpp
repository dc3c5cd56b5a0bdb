#ifndef BIM2BRICK_GRAPH_DIFF_HPP
#define BIM2BRICK_GRAPH_DIFF_HPP

// Change detection between two generated graphs. Instances are joined on
// their source identifier, never on IRIs, so a rebuilt model with different
// minted names still diffs cleanly.

#include <bim2brick/brick_graph.hpp>
#include <bim2brick/diagnostics.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace bim2brick::brick {

class DuplicateSourceId : public Error {
public:
    explicit DuplicateSourceId(const std::string& source_id)
        : Error("source id '" + source_id + "' is attached to more than one instance") {}
};

struct InstanceDelta {
    std::string source_id;
    std::vector<std::string> added_facts;    // rendered "predicate object"
    std::vector<std::string> removed_facts;
};

struct ChangeReport {
    std::vector<std::pair<std::string, std::string>> added;    // (source_id, class local)
    std::vector<std::pair<std::string, std::string>> removed;  // (source_id, class local)
    std::vector<InstanceDelta> modified;

    bool empty() const { return added.empty() && removed.empty() && modified.empty(); }
    std::size_t change_count() const { return added.size() + removed.size() + modified.size(); }
};

namespace detail {

// sourceId -> instance IRI; throws on a doubly-claimed source id
inline std::map<std::string, std::string> instance_index(const BrickGraph& g) {
    std::map<std::string, std::string> out;
    for (const auto& [iri, src] : g.instances()) {
        auto [it, inserted] = out.emplace(src, iri);
        if (!inserted && it->second != iri) throw DuplicateSourceId(src);
    }
    return out;
}

inline std::string class_local_of(const BrickGraph& g, const std::string& iri) {
    auto type = g.type_of(iri);
    if (!type) return "";
    const auto hash = type->rfind('#');
    return hash == std::string::npos ? *type : type->substr(hash + 1);
}

// Renders one (predicate, object) fact in IRI-independent form: objects that
// are instances become @sourceId; other IRIs are shortened by well-known
// namespace; literals render as Turtle tokens.
inline std::string render_fact(const BrickGraph& g, const Triple& t,
                               const std::map<std::string, std::string>& iri_to_src) {
    auto shorten = [&](const std::string& iri) -> std::string {
        const std::string* best_iri = nullptr;
        std::string best;
        for (const auto& [prefix, ns] : g.prefixes) {
            if (iri.rfind(ns, 0) != 0) continue;
            if (!best_iri || ns.size() > best_iri->size()) {
                best = prefix + ":" + iri.substr(ns.size());
                best_iri = &ns;
            }
        }
        return best_iri ? best : "<" + iri + ">";
    };

    std::string pred = t.predicate == kRdfType ? "a" : shorten(t.predicate);
    std::string obj;
    switch (t.object.kind) {
        case RdfObject::Kind::Iri: {
            auto it = iri_to_src.find(t.object.text);
            obj = it != iri_to_src.end() ? "@" + it->second : shorten(t.object.text);
            break;
        }
        case RdfObject::Kind::String: obj = "\"" + t.object.text + "\""; break;
        case RdfObject::Kind::Integer: obj = std::to_string(t.object.number); break;
    }
    return pred + " " + obj;
}

// all facts of one instance, rendered and sorted; the sourceId triple itself
// is the join key and is excluded
inline std::vector<std::string> facts_of(const BrickGraph& g, const std::string& iri,
                                         const std::map<std::string, std::string>& iri_to_src) {
    const std::string src_pred = std::string(kToolNs) + "sourceId";
    std::vector<std::string> out;
    for (const auto& t : g.triples) {
        if (t.subject != iri || t.predicate == src_pred) continue;
        out.push_back(render_fact(g, t, iri_to_src));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

// Compares two graphs by source id: instances only in `older` are removals,
// only in `newer` are additions, and shared instances with different fact
// sets are modifications. Throws DuplicateSourceId when either graph binds
// one source id to several instances.
inline ChangeReport diff_by_source_id(const BrickGraph& older, const BrickGraph& newer) {
    const auto old_index = detail::instance_index(older);
    const auto new_index = detail::instance_index(newer);

    std::map<std::string, std::string> old_rev, new_rev;  // IRI -> sourceId
    for (const auto& [src, iri] : old_index) old_rev.emplace(iri, src);
    for (const auto& [src, iri] : new_index) new_rev.emplace(iri, src);

    ChangeReport report;
    for (const auto& [src, iri] : new_index)
        if (!old_index.count(src)) report.added.emplace_back(src, detail::class_local_of(newer, iri));
    for (const auto& [src, iri] : old_index)
        if (!new_index.count(src)) report.removed.emplace_back(src, detail::class_local_of(older, iri));

    for (const auto& [src, new_iri] : new_index) {
        auto old_it = old_index.find(src);
        if (old_it == old_index.end()) continue;
        const auto old_facts = detail::facts_of(older, old_it->second, old_rev);
        const auto new_facts = detail::facts_of(newer, new_iri, new_rev);
        InstanceDelta delta;
        delta.source_id = src;
        std::set_difference(new_facts.begin(), new_facts.end(), old_facts.begin(), old_facts.end(),
                            std::back_inserter(delta.added_facts));
        std::set_difference(old_facts.begin(), old_facts.end(), new_facts.begin(), new_facts.end(),
                            std::back_inserter(delta.removed_facts));
        if (!delta.added_facts.empty() || !delta.removed_facts.empty())
            report.modified.push_back(std::move(delta));
    }

    auto by_src = [](const auto& a, const auto& b) { return a.first < b.first; };
    std::sort(report.added.begin(), report.added.end(), by_src);
    std::sort(report.removed.begin(), report.removed.end(), by_src);
    std::sort(report.modified.begin(), report.modified.end(),
              [](const InstanceDelta& a, const InstanceDelta& b) { return a.source_id < b.source_id; });
    return report;
}

// one machine-readable change record per line
inline std::string render_change_records(const ChangeReport& report) {
    std::string out;
    for (const auto& [src, cls] : report.added)
        out += "+ instance " + src + (cls.empty() ? "" : " " + cls) + "\n";
    for (const auto& [src, cls] : report.removed)
        out += "- instance " + src + (cls.empty() ? "" : " " + cls) + "\n";
    for (const auto& delta : report.modified) {
        for (const auto& f : delta.added_facts) out += "~ " + delta.source_id + " + " + f + "\n";
        for (const auto& f : delta.removed_facts) out += "~ " + delta.source_id + " - " + f + "\n";
    }
    return out;
}

inline std::string render_change_summary(const ChangeReport& report) {
    if (report.empty()) return "no changes\n";
    std::string out;
    out += std::to_string(report.added.size()) + " added, " + std::to_string(report.removed.size()) +
           " removed, " + std::to_string(report.modified.size()) + " modified\n";
    out += render_change_records(report);
    return out;
}

}  // namespace bim2brick::brick

#endif
