#include "crb/trust.hpp"

#include <algorithm>
#include <map>
#include <json.hpp>

using nlohmann::json;

namespace crb {

std::vector<Violation> validate(const TrustAssumptions& a)
{
    std::vector<Violation> out;
    const ProcSet all = a.universe();

    if (a.n <= 0) {
        out.push_back({"process set is empty"});
        return out;
    }
    if (a.n > 64) {
        out.push_back({"process count exceeds the supported maximum of 64"});
        return out;
    }

    if (static_cast<int>(a.quorum_map.quorums.size()) != a.n) {
        out.push_back({"quorum map does not cover every process"});
        return out;
    }

    for (ProcessId p = 0; p < a.n; ++p) {
        const auto& qs = a.quorums_of(p);
        if (qs.empty())
            out.push_back({"process " + a.name_of(p) + " has no quorums"});
        for (std::size_t i = 0; i < qs.size(); ++i) {
            if (qs[i].empty())
                out.push_back({"process " + a.name_of(p) + " has an empty quorum"});
            if (!qs[i].subset_of(all))
                out.push_back({"quorum " + a.set_name(qs[i]) + " of " + a.name_of(p) +
                               " references unknown processes"});
            if (!qs[i].contains(p))
                out.push_back({"quorum " + a.set_name(qs[i]) + " of " + a.name_of(p) +
                               " does not include " + a.name_of(p)});
            for (std::size_t j = i + 1; j < qs.size(); ++j)
                if (qs[i] == qs[j])
                    out.push_back({"process " + a.name_of(p) + " lists quorum " +
                                   a.set_name(qs[i]) + " twice"});
        }
    }

    const auto& ms = a.fault_model.maximal_sets;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (!ms[i].subset_of(all))
            out.push_back({"faulty set " + a.set_name(ms[i]) + " references unknown processes"});
        for (std::size_t j = 0; j < ms.size(); ++j) {
            if (i == j)
                continue;
            if (ms[i].subset_of(ms[j]) && !(i > j && ms[i] == ms[j]))
                out.push_back({"fault model is not an antichain: " + a.set_name(ms[i]) +
                               " is contained in " + a.set_name(ms[j])});
        }
    }

    return out;
}

bool is_faulty_set(const TrustAssumptions& a, ProcSet s)
{
    if (!s.subset_of(a.universe()))
        throw InputError("faulty set references processes outside the system");
    if (s.empty())
        return true;
    for (ProcSet m : a.fault_model.maximal_sets)
        if (s.subset_of(m))
            return true;
    return false;
}

bool is_live(const TrustAssumptions& a, ProcessId p, ProcSet f)
{
    if (p < 0 || p >= a.n)
        throw InputError("process id out of range");
    if (!is_faulty_set(a, f))
        throw InputError("faulty set is not a member of the fault model");
    if (f.contains(p))
        throw InputError("liveness query for a faulty process");
    for (ProcSet q : a.quorums_of(p))
        if (!q.intersects(f))
            return true;
    return false;
}

std::vector<ProcSet> enumerate_faulty_sets(const FaultModel& fm)
{
    std::vector<ProcSet> out;
    out.push_back(ProcSet{});
    for (ProcSet m : fm.maximal_sets) {
        // All subsets of m via the standard submask walk.
        std::uint64_t bits = m.bits();
        for (std::uint64_t sub = bits; sub != 0; sub = (sub - 1) & bits)
            out.push_back(ProcSet(sub));
    }
    std::sort(out.begin(), out.end(), set_order_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

void emit_subsets_of_size(int n, int k, ProcessId must_contain, std::vector<ProcSet>& out)
{
    // k-subsets of {0..n-1} in lexicographic member order; must_contain < 0
    // means unconstrained.
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        ProcSet s;
        for (int v : idx)
            s.add(v);
        if (must_contain < 0 || s.contains(must_contain))
            out.push_back(s);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i)
            --i;
        if (i < 0)
            break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

std::vector<std::string> default_labels(int n)
{
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        labels.push_back("p" + std::to_string(i + 1));
    return labels;
}

} // namespace

TrustAssumptions generate_uniform(int n, int f)
{
    if (n <= 0 || n > 64)
        throw InputError("process count must be in 1..64");
    if (f < 0 || f >= n)
        throw InputError("fault bound must satisfy 0 <= f < n");

    TrustAssumptions a;
    a.n = n;
    a.labels = default_labels(n);
    a.quorum_map.quorums.resize(static_cast<std::size_t>(n));
    for (ProcessId p = 0; p < n; ++p)
        emit_subsets_of_size(n, n - f, p, a.quorum_map.quorums[static_cast<std::size_t>(p)]);
    if (f > 0)
        emit_subsets_of_size(n, f, -1, a.fault_model.maximal_sets);
    return a;
}

TrustAssumptions generate_clusters(int clusters, int cluster_size)
{
    if (clusters <= 0 || cluster_size <= 0)
        throw InputError("cluster parameters must be positive");
    const int n = clusters * cluster_size;
    if (n > 64)
        throw InputError("process count exceeds the supported maximum of 64");

    TrustAssumptions a;
    a.n = n;
    a.labels = default_labels(n);
    a.quorum_map.quorums.resize(static_cast<std::size_t>(n));
    for (int c = 0; c < clusters; ++c) {
        ProcSet cluster;
        for (int i = 0; i < cluster_size; ++i)
            cluster.add(c * cluster_size + i);
        for (int i = 0; i < cluster_size; ++i)
            a.quorum_map.quorums[static_cast<std::size_t>(c * cluster_size + i)] = {cluster};
    }
    // Any one process may be faulty, so a Byzantine source exists for the
    // partition attack while k_max stays at the cluster count.
    for (ProcessId p = 0; p < n; ++p)
        a.fault_model.maximal_sets.push_back(ProcSet::single(p));
    return a;
}

namespace {

ProcSet parse_set(const json& arr, const std::map<std::string, ProcessId>& index,
                  const std::string& where)
{
    if (!arr.is_array())
        throw ConfigError(where + ": expected an array of process labels");
    ProcSet s;
    for (const auto& el : arr) {
        if (!el.is_string())
            throw ConfigError(where + ": process labels must be strings");
        auto it = index.find(el.get<std::string>());
        if (it == index.end())
            throw ConfigError(where + ": unknown process label \"" + el.get<std::string>() + "\"");
        s.add(it->second);
    }
    return s;
}

json set_to_json(ProcSet s, const TrustAssumptions& a)
{
    json arr = json::array();
    s.for_each([&](ProcessId p) { arr.push_back(a.name_of(p)); });
    return arr;
}

} // namespace

TrustAssumptions parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("config root must be an object");
    if (!doc.contains("processes") || !doc["processes"].is_array())
        throw ConfigError("config needs a \"processes\" array");

    TrustAssumptions a;
    std::map<std::string, ProcessId> index;
    for (const auto& el : doc["processes"]) {
        if (!el.is_string())
            throw ConfigError("\"processes\" entries must be strings");
        std::string label = el.get<std::string>();
        if (index.count(label))
            throw ConfigError("duplicate process label \"" + label + "\"");
        index[label] = static_cast<ProcessId>(a.labels.size());
        a.labels.push_back(label);
    }
    a.n = static_cast<int>(a.labels.size());
    if (a.n == 0)
        throw ConfigError("process list is empty");
    if (a.n > 64)
        throw ConfigError("process count exceeds the supported maximum of 64");

    a.quorum_map.quorums.resize(static_cast<std::size_t>(a.n));
    if (doc.contains("quorums")) {
        if (!doc["quorums"].is_object())
            throw ConfigError("\"quorums\" must map process labels to quorum lists");
        for (const auto& [label, list] : doc["quorums"].items()) {
            auto it = index.find(label);
            if (it == index.end())
                throw ConfigError("quorums: unknown process label \"" + label + "\"");
            if (!list.is_array())
                throw ConfigError("quorums of " + label + " must be an array");
            for (const auto& q : list)
                a.quorum_map.quorums[static_cast<std::size_t>(it->second)].push_back(
                    parse_set(q, index, "quorum of " + label));
        }
    }

    if (doc.contains("fault_model")) {
        const auto& fm = doc["fault_model"];
        if (!fm.is_object() || !fm.contains("maximal_sets") || !fm["maximal_sets"].is_array())
            throw ConfigError("\"fault_model\" needs a \"maximal_sets\" array");
        for (const auto& m : fm["maximal_sets"])
            a.fault_model.maximal_sets.push_back(parse_set(m, index, "fault_model"));
    }

    return a;
}

std::string serialize_config(const TrustAssumptions& a)
{
    json doc;
    doc["processes"] = json::array();
    for (const auto& label : a.labels)
        doc["processes"].push_back(label);

    json quorums = json::object();
    for (ProcessId p = 0; p < a.n; ++p) {
        json list = json::array();
        for (ProcSet q : a.quorums_of(p))
            list.push_back(set_to_json(q, a));
        quorums[a.name_of(p)] = std::move(list);
    }
    doc["quorums"] = std::move(quorums);

    json maximal = json::array();
    for (ProcSet m : a.fault_model.maximal_sets)
        maximal.push_back(set_to_json(m, a));
    doc["fault_model"] = {{"maximal_sets", std::move(maximal)}};

    return doc.dump(2) + "\n";
}

} // namespace crb
