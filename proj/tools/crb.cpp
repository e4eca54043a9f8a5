#include "crb/graph.hpp"
#include "crb/sim.hpp"
#include "crb/trust.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1; // invalid assumptions / property violation
constexpr int kExitUsage = 2;  // bad flags, unreadable or malformed files

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write " + path);
    out << content;
}

crb::TrustAssumptions load_config(const std::string& path)
{
    return crb::parse_config(read_file(path));
}

crb::ProcessId pid_for(const crb::TrustAssumptions& a, const std::string& label)
{
    for (crb::ProcessId p = 0; p < a.n; ++p)
        if (a.labels[static_cast<std::size_t>(p)] == label)
            return p;
    throw UsageError("unknown process label \"" + label + "\"");
}

crb::ProcSet parse_process_list(const crb::TrustAssumptions& a, const std::vector<std::string>& labels)
{
    crb::ProcSet s;
    for (const auto& l : labels)
        s.add(pid_for(a, l));
    return s;
}

json selection_to_json(const crb::TrustAssumptions& a, const crb::QuorumSelection& s)
{
    json out = json::object();
    const crb::ProcSet correct = a.universe() - s.faulty;
    correct.for_each([&](crb::ProcessId p) {
        json q = json::array();
        s.quorum_of(p).for_each([&](crb::ProcessId m) { q.push_back(a.name_of(m)); });
        out[a.name_of(p)] = std::move(q);
    });
    return out;
}

json labels_json(const crb::TrustAssumptions& a, crb::ProcSet s)
{
    json out = json::array();
    s.for_each([&](crb::ProcessId p) { out.push_back(a.name_of(p)); });
    return out;
}

json analysis_to_json(const crb::TrustAssumptions& a, const crb::AnalysisResult& res)
{
    const auto& w = res.witness;
    json doc;
    doc["k_max"] = w.k_max;
    doc["witness"] = {{"faulty", labels_json(a, w.faulty)},
                      {"selection", selection_to_json(a, w.selection)},
                      {"independent_set", labels_json(a, w.independent_set)}};
    doc["stats"] = {{"fault_sets_total", res.stats.fault_sets_total},
                    {"fault_sets_pruned", res.stats.fault_sets_pruned},
                    {"selections_enumerated", res.stats.selections_enumerated},
                    {"selections_deduped", res.stats.selections_deduped},
                    {"graphs_examined", res.stats.graphs_examined},
                    {"seconds", res.stats.seconds}};
    return doc;
}

std::vector<crb::Value> default_values(int k)
{
    std::vector<crb::Value> values;
    for (int i = 0; i < k; ++i)
        values.push_back(crb::Value{"v" + std::to_string(i + 1)});
    return values;
}

int cmd_validate(const std::string& config_path)
{
    auto a = load_config(config_path);
    auto violations = crb::validate(a);
    if (violations.empty()) {
        std::cout << "valid: " << a.n << " processes, "
                  << a.fault_model.maximal_sets.size() << " maximal faulty sets\n";
        return kExitOk;
    }
    for (const auto& v : violations)
        std::cout << "violation: " << v.message << "\n";
    return kExitDomain;
}

int cmd_analyze(const std::string& config_path, const std::string& json_path, bool no_dedup,
                int threads)
{
    auto a = load_config(config_path);
    if (!crb::validate(a).empty()) {
        std::cerr << "error: config is invalid; run `crb validate` for details\n";
        return kExitDomain;
    }
    crb::AnalysisOptions opts;
    opts.dedup = !no_dedup;
    opts.threads = threads;
    auto res = crb::inconsistency_number(a, opts);
    const auto& w = res.witness;

    std::cout << "k_max = " << w.k_max << "\n";
    std::cout << "witness faulty set: " << a.set_name(w.faulty) << "\n";
    std::cout << "witness independent set: " << a.set_name(w.independent_set) << "\n";
    std::cout << "witness selection:\n";
    (a.universe() - w.faulty).for_each([&](crb::ProcessId p) {
        std::cout << "  " << a.name_of(p) << " -> " << a.set_name(w.selection.quorum_of(p))
                  << "\n";
    });
    std::cout << "searched " << res.stats.fault_sets_total << " faulty sets ("
              << res.stats.fault_sets_pruned << " pruned), " << res.stats.graphs_examined
              << " graphs (" << res.stats.selections_deduped << " selections deduped) in "
              << res.stats.seconds << " s\n";

    if (!json_path.empty())
        write_file(json_path, analysis_to_json(a, res).dump(2) + "\n");
    return kExitOk;
}

int cmd_attack(const std::string& config_path, std::uint64_t seed,
               const std::vector<std::string>& value_args, const std::string& json_path,
               const std::string& trace_path)
{
    auto a = load_config(config_path);
    if (!crb::validate(a).empty()) {
        std::cerr << "error: config is invalid; run `crb validate` for details\n";
        return kExitDomain;
    }
    auto res = crb::inconsistency_number(a);
    const int k_max = res.witness.k_max;
    std::cout << "k_max = " << k_max << "\n";

    // The attack needs a Byzantine source. When the analysis witness has
    // an empty faulty set, look for a non-empty one realizing the same
    // k_max; failing that, k_max distinct deliveries are unreachable and
    // an honest run (k_max == 1) is the only tight execution.
    std::optional<crb::InconsistencyWitness> witness;
    if (!res.witness.faulty.empty())
        witness = res.witness;
    else
        witness = crb::attackable_witness(a, k_max);

    std::vector<crb::Value> values;
    if (value_args.empty()) {
        values = default_values(k_max);
    } else {
        for (const auto& v : value_args)
            values.push_back(crb::Value{v});
        for (std::size_t i = 0; i < values.size(); ++i)
            for (std::size_t j = i + 1; j < values.size(); ++j)
                if (values[i] == values[j])
                    throw UsageError("--values entries must be pairwise distinct");
        if (static_cast<int>(values.size()) < k_max)
            throw UsageError("need at least k_max distinct values");
        values.resize(static_cast<std::size_t>(k_max));
    }

    crb::Scenario sc;
    if (witness) {
        crb::ProcessId source = witness->faulty.first();
        sc = crb::partition_attack(a, source, witness->faulty, witness->selection,
                                   witness->independent_set, values, seed);
        std::cout << "attack: source " << a.name_of(source) << ", faulty "
                  << a.set_name(witness->faulty) << ", targets "
                  << a.set_name(witness->independent_set) << "\n";
    } else if (k_max == 1) {
        sc.assumptions = a;
        sc.instance.source = 0;
        sc.values = default_values(1);
        sc.seed = seed;
        std::cout << "attack degenerates: no faulty set can host the source; running an "
                     "honest broadcast\n";
    } else {
        std::cerr << "error: k_max = " << k_max
                  << " is only realized with an empty faulty set; no execution with a "
                     "Byzantine source reaches it\n";
        return kExitDomain;
    }

    auto trace = crb::run(sc);
    auto report = crb::check_trace(trace, sc, k_max);
    std::cout << "distinct values delivered: " << report.distinct_delivered << " (expected "
              << k_max << ")\n";
    for (const auto& v : report.verdicts)
        if (v.applicable)
            std::cout << "  " << v.property << ": " << (v.pass ? "pass" : "FAIL")
                      << (v.detail.empty() ? "" : " - " + v.detail) << "\n";

    if (!trace_path.empty())
        write_file(trace_path, trace.to_jsonl());
    if (!json_path.empty()) {
        json doc;
        doc["k_max"] = k_max;
        doc["distinct_delivered"] = report.distinct_delivered;
        doc["oracle"] = json::parse(report.to_json());
        write_file(json_path, doc.dump(2) + "\n");
    }

    return (report.distinct_delivered == k_max && report.all_pass) ? kExitOk : kExitDomain;
}

int cmd_simulate(const std::string& config_path, const std::string& source_label,
                 const std::vector<std::string>& faulty_labels, const std::string& adversary,
                 std::uint64_t seed, int runs, const std::vector<std::string>& value_args,
                 std::uint64_t crash_step, const std::string& json_path)
{
    auto a = load_config(config_path);
    if (!crb::validate(a).empty()) {
        std::cerr << "error: config is invalid; run `crb validate` for details\n";
        return kExitDomain;
    }

    auto kind = crb::adversary_from_name(adversary);
    if (!kind)
        throw UsageError("unknown adversary \"" + adversary + "\"");

    crb::Scenario base;
    base.assumptions = a;
    base.instance.source = pid_for(a, source_label);
    base.faulty = parse_process_list(a, faulty_labels);
    base.adversary = *kind;
    base.crash_step = crash_step;
    if (value_args.empty())
        base.values = default_values(*kind == crb::AdversaryKind::None ||
                                             *kind == crb::AdversaryKind::Silent
                                         ? 1
                                         : 2);
    else
        for (const auto& v : value_args)
            base.values.push_back(crb::Value{v});

    if (!crb::is_faulty_set(a, base.faulty)) {
        std::cerr << "error: execution does not comply with the fault model: "
                  << a.set_name(base.faulty) << " is not a member\n";
        return kExitDomain;
    }

    const int k_max = crb::inconsistency_number(a).witness.k_max;
    std::cout << "checking against k_bound = k_max = " << k_max << "\n";

    json all_reports = json::array();
    int failures = 0;
    for (int i = 0; i < runs; ++i) {
        crb::Scenario sc = base;
        sc.seed = seed + static_cast<std::uint64_t>(i);
        if (sc.adversary == crb::AdversaryKind::Scripted && sc.script.empty())
            sc.script = crb::random_script(a.n, sc.faulty, static_cast<int>(sc.values.size()),
                                           24, sc.seed);
        auto trace = crb::run(sc);
        auto report = crb::check_trace(trace, sc, k_max);
        if (!report.all_pass) {
            ++failures;
            std::cout << "seed " << sc.seed << ": FAIL\n";
            for (const auto& v : report.verdicts)
                if (v.applicable && !v.pass)
                    std::cout << "  " << v.property << ": " << v.detail << "\n";
        }
        if (!json_path.empty())
            all_reports.push_back(json::parse(report.to_json()));
    }
    std::cout << runs << " runs, " << (runs - failures) << " passed, " << failures
              << " failed\n";
    if (!json_path.empty())
        write_file(json_path, all_reports.dump(2) + "\n");
    return failures == 0 ? kExitOk : kExitDomain;
}

int cmd_probe(const std::string& config_path, const std::string& source_label,
              const std::string& process_label, int quorum_index, std::uint64_t seed)
{
    auto a = load_config(config_path);
    if (!crb::validate(a).empty()) {
        std::cerr << "error: config is invalid; run `crb validate` for details\n";
        return kExitDomain;
    }
    crb::ProcessId source = source_label.empty() ? 0 : pid_for(a, source_label);

    std::vector<std::pair<crb::ProcessId, crb::ProcSet>> probes;
    if (!process_label.empty()) {
        crb::ProcessId p = pid_for(a, process_label);
        const auto& qs = a.quorums_of(p);
        if (quorum_index < 0 || quorum_index >= static_cast<int>(qs.size()))
            throw UsageError("--quorum index out of range");
        probes.emplace_back(p, qs[static_cast<std::size_t>(quorum_index)]);
    } else {
        for (crb::ProcessId p = 0; p < a.n; ++p)
            for (crb::ProcSet q : a.quorums_of(p))
                probes.emplace_back(p, q);
    }

    int failures = 0;
    for (const auto& [p, q] : probes) {
        auto trace = crb::local_progress_probe(a, source, p, q, seed);
        bool delivered = trace.summary[static_cast<std::size_t>(p)].delivered_hex.has_value();
        std::cout << a.name_of(p) << " via " << a.set_name(q) << ": "
                  << (delivered ? "delivers" : "STUCK") << "\n";
        if (!delivered)
            ++failures;
    }
    return failures == 0 ? kExitOk : kExitDomain;
}

int cmd_gen(const std::vector<int>& uniform, const std::vector<int>& clusters,
            const std::string& out_path)
{
    crb::TrustAssumptions a;
    try {
        if (!uniform.empty())
            a = crb::generate_uniform(uniform[0], uniform[1]);
        else
            a = crb::generate_clusters(clusters[0], clusters[1]);
    } catch (const crb::InputError& e) {
        throw UsageError(e.what());
    }
    std::string text = crb::serialize_config(a);
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Trust-assumption laboratory for accountable relaxed reliable broadcast"};
    app.require_subcommand(1);

    std::string config_path, json_path, trace_path, out_path;
    std::string source_label, process_label, adversary = "none";
    std::vector<std::string> faulty_labels, value_args;
    std::uint64_t seed = 0, crash_step = 0;
    int runs = 1, threads = 0, quorum_index = 0;
    bool no_dedup = false;
    std::vector<int> uniform_args, cluster_args;

    auto* validate_cmd = app.add_subcommand("validate", "check a trust config's invariants");
    validate_cmd->add_option("--config", config_path, "trust config (JSON)")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "compute the inconsistency number k_max");
    analyze_cmd->add_option("--config", config_path)->required();
    analyze_cmd->add_option("--json", json_path, "write the analysis report as JSON");
    analyze_cmd->add_flag("--no-dedup", no_dedup, "disable selection deduplication");
    analyze_cmd->add_option("--threads", threads, "search workers (0 = hardware)");

    auto* attack_cmd =
        app.add_subcommand("attack", "run the partition attack against the k_max witness");
    attack_cmd->add_option("--config", config_path)->required();
    attack_cmd->add_option("--seed", seed);
    attack_cmd->add_option("--values", value_args, "distinct values for the faulty source");
    attack_cmd->add_option("--json", json_path);
    attack_cmd->add_option("--trace", trace_path, "write the execution trace (JSON lines)");

    auto* simulate_cmd = app.add_subcommand("simulate", "seeded adversarial runs + oracle");
    simulate_cmd->add_option("--config", config_path)->required();
    simulate_cmd->add_option("--source", source_label)->required();
    simulate_cmd->add_option("--faulty", faulty_labels, "faulty process labels");
    simulate_cmd->add_option("--adversary", adversary,
                             "none|silent|equivocate_split|crash|scripted");
    simulate_cmd->add_option("--seed", seed);
    simulate_cmd->add_option("--runs", runs);
    simulate_cmd->add_option("--values", value_args);
    simulate_cmd->add_option("--crash-step", crash_step);
    simulate_cmd->add_option("--json", json_path);

    auto* probe_cmd = app.add_subcommand("probe", "local-progress probes");
    probe_cmd->add_option("--config", config_path)->required();
    probe_cmd->add_option("--source", source_label);
    probe_cmd->add_option("--process", process_label, "probe one process (default: sweep)");
    probe_cmd->add_option("--quorum", quorum_index, "quorum index for --process");
    probe_cmd->add_option("--seed", seed);

    auto* gen_cmd = app.add_subcommand("gen", "generate a trust config");
    auto* uni_opt = gen_cmd->add_option("--uniform", uniform_args, "n f")->expected(2);
    auto* clu_opt = gen_cmd->add_option("--clusters", cluster_args, "count size")->expected(2);
    gen_cmd->add_option("--out", out_path, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate_cmd->parsed())
            return cmd_validate(config_path);
        if (analyze_cmd->parsed())
            return cmd_analyze(config_path, json_path, no_dedup, threads);
        if (attack_cmd->parsed())
            return cmd_attack(config_path, seed, value_args, json_path, trace_path);
        if (simulate_cmd->parsed())
            return cmd_simulate(config_path, source_label, faulty_labels, adversary, seed, runs,
                                value_args, crash_step, json_path);
        if (probe_cmd->parsed())
            return cmd_probe(config_path, source_label, process_label, quorum_index, seed);
        if (gen_cmd->parsed()) {
            if (uni_opt->count() == clu_opt->count())
                throw UsageError("gen needs exactly one of --uniform or --clusters");
            return cmd_gen(uniform_args, cluster_args, out_path);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const crb::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const crb::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const crb::SimulationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
