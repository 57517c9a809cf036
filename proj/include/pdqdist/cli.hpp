#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdqdist/exact.hpp"
#include "pdqdist/qaoa.hpp"
#include "pdqdist/qsim.hpp"
#include "pdqdist/reference.hpp"

namespace pdq::cli {

inline int qubit_cap_from_env() {
    if (const char* env = std::getenv("PDQ_QUBIT_CAP")) {
        const int cap = std::atoi(env);
        if (cap < 1 || cap > 63) throw parameter_error("PDQ_QUBIT_CAP must be in [1, 63]");
        return cap;
    }
    return kDefaultQubitCap;
}

inline double parse_q(const std::string& text) {
    if (text == "inf") return kInf;
    char* end = nullptr;
    const double q = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !(q >= 1.0))
        throw parameter_error("q must be a number >= 1 or 'inf'");
    return q;
}

inline PersistenceDiagram load_diagram_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    const DiagramFormat format = path.size() >= 5 && path.ends_with(".json")
                                     ? DiagramFormat::json
                                     : DiagramFormat::csv;
    try {
        return load_diagram(in, format, std::filesystem::path(path).stem().string());
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

inline PointCloud load_cloud_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    return read_cloud_csv(in);
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << text;
}

inline std::string histogram_csv(const MatchingGraph& g,
                                 const std::map<BasisState, std::uint64_t>& histogram) {
    std::ostringstream out;
    out << "bits,count,cost,strict,relaxed\n";
    char buf[32];
    for (const auto& [basis, count] : histogram) {
        std::snprintf(buf, sizeof buf, "%.17g", state_cost(g, basis));
        out << bits_string(basis, g.num_qubits) << ',' << count << ',' << buf << ','
            << (check_feasibility(g, basis, FeasibilityMode::strict) ? 1 : 0) << ','
            << (check_feasibility(g, basis, FeasibilityMode::relaxed) ? 1 : 0) << '\n';
    }
    return out.str();
}

struct VerifyOutcome {
    std::string name;
    bool pass = false;
};

/// Executable property checks for the mixer construction, run on one concrete
/// instance: the mixer maps every relaxed-feasible basis state into the
/// relaxed-feasible span, a single mixer pass from the initial state reaches
/// exactly the relaxed-feasible set, the strict and relaxed cost minima
/// coincide, and the clause is invariant on each rotation pair (guaranteed
/// for the symmetric kind, reported as-is for the literal one).
inline std::vector<VerifyOutcome> verify_instance(const MatchingGraph& g, ClauseKind kind,
                                                  int qubit_cap) {
    const std::vector<double> betas = {0.3, 0.7, 1.9};
    const std::vector<BasisState> relaxed = enumerate_feasible(g, FeasibilityMode::relaxed);
    std::vector<char> is_relaxed(std::size_t{1} << g.num_qubits, 0);
    for (BasisState s : relaxed) is_relaxed[s] = 1;
    Simulator sim(g, qubit_cap);

    bool feasibility = true;
    for (double beta : betas) {
        for (BasisState start : relaxed) {
            StateVector sv;
            sv.num_qubits = g.num_qubits;
            sv.amplitudes.assign(std::size_t{1} << g.num_qubits, {0.0, 0.0});
            sv.amplitudes[start] = {1.0, 0.0};
            sim.apply_mixer(sv, beta);
            for (std::size_t s = 0; s < sv.amplitudes.size(); ++s)
                if (!is_relaxed[s] && std::abs(sv.amplitudes[s]) >= 1e-12) feasibility = false;
        }
    }

    bool completeness = true;
    {
        StateVector sv = sim.initial_state();
        sim.apply_mixer(sv, 0.7);
        for (std::size_t s = 0; s < sv.amplitudes.size(); ++s) {
            const double mag = std::abs(sv.amplitudes[s]);
            if (is_relaxed[s] ? mag <= 1e-9 : mag >= 1e-12) completeness = false;
        }
    }

    bool minimum_equal = true;
    {
        double strict_min = std::numeric_limits<double>::infinity();
        for (BasisState s : enumerate_feasible(g, FeasibilityMode::strict))
            strict_min = std::min(strict_min, state_cost(g, s));
        double relaxed_min = std::numeric_limits<double>::infinity();
        for (BasisState s : relaxed) relaxed_min = std::min(relaxed_min, state_cost(g, s));
        minimum_equal = strict_min == relaxed_min;
    }

    bool pair_invariant = true;
    for (const auto& e : g.edges) {
        const BasisState flip = BasisState{1} << e.bit_index;
        for (BasisState s = 0; s < (BasisState{1} << g.num_qubits); ++s)
            if (clause_value(g, e, s, kind) != clause_value(g, e, s ^ flip, kind))
                pair_invariant = false;
    }

    return {{"mixer_preserves_feasibility", feasibility},
            {"mixer_generates_all_feasible", completeness},
            {"strict_relaxed_minimum_equal", minimum_equal},
            {"clause_pair_invariant", pair_invariant}};
}

inline void emit_error(std::ostream& err, const std::string& type, const std::string& message) {
    nlohmann::ordered_json doc;
    doc["error"]["type"] = type;
    doc["error"]["message"] = message;
    err << doc.dump(2) << "\n";
}

/// Full command-line surface. argv excludes the program name. Returns the
/// exit status: 0 success, 1 computation error (error JSON on err), 2 usage.
inline int run_command(const std::vector<std::string>& argv, std::ostream& out,
                       std::ostream& err) {
    CLI::App app{"persistence-diagram distances, exactly and via simulated QAOA", "pd-qdist"};
    app.require_subcommand(1);

    std::string d1_path, d2_path, variant_name = "wasserstein", q_text = "inf";
    std::string out_path, clause_name = "symmetric", cloud_path;
    double p = 2.0, c = 0.2, max_scale = 1.0;
    int layers = 1, grid = 16, max_dim = 1;
    std::uint64_t shots = 10000, seed = 0;
    bool with_exact = false, strict_only = false;

    const auto q_check = CLI::Validator(
        [](std::string& text) -> std::string {
            if (text == "inf") return {};
            char* end = nullptr;
            const double q = std::strtod(text.c_str(), &end);
            if (end != text.c_str() + text.size() || !(q >= 1.0))
                return "must be a number >= 1 or 'inf'";
            return {};
        },
        "NUM|inf");

    auto add_diagram_opts = [&](CLI::App* cmd) {
        cmd->add_option("--d1", d1_path, "first diagram (csv or json)")->required();
        cmd->add_option("--d2", d2_path, "second diagram (csv or json)")->required();
        cmd->add_option("--variant", variant_name, "wasserstein or dcp")
            ->check(CLI::IsMember({"wasserstein", "dcp"}));
        cmd->add_option("-p", p, "outer power p >= 1")->check(CLI::Range(1.0, 1e300));
        cmd->add_option("-q", q_text, "point norm order, number >= 1 or 'inf'")->check(q_check);
        cmd->add_option("-c", c, "dcp penalty constant")
            ->check(CLI::Range(1e-300, 1e300));
    };

    CLI::App* cmd_exact = app.add_subcommand("exact", "classical reference distance");
    add_diagram_opts(cmd_exact);
    cmd_exact->add_option("--out", out_path, "write JSON here instead of stdout");

    CLI::App* cmd_qaoa = app.add_subcommand("qaoa", "estimate the distance on the simulator");
    add_diagram_opts(cmd_qaoa);
    cmd_qaoa->add_option("--layers", layers, "circuit layers (0 = bare initial state)")
        ->check(CLI::Range(0, 16));
    cmd_qaoa->add_option("--shots", shots, "measurement shots")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));
    cmd_qaoa->add_option("--seed", seed, "sampling seed");
    cmd_qaoa->add_option("--grid", grid, "grid resolution per angle")
        ->check(CLI::Range(2, 4096));
    cmd_qaoa->add_flag("--with-exact", with_exact, "embed the exact reference result");
    cmd_qaoa->add_option("--out", out_path, "write JSON to <out> and histogram CSV to <out>.hist.csv");

    CLI::App* cmd_graph = app.add_subcommand("graph", "dump the matching graph");
    add_diagram_opts(cmd_graph);
    cmd_graph->add_option("--out", out_path, "write JSON here instead of stdout");

    CLI::App* cmd_enum = app.add_subcommand("enumerate", "list feasible basis states with costs");
    add_diagram_opts(cmd_enum);
    cmd_enum->add_flag("--strict-only", strict_only, "only states meeting the strict constraints");
    cmd_enum->add_option("--out", out_path, "write CSV here instead of stdout");

    CLI::App* cmd_verify = app.add_subcommand("verify", "run the mixer property checks");
    add_diagram_opts(cmd_verify);
    cmd_verify->add_option("--clause", clause_name, "clause kind for the pair-invariance check")
        ->check(CLI::IsMember({"paper", "symmetric"}));

    CLI::App* cmd_rips = app.add_subcommand("rips", "persistence diagrams of a point cloud");
    cmd_rips->add_option("--cloud", cloud_path, "point cloud csv (x,y per line)")->required();
    cmd_rips->add_option("--max-dim", max_dim, "top homology dimension (0 or 1)")
        ->check(CLI::Range(0, 1));
    cmd_rips->add_option("--max-scale", max_scale, "filtration cutoff")->required();
    cmd_rips->add_option("--out", out_path, "output base path")->required();

    CLI::App* cmd_gen = app.add_subcommand("gen-example", "write the reference clouds/diagrams");
    cmd_gen->add_option("--out", out_path, "output directory")->required();

    try {
        std::vector<const char*> cargs;
        cargs.push_back("pd-qdist");
        for (const auto& a : argv) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        const int cap = qubit_cap_from_env();
        Variant variant = variant_name == "dcp" ? Variant::dcp(c, p, parse_q(q_text))
                                                : Variant::wasserstein(p, parse_q(q_text));

        auto emit = [&](const std::string& text) {
            if (out_path.empty())
                out << text;
            else
                write_text_file(out_path, text);
        };

        if (cmd_exact->parsed()) {
            const PersistenceDiagram d1 = load_diagram_path(d1_path);
            const PersistenceDiagram d2 = load_diagram_path(d2_path);
            const ExactResult res = exact_distance(d1, d2, variant);
            emit(exact_result_to_json(res, variant, d1.size(), d2.size()).dump(2) + "\n");
        } else if (cmd_qaoa->parsed()) {
            const PersistenceDiagram d1 = load_diagram_path(d1_path);
            const PersistenceDiagram d2 = load_diagram_path(d2_path);
            const DistanceReport report = estimate_distance(
                d1, d2, variant, layers, shots, seed, with_exact, grid,
                OptimizeStrategy::grid_then_nelder_mead, cap);
            const std::string json = report_to_json(report).dump(2) + "\n";
            if (out_path.empty()) {
                out << json;
            } else {
                write_text_file(out_path, json);
                const MatchingGraph g = build_graph(d1, d2, variant, cap);
                write_text_file(out_path + ".hist.csv", histogram_csv(g, report.histogram));
            }
        } else if (cmd_graph->parsed()) {
            const MatchingGraph g = build_graph(load_diagram_path(d1_path),
                                                load_diagram_path(d2_path), variant, cap);
            emit(graph_to_json(g).dump(2) + "\n");
        } else if (cmd_enum->parsed()) {
            const MatchingGraph g = build_graph(load_diagram_path(d1_path),
                                                load_diagram_path(d2_path), variant, cap);
            const auto states = enumerate_feasible(
                g, strict_only ? FeasibilityMode::strict : FeasibilityMode::relaxed);
            std::ostringstream text;
            text << "bits,cost,strict,relaxed\n";
            char buf[32];
            for (BasisState s : states) {
                std::snprintf(buf, sizeof buf, "%.17g", state_cost(g, s));
                text << bits_string(s, g.num_qubits) << ',' << buf << ','
                     << (check_feasibility(g, s, FeasibilityMode::strict) ? 1 : 0) << ','
                     << (check_feasibility(g, s, FeasibilityMode::relaxed) ? 1 : 0) << '\n';
            }
            emit(text.str());
        } else if (cmd_verify->parsed()) {
            const MatchingGraph g = build_graph(load_diagram_path(d1_path),
                                                load_diagram_path(d2_path), variant, cap);
            const ClauseKind kind = clause_name == "paper" ? ClauseKind::paper_literal
                                                           : ClauseKind::symmetric_generator;
            const auto outcomes = verify_instance(g, kind, cap);
            bool all = true;
            for (const auto& o : outcomes) {
                out << (o.pass ? "PASS " : "FAIL ") << o.name << "\n";
                all = all && o.pass;
            }
            if (!all) {
                emit_error(err, "verification_failure", "one or more property checks failed");
                return 1;
            }
        } else if (cmd_rips->parsed()) {
            const PointCloud cloud = load_cloud_path(cloud_path);
            const auto diagrams = vietoris_rips_persistence(cloud, max_dim, max_scale);
            for (const auto& [dim, dg] : diagrams) {
                std::ostringstream text;
                write_diagram_csv(text, dg);
                write_text_file(out_path + ".h" + std::to_string(dim) + ".csv", text.str());
                write_text_file(out_path + ".h" + std::to_string(dim) + ".json",
                                diagram_to_json(dg).dump(2) + "\n");
            }
        } else if (cmd_gen->parsed()) {
            std::filesystem::create_directories(out_path);
            nlohmann::ordered_json manifest;
            for (bool noisy : {false, true}) {
                const ReferencePair ref = reference_pair(noisy);
                const std::string tag = noisy ? "noisy_" : "";
                const auto write_pair = [&](const std::string& name, const PointCloud& cloud,
                                            const PersistenceDiagram& dg) {
                    std::ostringstream ctext, dtext;
                    write_cloud_csv(ctext, cloud);
                    write_diagram_csv(dtext, dg);
                    const std::string cloud_file = tag + name + ".cloud.csv";
                    const std::string dg_file = tag + name + ".h1.csv";
                    write_text_file((std::filesystem::path(out_path) / cloud_file).string(),
                                    ctext.str());
                    write_text_file((std::filesystem::path(out_path) / dg_file).string(),
                                    dtext.str());
                    manifest["files"].push_back(cloud_file);
                    manifest["files"].push_back(dg_file);
                };
                write_pair("one_circle", ref.one_circle, ref.dg_one);
                write_pair("two_circles", ref.two_circles, ref.dg_two);
            }
            manifest["max_scale"] = refdata::kMaxScale;
            out << manifest.dump(2) << "\n";
        }
        return 0;
    } catch (const pdq::error& e) {
        emit_error(err, e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error(err, "error", e.what());
        return 1;
    }
}

} // namespace pdq::cli
