// nntc: compile addition/inversion formulas into two-layer training
// instances and work with their witnesses.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "nntc/formula.hpp"
#include "nntc/lowering.hpp"
#include "nntc/solver.hpp"
#include "nntc/witness_ops.hpp"

namespace {

using namespace nntc;

enum ExitStatus { exit_ok = 0, exit_rejected = 1, exit_usage = 2, exit_internal = 3 };

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write '" + path + "'");
    out << bytes;
}

int cmd_compile(const std::string& formula_path, const std::string& out_path,
                const std::string& map_path, const std::string& stop) {
    EtrInvFormula f = parse_etr_inv(slurp(formula_path));
    CompilationResult res = compile_full(f, parse_stage(stop));
    spill(out_path, encode_instance(res.instance));
    if (!map_path.empty()) spill(map_path, encode_map(res.map));
    return exit_ok;
}

int cmd_verify(const std::string& inst_path, const std::string& wit_path,
               const std::string& tolerance, const std::string& report) {
    TrainingInstance inst = decode_instance(slurp(inst_path));
    Witness w = decode_witness(slurp(wit_path));
    std::optional<Scalar> tol;
    if (!tolerance.empty())
        tol = w.mode == Scalar::Mode::floating ? Scalar::floating(std::stod(tolerance))
                                               : Scalar::parse_exact(tolerance);
    VerifyReport rep = verify_witness(inst, w, tol);
    if (report == "json") {
        nlohmann::json j;
        j["accepted"] = rep.accepted;
        j["cost"] = rep.total_cost.is_exact() ? nlohmann::json(rep.total_cost.str())
                                              : nlohmann::json(rep.total_cost.flt());
        j["datapoint_costs"] = nlohmann::json::array();
        for (const auto& c : rep.datapoint_costs)
            j["datapoint_costs"].push_back(
                c.is_exact() ? nlohmann::json(c.str()) : nlohmann::json(c.flt()));
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (rep.accepted ? "accepted" : "rejected")
                  << " cost " << rep.total_cost.str() << "\n";
    }
    return rep.accepted ? exit_ok : exit_rejected;
}

int cmd_synth(const std::string& formula_path, const std::string& solution_path,
              const std::string& out_path, const std::string& stop) {
    EtrInvFormula f = parse_etr_inv(slurp(formula_path));
    Assignment a = parse_assignment(f, slurp(solution_path));
    CompilationResult res = compile_full(f, parse_stage(stop));
    Witness w = synthesize_witness(res.instance, res.map, a);
    spill(out_path, encode_witness(w));
    return exit_ok;
}

int cmd_extract(const std::string& inst_path, const std::string& wit_path,
                const std::string& map_path, const std::string& out_path) {
    TrainingInstance inst = decode_instance(slurp(inst_path));
    Witness w = decode_witness(slurp(wit_path));
    CompilationMap map = decode_map(slurp(map_path));
    Assignment a = extract_assignment(inst, w, map);
    EtrInvFormula shell;
    for (const auto& name : map.source_variables) shell.intern(name);
    spill(out_path, print_assignment(shell, a));
    return exit_ok;
}

int cmd_solve(const std::string& inst_path, const std::string& out_path,
              int restarts, int iters, std::uint64_t seed, const std::string& grid_csv,
              std::uint64_t budget) {
    TrainingInstance inst = decode_instance(slurp(inst_path));
    if (!grid_csv.empty()) {
        std::vector<Scalar> grid;
        std::istringstream in(grid_csv);
        std::string item;
        while (std::getline(in, item, ',')) grid.push_back(Scalar::parse_exact(item));
        auto w = grid_search(inst, grid, budget);
        if (!w) {
            std::cout << "not found\n";
            return exit_rejected;
        }
        std::string bytes = encode_witness(*w);
        if (out_path.empty()) std::cout << bytes;
        else spill(out_path, bytes);
        std::cout << "cost 0\n";
        return exit_ok;
    }
    SolverConfig cfg;
    cfg.restarts = restarts;
    cfg.max_iters = iters;
    cfg.seed = seed;
    SolveResult best = local_search(inst, cfg);
    std::string bytes = encode_witness(best.witness);
    if (out_path.empty()) std::cout << bytes;
    else spill(out_path, bytes);
    std::cout << "cost " << best.cost << " restart " << best.restart << "\n";
    return best.cost < cfg.target_tol ? exit_ok : exit_rejected;
}

int cmd_dot(const std::string& inst_path, const std::string& wit_path,
            const std::string& out_path) {
    TrainingInstance inst = decode_instance(slurp(inst_path));
    std::optional<Witness> w;
    if (!wit_path.empty()) w = decode_witness(slurp(wit_path));
    spill(out_path, emit_dot(inst, w ? &*w : nullptr));
    return exit_ok;
}

int cmd_stats(const std::string& inst_path) {
    TrainingInstance inst = decode_instance(slurp(inst_path));
    size_t s = inst.input_ids().size(), t = inst.output_ids().size();
    size_t h = inst.neurons.size() - s - t;
    std::cout << "inputs " << s << "\n"
              << "middles " << h << "\n"
              << "outputs " << t << "\n"
              << "edges " << inst.edges.size() << "\n"
              << "datapoints " << inst.data.size() << "\n"
              << "matrix " << inst.data.size() * (s + t) << "\n";
    return exit_ok;
}

int classify(const std::exception& e) {
    if (dynamic_cast<const SyntaxError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
        dynamic_cast<const UnsupportedConstraint*>(&e) ||
        dynamic_cast<const MissingVariable*>(&e))
        return exit_usage;
    if (dynamic_cast<const UnsatisfyingAssignment*>(&e) ||
        dynamic_cast<const NotZeroCost*>(&e) || dynamic_cast<const BudgetExceeded*>(&e))
        return exit_rejected;
    return exit_internal;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compiler from addition/inversion constraint formulas to "
                 "two-layer neural-network training instances"};
    app.require_subcommand(1);

    std::string formula, instance, witness, map_file, out, solution;
    std::string stop = "plain", tolerance, report = "text", grid_csv;
    int restarts = 100, iters = 5000;
    std::uint64_t seed = 0, budget = 10'000'000;

    auto* compile = app.add_subcommand("compile", "compile a formula file");
    compile->add_option("formula", formula)->required();
    compile->add_option("-o,--output", out)->required();
    compile->add_option("--map", map_file);
    compile->add_option("--stop-after", stop)
        ->check(CLI::IsMember({"restricted", "fixedfree", "plain"}));

    auto* verify = app.add_subcommand("verify", "verify a witness");
    verify->add_option("instance", instance)->required();
    verify->add_option("witness", witness)->required();
    verify->add_option("--tolerance", tolerance);
    verify->add_option("--report", report)->check(CLI::IsMember({"json", "text"}));

    auto* synth = app.add_subcommand("synth", "synthesize a witness from a solution");
    synth->add_option("formula", formula)->required();
    synth->add_option("--solution", solution)->required();
    synth->add_option("-o,--output", out)->required();
    synth->add_option("--stop-after", stop)
        ->check(CLI::IsMember({"restricted", "fixedfree", "plain"}));

    auto* extract = app.add_subcommand("extract", "extract a solution from a witness");
    extract->add_option("instance", instance)->required();
    extract->add_option("witness", witness)->required();
    extract->add_option("--map", map_file)->required();
    extract->add_option("-o,--output", out)->required();

    auto* solve = app.add_subcommand("solve", "search for a low-cost witness");
    solve->add_option("instance", instance)->required();
    solve->add_option("-o,--output", out);
    solve->add_option("--restarts", restarts);
    solve->add_option("--iters", iters);
    solve->add_option("--seed", seed);
    solve->add_option("--grid", grid_csv);
    solve->add_option("--budget", budget);

    auto* dot = app.add_subcommand("dot", "emit a Graphviz drawing");
    dot->add_option("instance", instance)->required();
    dot->add_option("-w,--witness", witness);
    dot->add_option("-o,--output", out)->required();

    auto* stats = app.add_subcommand("stats", "print instance dimensions");
    stats->add_option("instance", instance)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*compile) return cmd_compile(formula, out, map_file, stop);
        if (*verify) return cmd_verify(instance, witness, tolerance, report);
        if (*synth) return cmd_synth(formula, solution, out, stop);
        if (*extract) return cmd_extract(instance, witness, map_file, out);
        if (*solve) return cmd_solve(instance, out, restarts, iters, seed, grid_csv, budget);
        if (*dot) return cmd_dot(instance, witness, out);
        if (*stats) return cmd_stats(instance);
    } catch (const SyntaxError& e) {
        if (report == "json") {
            nlohmann::json j{{"error", {{"kind", "syntax"},
                                        {"message", e.what()},
                                        {"line", e.line},
                                        {"column", e.column}}}};
            std::cerr << j.dump(2) << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return exit_usage;
    } catch (const std::exception& e) {
        if (report == "json") {
            nlohmann::json j{{"error", {{"kind", "error"}, {"message", e.what()}}}};
            std::cerr << j.dump(2) << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return classify(e);
    }
    return exit_internal;
}
