// Command-line surface: generators, planner, reduction pipeline, solvers and
// the verification/benchmark harness. All randomness is seed-driven; identical
// invocations produce identical outputs.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bcplab/exact_solver.hpp"
#include "bcplab/harness.hpp"
#include "bcplab/instance_gen.hpp"
#include "bcplab/io.hpp"
#include "bcplab/minhash.hpp"
#include "bcplab/param_plan.hpp"
#include "bcplab/reductions.hpp"

namespace {

using namespace bcplab;

std::vector<std::uint64_t> parse_sizes(const std::string& csv) {
    std::vector<std::uint64_t> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoull(tok));
    return out;
}

int cmd_generate(const std::string& spec_path, const std::string& out_path) {
    GenSpec spec = genspec_from_json(load_json_file(spec_path));
    BcpInstance inst = generate(spec);
    save_json_file(out_path, instance_to_json(inst));
    return 0;
}

int cmd_plan(double delta, std::uint64_t T, std::uint64_t m, std::uint64_t n, double j1,
             double j2, std::optional<double> gamma, std::uint64_t cap, bool as_json,
             const std::string& out_path) {
    ParamPlan plan = build_plan(delta, T, m, n, j1, j2, gamma, cap);
    Json j = plan_to_json(plan);
    if (!out_path.empty()) save_json_file(out_path, j);
    if (as_json) {
        std::cout << j.dump(2) << "\n";
    } else if (!out_path.empty()) {
        std::cout << "plan written to " << out_path << "\n";
    } else {
        std::cout << "gamma      " << plan.gamma
                  << (plan.gamma_overridden ? " (override)" : "") << "\n"
                  << "i          " << plan.i << "\n"
                  << "alpha      " << plan.alpha << "\n"
                  << "thresholds j1d " << plan.stage_thresholds.j1d << "  j2d "
                  << plan.stage_thresholds.j2d << "\n"
                  << "           j1s " << plan.stage_thresholds.j1s << "  j2s "
                  << plan.stage_thresholds.j2s << "\n"
                  << "           j1a " << plan.stage_thresholds.j1a << "  j2a "
                  << plan.stage_thresholds.j2a << "  j2* " << plan.stage_thresholds.j2star
                  << "\n";
        std::cout << "samples    ";
        for (std::uint64_t s : plan.sample_sizes) std::cout << s << " ";
        std::cout << "\n"
                  << "universe   <= " << plan.universe_bound << "\n"
                  << "epsilon    " << plan.epsilon_bound << "\n"
                  << "hardness   " << (plan.hardness_applies ? "applies" : "does not apply")
                  << "\n";
    }
    return 0;
}

int cmd_reduce(const std::string& in_path, const std::string& plan_path, std::uint64_t seed,
               const std::string& out_path, const std::string& trace_path) {
    BcpInstance inst = instance_from_json(load_json_file(in_path));
    ParamPlan plan = plan_from_json(load_json_file(plan_path));
    auto [hard, trace] = harden_pipeline(inst, plan, seed);
    save_json_file(out_path, instance_to_json(hard));
    if (!trace_path.empty()) save_json_file(trace_path, trace_to_json(trace));
    return 0;
}

int cmd_solve(const std::string& in_path, double j1, double j2, const std::string& algo,
              double eta, std::uint64_t seed) {
    BcpInstance inst = instance_from_json(load_json_file(in_path));
    Thresholds th(j1, j2);
    DecisionOutcome out;
    if (algo == "brute") {
        out = brute_force_decide(inst, th);
    } else if (algo == "lsh") {
        LshParams params = derive_lsh_params(inst.red.size(), th, eta, seed);
        out = lsh_decide(inst, th, params);
    } else {
        throw ValidationError("unknown algorithm: " + algo);
    }
    std::cout << outcome_to_json(out).dump(2) << "\n";
    return out.found ? 0 : 1;
}

int cmd_verify(const std::string& what, const std::string& plan_path, std::uint64_t n,
               std::uint64_t trials, std::uint64_t seed, bool csv) {
    ExperimentReport rep;
    if (what == "envelope") {
        ParamPlan plan = plan_from_json(load_json_file(plan_path));
        rep = verify_envelope(plan, n, trials, seed);
    } else if (what == "pipeline") {
        ParamPlan plan = plan_from_json(load_json_file(plan_path));
        rep = verify_pipeline_equivalence(plan, n, trials, seed);
    } else if (what == "collisions") {
        rep = estimate_collision_rate({1.0 / 3.0, 0.5, 2.0 / 3.0}, 4, trials, seed);
    } else {
        throw ValidationError("unknown verification: " + what);
    }
    if (csv) std::cout << report_to_csv(rep);
    else std::cout << report_to_json(rep).dump(2) << "\n";
    return rep.pass ? 0 : 1;
}

int cmd_bench(const std::string& algo, const std::string& sizes_csv, double j1, double j2,
              double eta, std::uint64_t seed, bool csv) {
    SolverKind kind;
    if (algo == "brute") kind = SolverKind::brute;
    else if (algo == "lsh") kind = SolverKind::lsh;
    else throw ValidationError("unknown algorithm: " + algo);
    ExperimentReport rep =
        bench_scaling(kind, parse_sizes(sizes_csv), Thresholds(j1, j2), eta, seed);
    if (csv) std::cout << report_to_csv(rep);
    else std::cout << report_to_json(rep).dump(2) << "\n";
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bichromatic closest pair laboratory"};
    app.require_subcommand(1);

    std::string spec_path, in_path, out_path, plan_path, trace_path, algo = "brute", what;
    std::string sizes_csv;
    double delta = 0.5, j1 = 0, j2 = 0, eta = 0.01;
    std::uint64_t T = 2, m = 8, n = 64, seed = 0, trials = 100;
    std::uint64_t sample_cap = bcplab::kDefaultSampleCap;
    std::optional<double> gamma;
    double gamma_flag = -1.0;
    bool as_json = false, csv = false;

    auto* gen = app.add_subcommand("generate", "generate an instance from a JSON spec");
    gen->add_option("--spec", spec_path)->required();
    gen->add_option("--out", out_path)->required();

    auto* plan = app.add_subcommand("plan", "derive the hardening plan constants");
    plan->add_option("--delta", delta)->required();
    plan->add_option("--T", T)->required();
    plan->add_option("--m", m)->required();
    plan->add_option("--n", n)->required();
    plan->add_option("--j1", j1)->required();
    plan->add_option("--j2", j2)->required();
    plan->add_flag("--json", as_json);
    plan->add_option("--out", out_path);
    plan->add_option("--gamma", gamma_flag, "pin gamma instead of deriving it");
    plan->add_option("--sample-cap", sample_cap);

    auto* red = app.add_subcommand("reduce", "run the hardening pipeline");
    red->add_option("--in", in_path)->required();
    red->add_option("--plan", plan_path)->required();
    red->add_option("--seed", seed)->required();
    red->add_option("--out", out_path)->required();
    red->add_option("--trace", trace_path);

    auto* sol = app.add_subcommand("solve", "decide the threshold query");
    sol->add_option("--in", in_path)->required();
    sol->add_option("--j1", j1)->required();
    sol->add_option("--j2", j2)->required();
    sol->add_option("--algo", algo)->check(CLI::IsMember({"brute", "lsh"}));
    sol->add_option("--eta", eta);
    sol->add_option("--seed", seed);

    auto* ver = app.add_subcommand("verify", "statistical verification experiments");
    ver->add_option("kind", what)->required()->check(CLI::IsMember({"envelope", "pipeline", "collisions"}));
    ver->add_option("--plan", plan_path);
    ver->add_option("--n", n);
    ver->add_option("--trials", trials);
    ver->add_option("--seed", seed);
    ver->add_flag("--csv", csv);

    auto* ben = app.add_subcommand("bench", "runtime scaling benchmark");
    ben->add_option("--algo", algo)->required()->check(CLI::IsMember({"brute", "lsh"}));
    ben->add_option("--sizes", sizes_csv)->required();
    ben->add_option("--j1", j1)->required();
    ben->add_option("--j2", j2)->required();
    ben->add_option("--eta", eta);
    ben->add_option("--seed", seed)->required();
    ben->add_flag("--csv", csv);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(spec_path, out_path);
        if (plan->parsed()) {
            if (gamma_flag >= 0.0) gamma = gamma_flag;
            return cmd_plan(delta, T, m, n, j1, j2, gamma, sample_cap, as_json, out_path);
        }
        if (red->parsed()) return cmd_reduce(in_path, plan_path, seed, out_path, trace_path);
        if (sol->parsed()) return cmd_solve(in_path, j1, j2, algo, eta, seed);
        if (ver->parsed()) return cmd_verify(what, plan_path, n, trials, seed, csv);
        if (ben->parsed()) return cmd_bench(algo, sizes_csv, j1, j2, eta, seed, csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
