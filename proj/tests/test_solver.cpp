#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nntc/gadgets.hpp"
#include "nntc/lowering.hpp"
#include "nntc/solver.hpp"
#include "nntc/witness_ops.hpp"

using namespace nntc;

namespace {

Scalar q(long long n, long long d = 1) { return Scalar::exact(n, d); }

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

} // namespace

TEST_CASE("flat parameters order free edges then free biases, and round trip") {
    CompilationResult res = compile_full(parse_etr_inv("x + y = z\n"));
    FlatParams params = flat_params(res.instance);
    for (size_t i = 1; i < params.edge_ids.size(); ++i)
        CHECK(params.edge_ids[i - 1] < params.edge_ids[i]);
    for (size_t i = 1; i < params.bias_ids.size(); ++i)
        CHECK(params.bias_ids[i - 1] < params.bias_ids[i]);
    int free_edges = 0;
    for (const auto& e : res.instance.edges) free_edges += !e.fixed_weight;
    CHECK(params.edge_ids.size() == static_cast<size_t>(free_edges));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    std::vector<double> x(params.size());
    for (double& v : x) v = val(rng);
    CHECK(flatten_witness(params, witness_from_flat(params, x)) == x);
}

TEST_CASE("analytic gradient matches central differences") {
    std::vector<TrainingInstance> instances = {
        build_subtraction_gadget().instance,
        build_inversion_gadget().instance,
        build_variable_gadget().instance,
        compile_full(parse_etr_inv("x + y = z\n"), Stage::restricted).instance,
    };
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    const double h = 1e-6;
    for (const auto& inst : instances) {
        FlatParams params = flat_params(inst);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<double> x(params.size());
            for (double& v : x) v = val(rng);
            std::vector<double> grad;
            cost_and_grad(inst, params, x, &grad);
            REQUIRE(grad.size() == x.size());
            for (size_t i = 0; i < x.size(); ++i) {
                std::vector<double> lo = x, hi = x;
                lo[i] -= h;
                hi[i] += h;
                double numeric = (cost_and_grad(inst, params, hi, nullptr) -
                                  cost_and_grad(inst, params, lo, nullptr)) /
                                 (2 * h);
                CHECK(rel_err(grad[i], numeric) < 1e-6);
            }
        }
    }
}

TEST_CASE("local search solves the subtraction gadget") {
    SolverConfig cfg;
    cfg.seed = 1;
    SolveResult res = local_search(build_subtraction_gadget().instance, cfg);
    CHECK(res.cost <= 1e-10);
    double x = res.witness.weights.at(0).flt();
    double y = res.witness.weights.at(1).flt();
    CHECK(std::abs(x + y) < 1e-5);
}

TEST_CASE("local search solves the inversion gadget") {
    SolverConfig cfg;
    cfg.seed = 2;
    SolveResult res = local_search(build_inversion_gadget().instance, cfg);
    CHECK(res.cost <= 1e-8);
    double x = res.witness.weights.at(0).flt();
    double y = res.witness.weights.at(1).flt();
    double z = res.witness.weights.at(2).flt();
    CHECK(std::abs(y * z - 1) < 1e-3);
    CHECK(std::abs(x - z) < 1e-3);
}

TEST_CASE("local search is deterministic for a fixed config") {
    TrainingInstance inst = build_variable_gadget().instance;
    SolverConfig cfg;
    cfg.seed = 9;
    cfg.restarts = 10;
    cfg.max_iters = 500;
    SolveResult a = local_search(inst, cfg);
    SolveResult b = local_search(inst, cfg);
    CHECK(a.cost == b.cost);
    CHECK(a.restart == b.restart);
    FlatParams params = flat_params(inst);
    CHECK(flatten_witness(params, a.witness) == flatten_witness(params, b.witness));
}

TEST_CASE("grid search finds the lexicographically first zero-cost witness") {
    std::vector<Scalar> grid = {q(-1), q(0), q(1)};
    auto hit = grid_search(build_subtraction_gadget().instance, grid);
    REQUIRE(hit.has_value());
    CHECK(hit->weights.at(0) == q(-1));
    CHECK(hit->weights.at(1) == q(1));
    CHECK(verify_witness(build_subtraction_gadget().instance, *hit).accepted);
}

TEST_CASE("grid search on the inversion gadget respects parameter order") {
    std::vector<Scalar> grid = {q(-2), q(-1), q(-1, 2), q(1, 2), q(1), q(2)};
    GadgetInstance g = build_inversion_gadget();
    auto hit = grid_search(g.instance, grid);
    REQUIRE(hit.has_value());
    // DFS fixes x = -2 first; y*z = 1 and x = z force y = -1/2, z = -2
    CHECK(hit->weights.at(0) == q(-2));
    CHECK(hit->weights.at(1) == q(-1, 2));
    CHECK(hit->weights.at(2) == q(-2));
    CHECK(verify_witness(g.instance, *hit).total_cost == q(0));
}

TEST_CASE("grid search reports absence and budget overruns") {
    GadgetInstance g = build_inversion_gadget();
    CHECK(!grid_search(g.instance, {q(0), q(2), q(3)}).has_value());

    TrainingInstance big = compile_full(parse_etr_inv("x + y = z\n")).instance;
    CHECK_THROWS_AS(grid_search(big, {q(0), q(1)}, 10), BudgetExceeded);

    std::vector<Scalar> float_grid = {Scalar::floating(1.0)};
    CHECK_THROWS_AS(grid_search(g.instance, float_grid), ModeMismatch);
}

TEST_CASE("grid search recovers an assignment from a compiled formula") {
    CompilationResult res =
        compile_full(parse_etr_inv("x * y = 1\n"), Stage::restricted);
    std::vector<Scalar> grid = {q(-2), q(-1), q(-1, 2), q(1, 2), q(1), q(2)};
    auto hit = grid_search(res.instance, grid, 2'000'000'000ULL);
    REQUIRE(hit.has_value());
    CHECK(verify_witness(res.instance, *hit).total_cost == q(0));
    Assignment back = extract_assignment(res.instance, *hit, res.map);
    EtrInvFormula f = parse_etr_inv("x * y = 1\n");
    CHECK(evaluate_formula(f, back).satisfied);
    CHECK(back.values[0] * back.values[1] == q(1));
}
