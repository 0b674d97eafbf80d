#ifndef NNTC_SOLVER_HPP
#define NNTC_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "nntc/eval.hpp"

namespace nntc {

struct SolverConfig {
    int restarts = 100;
    int max_iters = 5000;
    double step = 0.01;
    double init_lo = -2.0;
    double init_hi = 2.0;
    std::uint64_t seed = 0;
    double target_tol = 1e-10;
};

struct SolveResult {
    Witness witness;  // float mode
    double cost = 0.0;
    int restart = -1;  // restart that produced the returned witness
};

// The instance's free parameters in a fixed order: free edges by id, then
// free biases by neuron id. This is the coordinate system of the gradient.
struct FlatParams {
    std::vector<int> edge_ids;
    std::vector<int> bias_ids;

    size_t size() const { return edge_ids.size() + bias_ids.size(); }
};

FlatParams flat_params(const TrainingInstance& inst);

Witness witness_from_flat(const FlatParams& params, const std::vector<double>& x);
std::vector<double> flatten_witness(const FlatParams& params, const Witness& w);

// Total cost and its analytic gradient at x (backpropagation through the
// DAG). ReLU uses derivative 0 at the kink; l1 uses sign(r) with sign(0)=0.
double cost_and_grad(const TrainingInstance& inst, const FlatParams& params,
                     const std::vector<double>& x, std::vector<double>* grad);

// Plain gradient descent with uniform random restarts. Deterministic for a
// fixed config; ties between restarts go to the lower restart index. A
// restart whose iterates turn non-finite is abandoned.
SolveResult local_search(const TrainingInstance& inst, const SolverConfig& cfg);

// Exhaustive exact search over grid^k in lexicographic parameter order
// (order of FlatParams), with per-data-point pruning. Returns the first
// witness of cost exactly 0, or nullopt. Throws BudgetExceeded when
// |grid|^k > budget.
std::optional<Witness> grid_search(const TrainingInstance& inst,
                                   const std::vector<Scalar>& grid,
                                   std::uint64_t budget = 10'000'000);

} // namespace nntc

#endif
