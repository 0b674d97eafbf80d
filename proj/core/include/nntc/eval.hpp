#ifndef NNTC_EVAL_HPP
#define NNTC_EVAL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nntc/network.hpp"

namespace nntc {

// Values for every free weight and free bias of one instance. Exact and
// float witnesses never mix.
struct Witness {
    Scalar::Mode mode = Scalar::Mode::exact;
    std::map<int, Scalar> weights;  // free edge id -> value
    std::map<int, Scalar> biases;   // free-bias neuron id -> value

    bool operator==(const Witness&) const = default;
};

struct VerifyReport {
    bool accepted = false;
    Scalar total_cost;
    std::vector<Scalar> datapoint_costs;
    // residuals[d][t] = predicted - target at output t (zero where ignored)
    std::vector<std::vector<Scalar>> residuals;
};

// Evaluates the network in topological order. Activations: identity t,
// relu max{0,t}, shifted_relu max{C,t}. The witness mode selects exact or
// float arithmetic; instance constants are converted when evaluating a
// float witness.
std::vector<Scalar> forward_eval(const TrainingInstance& inst, const Witness& w,
                                 const std::vector<Scalar>& inputs);

// mse: mean of squared differences; l1: sum of absolute differences.
// Both are honest: zero exactly when the vectors are equal.
Scalar cost_value(CostKind tag, const std::vector<Scalar>& target,
                  const std::vector<Scalar>& predicted);

// Sum of per-data-point costs. Outputs marked '?' are skipped; the mse
// divisor is the number of non-ignored coordinates of that data point.
Scalar total_cost(const TrainingInstance& inst, const Witness& w);

// Exact mode: accepted iff total cost <= threshold, no rounding. Float
// mode: accepted iff total cost <= threshold + tolerance.
VerifyReport verify_witness(const TrainingInstance& inst, const Witness& w,
                            std::optional<Scalar> tolerance = {});

// Checks the witness assigns exactly the instance's free weights and free
// biases; throws IdMismatch / ModeMismatch otherwise.
void check_witness_shape(const TrainingInstance& inst, const Witness& w);

// Witness file: {"mode": "exact"|"float", "weights": {...}, "biases": {...}}
// with exact scalars as "p/q" strings and float scalars as JSON numbers.
std::string encode_witness(const Witness& w);
Witness decode_witness(const std::string& bytes);

} // namespace nntc

#endif
