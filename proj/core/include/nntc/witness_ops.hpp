#ifndef NNTC_WITNESS_OPS_HPP
#define NNTC_WITNESS_OPS_HPP

#include "nntc/eval.hpp"
#include "nntc/lowering.hpp"

namespace nntc {

struct SynthesisOptions {
    // Reject witnesses that do not reach the threshold. Criterion-style
    // experiments with deliberately unsatisfying assignments turn this off.
    bool require_satisfying = true;
    // Acceptance slack for float-mode synthesis (ignored in exact mode).
    std::optional<Scalar> tolerance;
};

// Builds the witness the construction prescribes for a satisfying
// assignment of the source formula: slot edges get (x, -x, 1/x, -1/x),
// the v edge gets x, formerly fixed edges their +/-1 target, normalization
// pairs (1, 1), correction pairs (1, -c), and all free biases 0.
Witness synthesize_witness(const TrainingInstance& inst, const CompilationMap& map,
                           const Assignment& original,
                           const SynthesisOptions& opts = {});

// Zeroes every hidden-neuron bias by absorbing z_i * b into the biases of
// its successors. Function-preserving for identity activations only.
Witness fold_biases(const TrainingInstance& inst, const Witness& w);

// Rescales each normalization-pair middle by alpha = 1/z1 so that its
// s_m -> m edge carries weight exactly 1. Function-preserving; apply
// fold_biases first (middle biases are scaled along, so a nonzero one
// would still be preserved, but extraction assumes they are gone).
Witness normalize_witness(const TrainingInstance& inst, const Witness& w,
                          const CompilationMap& map);

// Inverse of synthesis for zero-cost witnesses: canonicalize, read each
// variable's value-slot weight, and pull the combined assignment back
// through the lowering backmap.
Assignment extract_assignment(const TrainingInstance& inst, const Witness& w,
                              const CompilationMap& map);

} // namespace nntc

#endif
