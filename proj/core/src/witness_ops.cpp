#include "nntc/witness_ops.hpp"

#include <algorithm>

namespace nntc {

namespace {

Scalar in_mode(const Scalar& s, Scalar::Mode mode) {
    return mode == Scalar::Mode::floating ? s.to_float_mode() : s;
}

int position_of(const std::vector<int>& ids, int id) {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw IdMismatch("unknown neuron id " + std::to_string(id));
    return static_cast<int>(it - ids.begin());
}

} // namespace

Witness synthesize_witness(const TrainingInstance& inst, const CompilationMap& map,
                           const Assignment& original, const SynthesisOptions& opts) {
    const Scalar::Mode mode = original.mode();
    Assignment combined = push_forward(map.combined, original);

    Witness w;
    w.mode = mode;
    for (int i = 0; i < map.combined.var_count(); ++i) {
        const Scalar& x = combined.values[i];
        if (x.is_zero())
            throw ZeroInverse("variable '" + map.combined.variables[i].name +
                              "' must be nonzero");
        w.weights[map.slots.at(i, SlotForm::value).edge_id] = x;
        w.weights[map.slots.at(i, SlotForm::negated).edge_id] = -x;
        w.weights[map.slots.at(i, SlotForm::inverse).edge_id] = x.inverse();
        w.weights[map.slots.at(i, SlotForm::negated_inverse).edge_id] = -x.inverse();
        w.weights[map.value_edges[i]] = x;
    }
    const Scalar one = Scalar::one(mode);
    for (const auto& p : map.normalization) {
        w.weights[p.in_edge_id] = one;
        w.weights[p.out_edge_id] = one;
    }
    for (const auto& f : map.fixes)
        w.weights[f.edge_id] = f.target > 0 ? one : -one;
    for (const auto& n : inst.neurons)
        if (n.role != Role::input && !n.fixed_bias) w.biases[n.id] = Scalar::zero(mode);

    // Correction pairs: with the incoming weight 1 the new middle carries 1
    // exactly at its own data point, so the outgoing weight -c cancels the
    // residual c the rest of the network produces there.
    const auto out_ids = inst.output_ids();
    for (const auto& q : map.qmarks) {
        w.weights[q.in_edge_id] = one;
        w.weights[q.out_edge_id] = Scalar::zero(mode);
    }
    for (const auto& q : map.qmarks) {
        auto predicted = forward_eval(inst, w, inst.data[q.datapoint_index].inputs);
        w.weights[q.out_edge_id] = -predicted[position_of(out_ids, q.output_id)];
    }

    if (opts.require_satisfying) {
        std::optional<Scalar> tol;
        if (mode == Scalar::Mode::floating)
            tol = opts.tolerance ? in_mode(*opts.tolerance, mode)
                                 : Scalar::floating(1e-9);
        VerifyReport rep = verify_witness(inst, w, tol);
        if (!rep.accepted)
            throw UnsatisfyingAssignment("synthesized witness has cost " +
                                         rep.total_cost.str());
    }
    return w;
}

Witness fold_biases(const TrainingInstance& inst, const Witness& w) {
    for (const auto& n : inst.neurons)
        if (n.role != Role::input && n.activation != Activation::identity)
            throw NonIdentityActivation("bias folding requires identity activations");

    Witness out = w;
    for (const auto& n : inst.neurons) {
        if (n.role != Role::hidden) continue;
        auto it = out.biases.find(n.id);
        if (it == out.biases.end() || it->second.is_zero()) continue;
        const Scalar b = it->second;
        for (const auto& e : inst.edges) {
            if (e.src != n.id) continue;
            Scalar z = e.fixed_weight ? in_mode(*e.fixed_weight, w.mode)
                                      : out.weights.at(e.id);
            auto dst = out.biases.find(e.dst);
            if (dst == out.biases.end())
                throw NonIdentityActivation("cannot fold into a fixed bias");
            dst->second = dst->second + z * b;
        }
        it->second = Scalar::zero(w.mode);
    }
    return out;
}

Witness normalize_witness(const TrainingInstance& inst, const Witness& w,
                          const CompilationMap& map) {
    Witness out = w;
    for (const auto& p : map.normalization) {
        const Scalar z1 = out.weights.at(p.in_edge_id);
        if (z1.is_zero())
            throw ZeroScalingWeight("normalization weight z1 of middle " +
                                    std::to_string(p.middle_id) + " is zero");
        const Scalar alpha = z1.inverse();
        for (const auto& e : inst.edges) {
            if (e.fixed_weight) continue;
            if (e.dst == p.middle_id)
                out.weights.at(e.id) = out.weights.at(e.id) * alpha;
            else if (e.src == p.middle_id)
                out.weights.at(e.id) = out.weights.at(e.id) * z1;
        }
        auto bias = out.biases.find(p.middle_id);
        if (bias != out.biases.end()) bias->second = bias->second * alpha;
    }
    return out;
}

Assignment extract_assignment(const TrainingInstance& inst, const Witness& w,
                              const CompilationMap& map) {
    VerifyReport rep = verify_witness(inst, w);
    if (!rep.accepted || !rep.total_cost.is_zero())
        throw NotZeroCost("witness has cost " + rep.total_cost.str());

    Witness canonical = normalize_witness(inst, fold_biases(inst, w), map);
    Assignment combined;
    combined.values.reserve(map.combined.var_count());
    for (int i = 0; i < map.combined.var_count(); ++i)
        combined.values.push_back(
            canonical.weights.at(map.slots.at(i, SlotForm::value).edge_id));
    return pull_back(map.combined, combined);
}

} // namespace nntc
