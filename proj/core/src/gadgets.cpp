#include "nntc/gadgets.hpp"

namespace nntc {

namespace {

const Scalar kZero = Scalar::exact(0);
const Scalar kOne = Scalar::exact(1);
const Scalar kMinusOne = Scalar::exact(-1);

Neuron make_neuron(int id, Role role) {
    Neuron n;
    n.id = id;
    n.role = role;
    if (role != Role::input) n.fixed_bias = kZero;
    return n;
}

Edge free_edge(int id, int src, int dst) { return {id, src, dst, std::nullopt}; }
Edge fixed_edge(int id, int src, int dst, Scalar w) { return {id, src, dst, std::move(w)}; }

DataPoint point(std::vector<int> ones, int n_inputs, std::vector<Target> outputs) {
    DataPoint d;
    d.inputs.assign(n_inputs, kZero);
    for (int i : ones) d.inputs[i] = kOne;
    d.outputs = std::move(outputs);
    return d;
}

Target val(long long v) { return Target::of(Scalar::exact(v)); }
Target q() { return Target::question(); }

// Appends one variable gadget wired against shared outputs a and b.
// Neuron ids: inputs base_in..base_in+4, middles base_mid..base_mid+3;
// edge ids base_edge..base_edge+10 in the order
// (w, x, y, z, v, m1a, m2a, m3a, m4a, m2b, s5m3).
void append_variable_gadget(TrainingInstance& inst, int base_in, int base_mid,
                            int a, int b, int base_edge) {
    const int s1 = base_in, s2 = base_in + 1, s3 = base_in + 2, s5 = base_in + 4;
    const int s4 = base_in + 3;
    const int m1 = base_mid, m2 = base_mid + 1, m3 = base_mid + 2, m4 = base_mid + 3;
    int e = base_edge;
    inst.edges.push_back(free_edge(e++, s1, m1));   // w = -x
    inst.edges.push_back(free_edge(e++, s2, m2));   // x
    inst.edges.push_back(free_edge(e++, s3, m3));   // y = 1/x
    inst.edges.push_back(free_edge(e++, s4, m4));   // z = -1/x
    inst.edges.push_back(free_edge(e++, m3, b));    // v = x
    inst.edges.push_back(fixed_edge(e++, m1, a, kOne));
    inst.edges.push_back(fixed_edge(e++, m2, a, kOne));
    inst.edges.push_back(fixed_edge(e++, m3, a, kOne));
    inst.edges.push_back(fixed_edge(e++, m4, a, kOne));
    inst.edges.push_back(fixed_edge(e++, m2, b, kOne));
    inst.edges.push_back(fixed_edge(e++, s5, m3, kMinusOne));
}

} // namespace

GadgetInstance build_subtraction_gadget() {
    GadgetInstance g;
    TrainingInstance& inst = g.instance;
    inst.kind = InstanceKind::restricted;
    inst.neurons = {make_neuron(0, Role::input), make_neuron(1, Role::input),
                    make_neuron(2, Role::hidden), make_neuron(3, Role::hidden),
                    make_neuron(4, Role::output)};
    inst.edges = {free_edge(0, 0, 2), free_edge(1, 1, 3),
                  fixed_edge(2, 2, 4, kOne), fixed_edge(3, 3, 4, kOne)};
    inst.data = {point({0, 1}, 2, {val(0)})};
    g.free_edge_ids = {0, 1};
    return g;
}

GadgetInstance build_inversion_gadget() {
    GadgetInstance g;
    TrainingInstance& inst = g.instance;
    inst.kind = InstanceKind::restricted;
    inst.neurons = {make_neuron(0, Role::input),  make_neuron(1, Role::input),
                    make_neuron(2, Role::input),  make_neuron(3, Role::hidden),
                    make_neuron(4, Role::hidden), make_neuron(5, Role::output)};
    inst.edges = {free_edge(0, 0, 3), free_edge(1, 1, 4), free_edge(2, 4, 5),
                  fixed_edge(3, 3, 5, kOne), fixed_edge(4, 2, 4, kMinusOne)};
    inst.data = {point({1}, 3, {val(1)}), point({0, 2}, 3, {val(0)})};
    g.free_edge_ids = {0, 1, 2};
    return g;
}

GadgetInstance build_variable_gadget() {
    GadgetInstance g;
    TrainingInstance& inst = g.instance;
    inst.kind = InstanceKind::restricted;
    for (int i = 0; i < 5; ++i) inst.neurons.push_back(make_neuron(i, Role::input));
    for (int i = 5; i < 9; ++i) inst.neurons.push_back(make_neuron(i, Role::hidden));
    inst.neurons.push_back(make_neuron(9, Role::output));    // a
    inst.neurons.push_back(make_neuron(10, Role::output));   // b
    append_variable_gadget(inst, 0, 5, 9, 10, 0);
    inst.data = {point({0, 1}, 5, {val(0), q()}),    // d1: w = -x
                 point({2, 3}, 5, {val(0), q()}),    // d2: y = -z
                 point({2}, 5, {q(), val(1)}),       // d3: y*v = 1
                 point({1, 4}, 5, {q(), val(0)})};   // d4: v = x
    g.free_edge_ids = {0, 1, 2, 3, 4};
    return g;
}

std::array<SlotEntry, 4> variable_gadget_slots() {
    // value -> x edge, negated -> w edge, inverse -> y edge,
    // negated_inverse -> z edge.
    return {{{1, 1}, {0, 0}, {2, 2}, {3, 3}}};
}

std::pair<TrainingInstance, SlotTable> compile_restricted(const CombinedFormula& cf) {
    if (cf.constraints.empty()) throw Error("cannot compile an empty combined formula");
    const int n = cf.var_count();
    TrainingInstance inst;
    inst.kind = InstanceKind::restricted;

    const int a = 9 * n, b = 9 * n + 1;
    for (int i = 0; i < 5 * n; ++i) inst.neurons.push_back(make_neuron(i, Role::input));
    for (int i = 5 * n; i < 9 * n; ++i) inst.neurons.push_back(make_neuron(i, Role::hidden));
    inst.neurons.push_back(make_neuron(a, Role::output));
    inst.neurons.push_back(make_neuron(b, Role::output));

    SlotTable slots;
    for (int i = 0; i < n; ++i) {
        int base_in = 5 * i, base_mid = 5 * n + 4 * i, base_edge = 11 * i;
        append_variable_gadget(inst, base_in, base_mid, a, b, base_edge);
        slots.rows.push_back({{{base_edge + 1, base_in + 1},
                               {base_edge + 0, base_in + 0},
                               {base_edge + 2, base_in + 2},
                               {base_edge + 3, base_in + 3}}});
    }

    for (int i = 0; i < n; ++i) {
        int s = 5 * i;
        inst.data.push_back(point({s + 0, s + 1}, 5 * n, {val(0), q()}));
        inst.data.push_back(point({s + 2, s + 3}, 5 * n, {val(0), q()}));
        inst.data.push_back(point({s + 2}, 5 * n, {q(), val(1)}));
        inst.data.push_back(point({s + 1, s + 4}, 5 * n, {q(), val(0)}));
    }
    for (const auto& c : cf.constraints)
        inst.data.push_back(add_combined_constraint_datapoint(inst, c, slots));

    return {std::move(inst), std::move(slots)};
}

DataPoint add_combined_constraint_datapoint(const TrainingInstance& inst,
                                            const CombinedConstraint& c,
                                            const SlotTable& slots) {
    const auto in_ids = inst.input_ids();
    std::vector<int> pos_of_id(inst.neurons.size(), -1);
    for (size_t i = 0; i < in_ids.size(); ++i) pos_of_id[in_ids[i]] = static_cast<int>(i);

    DataPoint d;
    d.inputs.assign(in_ids.size(), kZero);
    for (const auto& t : c.terms) {
        int input = slots.at(t.var, slot_form(t)).input_id;
        int pos = pos_of_id.at(input);
        if (d.inputs[pos] == kOne)
            throw SlotCollision("two terms of a combined constraint share one input neuron");
        d.inputs[pos] = kOne;
    }
    d.outputs = {val(0), q()};  // 0 at a, '?' at b
    return d;
}

} // namespace nntc
