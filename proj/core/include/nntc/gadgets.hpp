#ifndef NNTC_GADGETS_HPP
#define NNTC_GADGETS_HPP

#include <array>
#include <vector>

#include "nntc/combined.hpp"
#include "nntc/network.hpp"

namespace nntc {

struct SlotEntry {
    int edge_id = -1;
    int input_id = -1;

    bool operator==(const SlotEntry&) const = default;
};

// Per combined variable, the four first-layer free edges carrying
// x, -x, 1/x and -1/x, together with their input neurons.
struct SlotTable {
    std::vector<std::array<SlotEntry, 4>> rows;  // indexed by variable, then SlotForm

    const SlotEntry& at(int var, SlotForm f) const {
        return rows.at(var)[static_cast<int>(f)];
    }

    bool operator==(const SlotTable&) const = default;
};

struct GadgetInstance {
    TrainingInstance instance;
    std::vector<int> free_edge_ids;  // in role order
};

// Five neurons, four edges, two fixed weights, one data point (1,1;0).
// Zero cost forces x = -y on the two free first-layer weights.
GadgetInstance build_subtraction_gadget();

// Six neurons, five edges, two fixed weights, data points (0,1,0;1) and
// (1,0,1;0). Zero cost forces y*z = 1 and x = z, hence x*y = 1.
GadgetInstance build_inversion_gadget();

// Five inputs, four middles, two outputs; free weights (w, x, y, z, v).
// Zero cost forces exactly w = -x, y = 1/x, z = -1/x, v = x (so x != 0).
GadgetInstance build_variable_gadget();

// The slot entries of a standalone variable gadget.
std::array<SlotEntry, 4> variable_gadget_slots();

// One variable gadget per combined variable, output neurons shared, plus
// one data point per combined constraint with input 1 exactly at the three
// term slots, output 0 at a and '?' at b. All biases fixed to 0.
std::pair<TrainingInstance, SlotTable> compile_restricted(const CombinedFormula& cf);

// The data point representing one combined constraint; throws
// SlotCollision if two terms would share an input neuron.
DataPoint add_combined_constraint_datapoint(const TrainingInstance& inst,
                                            const CombinedConstraint& c,
                                            const SlotTable& slots);

} // namespace nntc

#endif
