#ifndef NNTC_LOWERING_HPP
#define NNTC_LOWERING_HPP

#include <string>
#include <utility>
#include <vector>

#include "nntc/gadgets.hpp"

namespace nntc {

enum class Stage { restricted, fixedfree, plain };

std::string stage_name(Stage s);
Stage parse_stage(const std::string& name);

// Per-middle helper pair added by the fixed-weight removal pass: the new
// input s_m and the two free edges s_m -> m and m -> q.
struct NormalizationPair {
    int middle_id = -1;
    int input_id = -1;
    int in_edge_id = -1;   // s_m -> m  (z1)
    int out_edge_id = -1;  // m  -> q   (z2)

    bool operator==(const NormalizationPair&) const = default;
};

// A formerly fixed edge and the data point that now pins its value.
struct FixRecord {
    int edge_id = -1;
    int datapoint_index = -1;
    int target = +1;  // +1 or -1

    bool operator==(const FixRecord&) const = default;
};

// One removed '?' entry and the correction pair that replaced it.
struct QmarkRecord {
    int datapoint_index = -1;
    int output_id = -1;
    int new_input_id = -1;
    int new_middle_id = -1;
    int in_edge_id = -1;   // new input -> new middle
    int out_edge_id = -1;  // new middle -> output

    bool operator==(const QmarkRecord&) const = default;
};

// Provenance trace from formula variables to instance ids across all
// lowering passes; everything witness synthesis and extraction need.
struct CompilationMap {
    Stage stage = Stage::restricted;
    std::vector<std::string> source_variables;  // names, by source index
    CombinedFormula combined;
    SlotTable slots;
    std::vector<int> value_edges;  // per combined variable, the m3 -> b edge (v)
    int output_a = -1, output_b = -1, output_q = -1;
    std::vector<NormalizationPair> normalization;
    std::vector<FixRecord> fixes;
    std::vector<QmarkRecord> qmarks;

    bool operator==(const CompilationMap&) const = default;
};

struct FixedWeightRemoval {
    int q_id = -1;
    std::vector<NormalizationPair> normalization;
    std::vector<FixRecord> fixes;
};

// Replaces every fixed +/-1 weight by a free weight pinned through the
// extra output q: per middle m a pair (s_m -> m, m -> q) with data point
// d(m) forcing z1*z2 = 1, then one fixing data point per formerly fixed
// edge. Requires a two-layer restricted instance in which every middle is
// incident to a fixed edge.
std::pair<TrainingInstance, FixedWeightRemoval>
remove_fixed_weights(const TrainingInstance& inst);

// Frees all biases and appends the all-zero data point (no '?' entries)
// that pins the output biases to zero. Idempotent.
TrainingInstance add_bias_anchor(const TrainingInstance& inst);

// Replaces every '?' by 0, adding per '?' an input, a middle and the two
// free correction edges that emulate the ignored output. Requires the
// bias anchor to be present; the result is a plain instance.
std::pair<TrainingInstance, std::vector<QmarkRecord>>
remove_question_marks(const TrainingInstance& inst);

struct CompilationResult {
    TrainingInstance instance;
    CompilationMap map;
};

// Full pipeline: lower to combined constraints, build the gadget network,
// then remove fixed weights, free the biases, and remove question marks.
// `stop` exposes the intermediate stages.
CompilationResult compile_full(const EtrInvFormula& f, Stage stop = Stage::plain);
CompilationResult compile_from_combined(const CombinedFormula& cf, Stage stop = Stage::plain);

// Map sidecar file (canonical JSON, byte-stable round trip).
std::string encode_map(const CompilationMap& map);
CompilationMap decode_map(const std::string& bytes);

} // namespace nntc

#endif
