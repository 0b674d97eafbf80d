#ifndef NNTC_NETWORK_HPP
#define NNTC_NETWORK_HPP

#include <optional>
#include <string>
#include <vector>

#include "nntc/scalar.hpp"

namespace nntc {

struct Witness;  // defined in eval.hpp

enum class Role { input, hidden, output };
enum class Activation { identity, relu, shifted_relu };
enum class CostKind { mse, l1 };
enum class InstanceKind { restricted, plain };

struct Neuron {
    int id = -1;
    Role role = Role::hidden;
    Activation activation = Activation::identity;  // non-input only
    Scalar shift;                                  // shifted_relu parameter
    std::optional<Scalar> fixed_bias;              // nullopt = free bias

    bool operator==(const Neuron&) const = default;
};

struct Edge {
    int id = -1;
    int src = -1;
    int dst = -1;
    std::optional<Scalar> fixed_weight;  // nullopt = free weight

    bool operator==(const Edge&) const = default;
};

// One output target: a required value or '?' (ignored by the cost).
struct Target {
    bool ignore = false;
    Scalar value;

    static Target of(Scalar v) { return {false, std::move(v)}; }
    static Target question() { return {true, Scalar::exact(0)}; }

    bool operator==(const Target&) const = default;
};

// Input entries follow the input neurons in id order; output entries
// follow the output neurons in id order.
struct DataPoint {
    std::vector<Scalar> inputs;
    std::vector<Target> outputs;

    bool operator==(const DataPoint&) const = default;
};

struct TrainingInstance {
    InstanceKind kind = InstanceKind::restricted;
    CostKind cost = CostKind::mse;
    Scalar threshold = Scalar::exact(0);
    std::vector<Neuron> neurons;
    std::vector<Edge> edges;
    std::vector<DataPoint> data;

    std::vector<int> input_ids() const;
    std::vector<int> output_ids() const;

    bool operator==(const TrainingInstance&) const = default;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;

    void fail(std::string msg) {
        ok = false;
        violations.push_back(std::move(msg));
    }
};

// Structural checks: dense ids, DAG-ness, two-layer layering, dimension
// and kind consistency. Strict mode additionally asserts the compiled-
// instance shape: one hidden layer, exactly three output neurons, identity
// activations, threshold 0, and every data entry in {0,1}. Always returns
// a report, never throws.
ValidationReport validate_instance(const TrainingInstance& inst, bool strict = false);

// Canonical JSON encoding; structurally equal instances encode to
// identical bytes, and decode(encode(x)) == x.
std::string encode_instance(const TrainingInstance& inst);
TrainingInstance decode_instance(const std::string& bytes);

// Graphviz digraph. Free weights are labeled "w<id>", or with their value
// when a witness is supplied; fixed weights with their value.
std::string emit_dot(const TrainingInstance& inst, const Witness* witness = nullptr);

} // namespace nntc

#endif
