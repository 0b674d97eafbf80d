#include "nntc/eval.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace nntc {

namespace {

Scalar in_mode(const Scalar& s, Scalar::Mode mode) {
    return mode == Scalar::Mode::floating ? s.to_float_mode() : s;
}

Scalar apply_activation(const Neuron& n, Scalar t, Scalar::Mode mode) {
    switch (n.activation) {
        case Activation::identity:
            return t;
        case Activation::relu: {
            Scalar zero = Scalar::zero(mode);
            return t < zero ? zero : t;
        }
        case Activation::shifted_relu: {
            Scalar c = in_mode(n.shift, mode);
            return t < c ? c : t;
        }
    }
    return t;
}

std::vector<int> topological_order(const TrainingInstance& inst) {
    const int nn = static_cast<int>(inst.neurons.size());
    std::vector<int> indeg(nn, 0);
    std::vector<std::vector<int>> out(nn);
    for (const auto& e : inst.edges) {
        ++indeg[e.dst];
        out[e.src].push_back(e.dst);
    }
    std::vector<int> order;
    for (int i = 0; i < nn; ++i)
        if (indeg[i] == 0) order.push_back(i);
    for (size_t i = 0; i < order.size(); ++i)
        for (int d : out[order[i]])
            if (--indeg[d] == 0) order.push_back(d);
    if (order.size() != static_cast<size_t>(nn))
        throw Error("network contains a cycle");
    return order;
}

} // namespace

void check_witness_shape(const TrainingInstance& inst, const Witness& w) {
    size_t free_edges = 0, free_biases = 0;
    for (const auto& e : inst.edges)
        if (!e.fixed_weight) {
            ++free_edges;
            if (!w.weights.count(e.id))
                throw IdMismatch("witness misses weight for edge " + std::to_string(e.id));
        }
    for (const auto& n : inst.neurons)
        if (n.role != Role::input && !n.fixed_bias) {
            ++free_biases;
            if (!w.biases.count(n.id))
                throw IdMismatch("witness misses bias for neuron " + std::to_string(n.id));
        }
    if (w.weights.size() != free_edges)
        throw IdMismatch("witness assigns weights to non-free edges");
    if (w.biases.size() != free_biases)
        throw IdMismatch("witness assigns biases to non-free neurons");
    for (const auto& [id, v] : w.weights)
        if (v.mode() != w.mode) throw ModeMismatch("witness weight mode mismatch");
    for (const auto& [id, v] : w.biases)
        if (v.mode() != w.mode) throw ModeMismatch("witness bias mode mismatch");
}

std::vector<Scalar> forward_eval(const TrainingInstance& inst, const Witness& w,
                                 const std::vector<Scalar>& inputs) {
    const auto in_ids = inst.input_ids();
    if (inputs.size() != in_ids.size())
        throw IncompatibleDimensions("expected " + std::to_string(in_ids.size()) +
                                     " input values, got " + std::to_string(inputs.size()));
    const Scalar::Mode mode = w.mode;
    const int nn = static_cast<int>(inst.neurons.size());

    std::vector<Scalar> value(nn, Scalar::zero(mode));
    for (size_t i = 0; i < in_ids.size(); ++i) value[in_ids[i]] = in_mode(inputs[i], mode);

    std::vector<std::vector<const Edge*>> incoming(nn);
    for (const auto& e : inst.edges) incoming[e.dst].push_back(&e);

    for (int id : topological_order(inst)) {
        const Neuron& n = inst.neurons[id];
        if (n.role == Role::input) continue;
        Scalar acc = n.fixed_bias ? in_mode(*n.fixed_bias, mode)
                                  : in_mode(w.biases.at(id), mode);
        for (const Edge* e : incoming[id]) {
            Scalar wt = e->fixed_weight ? in_mode(*e->fixed_weight, mode)
                                        : in_mode(w.weights.at(e->id), mode);
            acc = acc + wt * value[e->src];
        }
        value[id] = apply_activation(n, acc, mode);
    }

    std::vector<Scalar> result;
    for (int id : inst.output_ids()) result.push_back(value[id]);
    return result;
}

Scalar cost_value(CostKind tag, const std::vector<Scalar>& target,
                  const std::vector<Scalar>& predicted) {
    if (target.size() != predicted.size())
        throw LengthMismatch("cost over vectors of different length");
    if (target.empty()) throw LengthMismatch("cost over empty vectors");
    Scalar::Mode mode = predicted.empty() ? Scalar::Mode::exact : predicted.front().mode();
    Scalar acc = Scalar::zero(mode);
    for (size_t i = 0; i < target.size(); ++i) {
        Scalar diff = target[i] - predicted[i];
        acc = acc + (tag == CostKind::mse ? diff * diff : diff.abs());
    }
    if (tag == CostKind::mse) {
        Scalar count = mode == Scalar::Mode::exact
                           ? Scalar::exact(static_cast<long long>(target.size()))
                           : Scalar::floating(static_cast<double>(target.size()));
        acc = acc / count;
    }
    return acc;
}

Scalar total_cost(const TrainingInstance& inst, const Witness& w) {
    return verify_witness(inst, w, w.mode == Scalar::Mode::floating
                                       ? std::optional<Scalar>(Scalar::floating(0.0))
                                       : std::nullopt)
        .total_cost;
}

VerifyReport verify_witness(const TrainingInstance& inst, const Witness& w,
                            std::optional<Scalar> tolerance) {
    check_witness_shape(inst, w);
    if (w.mode == Scalar::Mode::exact && tolerance && !tolerance->is_zero())
        throw ModeMismatch("exact verification admits no tolerance");
    const Scalar::Mode mode = w.mode;

    VerifyReport rep;
    rep.total_cost = Scalar::zero(mode);
    for (const auto& d : inst.data) {
        std::vector<Scalar> predicted = forward_eval(inst, w, d.inputs);
        std::vector<Scalar> y, yp, res;
        res.reserve(d.outputs.size());
        for (size_t t = 0; t < d.outputs.size(); ++t) {
            if (d.outputs[t].ignore) {
                res.push_back(Scalar::zero(mode));
                continue;
            }
            Scalar tgt = in_mode(d.outputs[t].value, mode);
            y.push_back(tgt);
            yp.push_back(predicted[t]);
            res.push_back(predicted[t] - tgt);
        }
        Scalar c = y.empty() ? Scalar::zero(mode) : cost_value(inst.cost, y, yp);
        rep.total_cost = rep.total_cost + c;
        rep.datapoint_costs.push_back(std::move(c));
        rep.residuals.push_back(std::move(res));
    }
    Scalar bound = in_mode(inst.threshold, mode);
    if (tolerance) bound = bound + in_mode(*tolerance, mode);
    rep.accepted = rep.total_cost <= bound;
    return rep;
}

std::string encode_witness(const Witness& w) {
    nlohmann::json j;
    j["mode"] = w.mode == Scalar::Mode::exact ? "exact" : "float";
    j["weights"] = nlohmann::json::object();
    for (const auto& [id, v] : w.weights) {
        if (v.is_exact()) j["weights"][std::to_string(id)] = v.str();
        else j["weights"][std::to_string(id)] = v.flt();
    }
    j["biases"] = nlohmann::json::object();
    for (const auto& [id, v] : w.biases) {
        if (v.is_exact()) j["biases"][std::to_string(id)] = v.str();
        else j["biases"][std::to_string(id)] = v.flt();
    }
    return j.dump(2) + "\n";
}

Witness decode_witness(const std::string& bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("/: ") + e.what());
    }
    Witness w;
    try {
        std::string mode = j.at("mode").get<std::string>();
        if (mode == "exact") w.mode = Scalar::Mode::exact;
        else if (mode == "float") w.mode = Scalar::Mode::floating;
        else throw SchemaError("/mode: unknown value '" + mode + "'");
        auto read_map = [&](const char* key, std::map<int, Scalar>& into) {
            for (auto& [k, v] : j.at(key).items()) {
                Scalar s = v.is_string() ? Scalar::parse_exact(v.get<std::string>())
                                         : Scalar::floating(v.get<double>());
                if (s.mode() != w.mode)
                    throw ModeMismatch(std::string("/") + key + "/" + k +
                                       ": scalar mode differs from witness mode");
                into[std::stoi(k)] = std::move(s);
            }
        };
        read_map("weights", w.weights);
        read_map("biases", w.biases);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("/: ") + e.what());
    }
    return w;
}

} // namespace nntc
