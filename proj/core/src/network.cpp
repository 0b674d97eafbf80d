#include "nntc/network.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

#include "nntc/eval.hpp"

namespace nntc {

std::vector<int> TrainingInstance::input_ids() const {
    std::vector<int> ids;
    for (const auto& n : neurons)
        if (n.role == Role::input) ids.push_back(n.id);
    return ids;
}

std::vector<int> TrainingInstance::output_ids() const {
    std::vector<int> ids;
    for (const auto& n : neurons)
        if (n.role == Role::output) ids.push_back(n.id);
    return ids;
}

ValidationReport validate_instance(const TrainingInstance& inst, bool strict) {
    ValidationReport rep;
    const int nn = static_cast<int>(inst.neurons.size());

    for (int i = 0; i < nn; ++i)
        if (inst.neurons[i].id != i) {
            rep.fail("neuron ids are not dense at position " + std::to_string(i));
            return rep;
        }
    for (size_t i = 0; i < inst.edges.size(); ++i) {
        const auto& e = inst.edges[i];
        if (e.id != static_cast<int>(i))
            rep.fail("edge ids are not dense at position " + std::to_string(i));
        if (e.src < 0 || e.src >= nn || e.dst < 0 || e.dst >= nn) {
            rep.fail("edge " + std::to_string(e.id) + " references a missing neuron");
            return rep;
        }
        if (e.src == e.dst)
            rep.fail("edge " + std::to_string(e.id) + " is a self-loop");
    }

    std::vector<int> indeg(nn, 0), outdeg(nn, 0);
    for (const auto& e : inst.edges) {
        ++outdeg[e.src];
        ++indeg[e.dst];
    }

    // Kahn topological sort for DAG-ness.
    {
        std::vector<int> deg = indeg;
        std::vector<int> queue;
        for (int i = 0; i < nn; ++i)
            if (deg[i] == 0) queue.push_back(i);
        size_t seen = 0;
        std::vector<std::vector<int>> out(nn);
        for (const auto& e : inst.edges) out[e.src].push_back(e.dst);
        while (seen < queue.size()) {
            int v = queue[seen++];
            for (int d : out[v])
                if (--deg[d] == 0) queue.push_back(d);
        }
        if (seen != static_cast<size_t>(nn)) rep.fail("edge set contains a cycle");
    }

    for (const auto& n : inst.neurons) {
        if (n.role == Role::input && indeg[n.id] > 0)
            rep.fail("input neuron " + std::to_string(n.id) + " has incoming edges");
        if (n.role == Role::output && outdeg[n.id] > 0)
            rep.fail("output neuron " + std::to_string(n.id) + " has outgoing edges");
        if (n.role != Role::input && indeg[n.id] == 0)
            rep.fail("non-input neuron " + std::to_string(n.id) + " has no incoming edges");
    }

    size_t n_in = inst.input_ids().size(), n_out = inst.output_ids().size();
    for (size_t d = 0; d < inst.data.size(); ++d) {
        if (inst.data[d].inputs.size() != n_in)
            rep.fail("data point " + std::to_string(d) + " has wrong input arity");
        if (inst.data[d].outputs.size() != n_out)
            rep.fail("data point " + std::to_string(d) + " has wrong output arity");
    }

    if (inst.threshold.is_exact() && inst.threshold < Scalar::exact(0))
        rep.fail("negative threshold");

    if (inst.kind == InstanceKind::plain) {
        for (const auto& e : inst.edges)
            if (e.fixed_weight)
                rep.fail("plain instance has fixed weight on edge " + std::to_string(e.id));
        for (const auto& n : inst.neurons)
            if (n.role != Role::input && n.fixed_bias)
                rep.fail("plain instance has fixed bias on neuron " + std::to_string(n.id));
        for (size_t d = 0; d < inst.data.size(); ++d)
            for (const auto& t : inst.data[d].outputs)
                if (t.ignore)
                    rep.fail("plain instance has '?' target in data point " + std::to_string(d));
    }

    if (strict) {
        for (const auto& e : inst.edges) {
            Role sr = inst.neurons[e.src].role, dr = inst.neurons[e.dst].role;
            if (!(sr == Role::input && dr == Role::hidden) &&
                !(sr == Role::hidden && dr == Role::output))
                rep.fail("edge " + std::to_string(e.id) +
                         " violates the input->hidden->output layering");
        }
        if (n_out != 3)
            rep.fail("expected exactly three output neurons, found " + std::to_string(n_out));
        for (const auto& n : inst.neurons)
            if (n.role != Role::input && n.activation != Activation::identity)
                rep.fail("non-identity activation on neuron " + std::to_string(n.id));
        if (!inst.threshold.is_zero()) rep.fail("nonzero threshold");
        const Scalar zero = Scalar::exact(0), one = Scalar::exact(1);
        for (size_t d = 0; d < inst.data.size(); ++d) {
            for (const auto& x : inst.data[d].inputs)
                if (!x.is_exact() || (x != zero && x != one))
                    rep.fail("non-{0,1} input entry in data point " + std::to_string(d));
            for (const auto& t : inst.data[d].outputs)
                if (!t.ignore && (!t.value.is_exact() || (t.value != zero && t.value != one)))
                    rep.fail("non-{0,1} output entry in data point " + std::to_string(d));
        }
    }
    return rep;
}

namespace {

using nlohmann::json;

json scalar_to_json(const Scalar& s) {
    if (s.is_exact()) return s.str();
    return s.flt();
}

Scalar scalar_from_json(const json& j, const std::string& where) {
    if (j.is_string()) return Scalar::parse_exact(j.get<std::string>());
    if (j.is_number()) return Scalar::floating(j.get<double>());
    throw SchemaError(where + ": expected a scalar");
}

std::string role_name(Role r) {
    switch (r) {
        case Role::input: return "input";
        case Role::hidden: return "hidden";
        default: return "output";
    }
}

} // namespace

std::string encode_instance(const TrainingInstance& inst) {
    json j;
    j["version"] = 1;
    j["kind"] = inst.kind == InstanceKind::plain ? "plain" : "restricted";
    j["cost"] = inst.cost == CostKind::mse ? "mse" : "l1";
    j["threshold"] = inst.threshold.str();
    j["neurons"] = json::array();
    for (const auto& n : inst.neurons) {
        json nj;
        nj["id"] = n.id;
        nj["role"] = role_name(n.role);
        if (n.role != Role::input) {
            switch (n.activation) {
                case Activation::identity: nj["activation"] = "identity"; break;
                case Activation::relu: nj["activation"] = "relu"; break;
                case Activation::shifted_relu:
                    nj["activation"] = json{{"shifted_relu", n.shift.str()}};
                    break;
            }
            nj["bias"] = n.fixed_bias ? json(n.fixed_bias->str()) : json("free");
        }
        j["neurons"].push_back(nj);
    }
    j["edges"] = json::array();
    for (const auto& e : inst.edges) {
        json ej;
        ej["id"] = e.id;
        ej["src"] = e.src;
        ej["dst"] = e.dst;
        ej["weight"] = e.fixed_weight ? json(e.fixed_weight->str()) : json("free");
        j["edges"].push_back(ej);
    }
    j["data"] = json::array();
    for (const auto& d : inst.data) {
        json dj;
        dj["inputs"] = json::array();
        for (const auto& x : d.inputs) dj["inputs"].push_back(x.str());
        dj["outputs"] = json::array();
        for (const auto& t : d.outputs)
            dj["outputs"].push_back(t.ignore ? json("?") : json(t.value.str()));
        j["data"].push_back(dj);
    }
    return j.dump(2) + "\n";
}

TrainingInstance decode_instance(const std::string& bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("/: ") + e.what());
    }
    auto require = [&](const json& obj, const char* key, const std::string& path) -> const json& {
        if (!obj.contains(key)) throw SchemaError(path + "/" + key + ": missing");
        return obj.at(key);
    };
    TrainingInstance inst;
    try {
    if (require(j, "version", "").get<int>() != 1)
        throw SchemaError("/version: unsupported");

    std::string kind = require(j, "kind", "").get<std::string>();
    if (kind == "plain") inst.kind = InstanceKind::plain;
    else if (kind == "restricted") inst.kind = InstanceKind::restricted;
    else throw SchemaError("/kind: unknown value '" + kind + "'");

    std::string cost = require(j, "cost", "").get<std::string>();
    if (cost == "mse") inst.cost = CostKind::mse;
    else if (cost == "l1") inst.cost = CostKind::l1;
    else throw SchemaError("/cost: unknown value '" + cost + "'");

    inst.threshold = Scalar::parse_exact(require(j, "threshold", "").get<std::string>());

    int idx = 0;
    for (const auto& nj : require(j, "neurons", "")) {
        std::string path = "/neurons/" + std::to_string(idx++);
        Neuron n;
        n.id = require(nj, "id", path).get<int>();
        std::string role = require(nj, "role", path).get<std::string>();
        if (role == "input") n.role = Role::input;
        else if (role == "hidden") n.role = Role::hidden;
        else if (role == "output") n.role = Role::output;
        else throw SchemaError(path + "/role: unknown value '" + role + "'");
        if (n.role != Role::input) {
            const json& act = require(nj, "activation", path);
            if (act.is_string()) {
                std::string a = act.get<std::string>();
                if (a == "identity") n.activation = Activation::identity;
                else if (a == "relu") n.activation = Activation::relu;
                else throw SchemaError(path + "/activation: unknown value '" + a + "'");
            } else if (act.is_object() && act.contains("shifted_relu")) {
                n.activation = Activation::shifted_relu;
                n.shift = Scalar::parse_exact(act.at("shifted_relu").get<std::string>());
            } else {
                throw SchemaError(path + "/activation: malformed");
            }
            const json& bias = require(nj, "bias", path);
            if (bias.is_string() && bias.get<std::string>() == "free")
                n.fixed_bias = std::nullopt;
            else
                n.fixed_bias = Scalar::parse_exact(bias.get<std::string>());
        }
        inst.neurons.push_back(std::move(n));
    }

    idx = 0;
    for (const auto& ej : require(j, "edges", "")) {
        std::string path = "/edges/" + std::to_string(idx++);
        Edge e;
        e.id = require(ej, "id", path).get<int>();
        e.src = require(ej, "src", path).get<int>();
        e.dst = require(ej, "dst", path).get<int>();
        const json& w = require(ej, "weight", path);
        if (w.is_string() && w.get<std::string>() == "free")
            e.fixed_weight = std::nullopt;
        else
            e.fixed_weight = Scalar::parse_exact(w.get<std::string>());
        inst.edges.push_back(std::move(e));
    }

    idx = 0;
    for (const auto& dj : require(j, "data", "")) {
        std::string path = "/data/" + std::to_string(idx++);
        DataPoint d;
        for (const auto& x : require(dj, "inputs", path))
            d.inputs.push_back(Scalar::parse_exact(x.get<std::string>()));
        for (const auto& t : require(dj, "outputs", path)) {
            if (t.is_string() && t.get<std::string>() == "?")
                d.outputs.push_back(Target::question());
            else
                d.outputs.push_back(Target::of(Scalar::parse_exact(t.get<std::string>())));
        }
        inst.data.push_back(std::move(d));
    }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("/: ") + e.what());
    }
    return inst;
}

std::string emit_dot(const TrainingInstance& inst, const Witness* witness) {
    if (witness) check_witness_shape(inst, *witness);
    std::ostringstream out;
    out << "digraph network {\n  rankdir=LR;\n";
    for (const auto& n : inst.neurons) {
        out << "  n" << n.id << " [label=\"" << role_name(n.role)[0] << n.id << "\"";
        if (n.role == Role::input) out << ", shape=box";
        else if (n.role == Role::output) out << ", shape=doublecircle";
        else out << ", shape=circle";
        out << "];\n";
    }
    for (const auto& e : inst.edges) {
        out << "  n" << e.src << " -> n" << e.dst << " [label=\"";
        if (e.fixed_weight)
            out << e.fixed_weight->str();
        else if (witness)
            out << witness->weights.at(e.id).str();
        else
            out << "w" << e.id;
        out << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace nntc
