#include "nntc/lowering.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace nntc {

namespace {

const Scalar kZero = Scalar::exact(0);
const Scalar kOne = Scalar::exact(1);

bool is_two_layer(const TrainingInstance& inst) {
    for (const auto& e : inst.edges) {
        Role sr = inst.neurons[e.src].role, dr = inst.neurons[e.dst].role;
        if (!(sr == Role::input && dr == Role::hidden) &&
            !(sr == Role::hidden && dr == Role::output))
            return false;
    }
    return true;
}

bool is_anchor(const DataPoint& d) {
    for (const auto& x : d.inputs)
        if (!x.is_zero()) return false;
    for (const auto& t : d.outputs)
        if (t.ignore || !t.value.is_zero()) return false;
    return true;
}

} // namespace

std::string stage_name(Stage s) {
    switch (s) {
        case Stage::restricted: return "restricted";
        case Stage::fixedfree: return "fixedfree";
        default: return "plain";
    }
}

Stage parse_stage(const std::string& name) {
    if (name == "restricted") return Stage::restricted;
    if (name == "fixedfree") return Stage::fixedfree;
    if (name == "plain") return Stage::plain;
    throw Error("unknown stage '" + name + "'");
}

std::pair<TrainingInstance, FixedWeightRemoval>
remove_fixed_weights(const TrainingInstance& input) {
    if (input.kind != InstanceKind::restricted)
        throw PassOrderViolation("fixed-weight removal expects a restricted instance");
    if (!is_two_layer(input))
        throw PassOrderViolation("fixed-weight removal expects a two-layer instance");

    TrainingInstance inst = input;
    FixedWeightRemoval out;

    std::vector<int> outdeg(inst.neurons.size(), 0);
    for (const auto& e : inst.edges) ++outdeg[e.src];

    std::vector<int> middles;
    for (const auto& n : inst.neurons)
        if (n.role == Role::hidden) middles.push_back(n.id);
    for (int m : middles) {
        bool has_fixed = false;
        for (const auto& e : inst.edges)
            if ((e.src == m || e.dst == m) && e.fixed_weight) has_fixed = true;
        if (!has_fixed)
            throw UnfixableMiddle("middle neuron " + std::to_string(m) +
                                  " has no fixed incident edge");
    }
    for (const auto& e : inst.edges)
        if (e.fixed_weight && e.fixed_weight->abs() != kOne)
            throw NonUnitFixedWeight("fixed weight on edge " + std::to_string(e.id) +
                                     " is not +1 or -1");

    // New output q; every existing data point ignores it.
    const int q_id = static_cast<int>(inst.neurons.size());
    Neuron q;
    q.id = q_id;
    q.role = Role::output;
    q.fixed_bias = kZero;
    inst.neurons.push_back(q);
    out.q_id = q_id;
    for (auto& d : inst.data) d.outputs.push_back(Target::question());
    const size_t n_out = inst.output_ids().size();
    const int q_pos = static_cast<int>(n_out) - 1;  // q has the largest id

    // One (s_m -> m, m -> q) pair and one data point d(m) per middle.
    std::vector<int> s_of_middle(inst.neurons.size(), -1);
    size_t n_in = inst.input_ids().size();
    for (int m : middles) {
        Neuron s;
        s.id = static_cast<int>(inst.neurons.size());
        s.role = Role::input;
        inst.neurons.push_back(s);
        s_of_middle[m] = s.id;

        int e_in = static_cast<int>(inst.edges.size());
        inst.edges.push_back({e_in, s.id, m, std::nullopt});
        int e_out = static_cast<int>(inst.edges.size());
        inst.edges.push_back({e_out, m, q_id, std::nullopt});
        out.normalization.push_back({m, s.id, e_in, e_out});
    }
    n_in = inst.input_ids().size();
    for (auto& d : inst.data) d.inputs.resize(n_in, kZero);

    std::vector<int> input_pos(inst.neurons.size(), -1);
    {
        auto ids = inst.input_ids();
        for (size_t i = 0; i < ids.size(); ++i) input_pos[ids[i]] = static_cast<int>(i);
    }
    std::vector<int> output_pos(inst.neurons.size(), -1);
    {
        auto ids = inst.output_ids();
        for (size_t i = 0; i < ids.size(); ++i) output_pos[ids[i]] = static_cast<int>(i);
    }

    for (const auto& pair : out.normalization) {
        DataPoint d;
        d.inputs.assign(n_in, kZero);
        d.inputs[input_pos[pair.input_id]] = kOne;
        d.outputs.assign(n_out, Target::question());
        d.outputs[q_pos] = Target::of(kOne);
        inst.data.push_back(std::move(d));
    }

    // Pin each formerly fixed edge with one data point, then free it.
    for (auto& e : inst.edges) {
        if (!e.fixed_weight) continue;
        const bool positive = *e.fixed_weight == kOne;
        DataPoint d;
        d.inputs.assign(n_in, kZero);
        d.outputs.assign(n_out, Target::question());
        if (inst.neurons[e.src].role == Role::hidden) {
            // Outgoing m -> t: activate s_m alone; t = z * z1 must be tau.
            if (!positive)
                throw UnencodableFix("outgoing fixed weight -1 on edge " +
                                     std::to_string(e.id) +
                                     " has no {0,1} fixing data point");
            d.inputs[input_pos[s_of_middle[e.src]]] = kOne;
            d.outputs[output_pos[e.dst]] = Target::of(kOne);
        } else {
            // Incoming s' -> m; s' must feed only m.
            if (outdeg[e.src] != 1)
                throw AmbiguousIncomingFix("source of fixed edge " + std::to_string(e.id) +
                                           " feeds more than one middle");
            d.inputs[input_pos[e.src]] = kOne;
            if (positive) {
                d.outputs[q_pos] = Target::of(kOne);  // w * z2 = 1
            } else {
                // Two-hot input: q = z2 * (w + z1) = 0 forces w = -z1.
                d.inputs[input_pos[s_of_middle[e.dst]]] = kOne;
                d.outputs[q_pos] = Target::of(kZero);
            }
        }
        out.fixes.push_back({e.id, static_cast<int>(inst.data.size()), positive ? +1 : -1});
        inst.data.push_back(std::move(d));
        e.fixed_weight = std::nullopt;
    }

    return {std::move(inst), std::move(out)};
}

TrainingInstance add_bias_anchor(const TrainingInstance& input) {
    TrainingInstance inst = input;
    for (auto& n : inst.neurons)
        if (n.role != Role::input) n.fixed_bias = std::nullopt;
    for (const auto& d : inst.data)
        if (is_anchor(d)) return inst;
    DataPoint anchor;
    anchor.inputs.assign(inst.input_ids().size(), kZero);
    anchor.outputs.assign(inst.output_ids().size(), Target::of(kZero));
    inst.data.push_back(std::move(anchor));
    return inst;
}

std::pair<TrainingInstance, std::vector<QmarkRecord>>
remove_question_marks(const TrainingInstance& input) {
    bool anchored = false;
    for (const auto& d : input.data)
        if (is_anchor(d)) anchored = true;
    if (!anchored)
        throw PassOrderViolation("question-mark removal requires the bias anchor");

    TrainingInstance inst = input;
    std::vector<QmarkRecord> records;

    auto out_ids = inst.output_ids();
    const size_t n_data = inst.data.size();
    for (size_t di = 0; di < n_data; ++di) {
        for (size_t t = 0; t < inst.data[di].outputs.size(); ++t) {
            if (!inst.data[di].outputs[t].ignore) continue;
            QmarkRecord rec;
            rec.datapoint_index = static_cast<int>(di);
            rec.output_id = out_ids[t];

            Neuron in;
            in.id = static_cast<int>(inst.neurons.size());
            in.role = Role::input;
            inst.neurons.push_back(in);
            rec.new_input_id = in.id;

            Neuron mid;
            mid.id = static_cast<int>(inst.neurons.size());
            mid.role = Role::hidden;
            inst.neurons.push_back(mid);
            rec.new_middle_id = mid.id;

            rec.in_edge_id = static_cast<int>(inst.edges.size());
            inst.edges.push_back({rec.in_edge_id, in.id, mid.id, std::nullopt});
            rec.out_edge_id = static_cast<int>(inst.edges.size());
            inst.edges.push_back({rec.out_edge_id, mid.id, rec.output_id, std::nullopt});

            for (size_t dj = 0; dj < inst.data.size(); ++dj)
                inst.data[dj].inputs.push_back(dj == di ? kOne : kZero);
            inst.data[di].outputs[t] = Target::of(kZero);
            records.push_back(rec);
        }
    }
    inst.kind = InstanceKind::plain;
    return {std::move(inst), std::move(records)};
}

CompilationResult compile_from_combined(const CombinedFormula& cf, Stage stop) {
    CompilationResult res;
    res.map.combined = cf;
    for (size_t v = 0; v < cf.backmap.size(); ++v) {
        const auto& bm = cf.backmap[v];
        res.map.source_variables.push_back(
            bm.exponent > 0 ? cf.variables[bm.combined_var].name
                            : cf.variables[bm.combined_var].name + "^-1");
    }
    auto [inst, slots] = compile_restricted(cf);
    res.map.slots = std::move(slots);
    for (int i = 0; i < cf.var_count(); ++i)
        res.map.value_edges.push_back(11 * i + 4);
    res.map.output_a = 9 * cf.var_count();
    res.map.output_b = 9 * cf.var_count() + 1;
    res.map.stage = Stage::restricted;
    res.instance = std::move(inst);
    if (stop == Stage::restricted) return res;

    auto [freed, removal] = remove_fixed_weights(res.instance);
    res.instance = std::move(freed);
    res.map.output_q = removal.q_id;
    res.map.normalization = std::move(removal.normalization);
    res.map.fixes = std::move(removal.fixes);
    res.map.stage = Stage::fixedfree;
    if (stop == Stage::fixedfree) return res;

    res.instance = add_bias_anchor(res.instance);
    auto [plain, qmarks] = remove_question_marks(res.instance);
    res.instance = std::move(plain);
    res.map.qmarks = std::move(qmarks);
    res.map.stage = Stage::plain;
    return res;
}

CompilationResult compile_full(const EtrInvFormula& f, Stage stop) {
    CompilationResult res = compile_from_combined(lower_to_combined(f), stop);
    res.map.source_variables.clear();
    for (const auto& v : f.variables) res.map.source_variables.push_back(v.name);
    return res;
}

namespace {

using nlohmann::json;

json combined_to_json(const CombinedFormula& cf) {
    json j;
    j["variables"] = json::array();
    for (const auto& v : cf.variables) j["variables"].push_back(v.name);
    j["constraints"] = json::array();
    for (const auto& c : cf.constraints) {
        json terms = json::array();
        for (const auto& t : c.terms)
            terms.push_back({{"var", t.var}, {"sign", t.sign}, {"exp", t.exponent}});
        j["constraints"].push_back(terms);
    }
    j["backmap"] = json::array();
    for (const auto& bm : cf.backmap)
        j["backmap"].push_back({{"var", bm.combined_var}, {"exp", bm.exponent}});
    j["fresh_defs"] = json::array();
    for (const auto& def : cf.fresh_defs) {
        json terms = json::array();
        for (const auto& t : def.terms)
            terms.push_back({{"var", t.var}, {"sign", t.sign}, {"exp", t.exponent}});
        j["fresh_defs"].push_back({{"var", def.var}, {"terms", terms}});
    }
    return j;
}

SignedTerm term_from_json(const json& t) {
    return {t.at("var").get<int>(), t.at("sign").get<int>(), t.at("exp").get<int>()};
}

CombinedFormula combined_from_json(const json& j) {
    CombinedFormula cf;
    int idx = 0;
    for (const auto& name : j.at("variables"))
        cf.variables.push_back({idx++, name.get<std::string>()});
    for (const auto& c : j.at("constraints")) {
        CombinedConstraint cc;
        for (int i = 0; i < 3; ++i) cc.terms[i] = term_from_json(c.at(i));
        cf.constraints.push_back(cc);
    }
    for (const auto& bm : j.at("backmap"))
        cf.backmap.push_back({bm.at("var").get<int>(), bm.at("exp").get<int>()});
    for (const auto& def : j.at("fresh_defs")) {
        FreshDef fd;
        fd.var = def.at("var").get<int>();
        for (const auto& t : def.at("terms")) fd.terms.push_back(term_from_json(t));
        cf.fresh_defs.push_back(fd);
    }
    return cf;
}

} // namespace

std::string encode_map(const CompilationMap& map) {
    json j;
    j["stage"] = stage_name(map.stage);
    j["source_variables"] = map.source_variables;
    j["combined"] = combined_to_json(map.combined);
    j["slots"] = json::array();
    for (const auto& row : map.slots.rows) {
        json r = json::array();
        for (const auto& entry : row)
            r.push_back({{"edge", entry.edge_id}, {"input", entry.input_id}});
        j["slots"].push_back(r);
    }
    j["value_edges"] = map.value_edges;
    j["outputs"] = {{"a", map.output_a}, {"b", map.output_b}, {"q", map.output_q}};
    j["normalization"] = json::array();
    for (const auto& p : map.normalization)
        j["normalization"].push_back({{"middle", p.middle_id},
                                      {"input", p.input_id},
                                      {"in_edge", p.in_edge_id},
                                      {"out_edge", p.out_edge_id}});
    j["fixes"] = json::array();
    for (const auto& f : map.fixes)
        j["fixes"].push_back(
            {{"edge", f.edge_id}, {"datapoint", f.datapoint_index}, {"target", f.target}});
    j["qmarks"] = json::array();
    for (const auto& r : map.qmarks)
        j["qmarks"].push_back({{"datapoint", r.datapoint_index},
                               {"output", r.output_id},
                               {"new_input", r.new_input_id},
                               {"new_middle", r.new_middle_id},
                               {"in_edge", r.in_edge_id},
                               {"out_edge", r.out_edge_id}});
    return j.dump(2) + "\n";
}

CompilationMap decode_map(const std::string& bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("/: ") + e.what());
    }
    CompilationMap map;
    try {
        map.stage = parse_stage(j.at("stage").get<std::string>());
        map.source_variables = j.at("source_variables").get<std::vector<std::string>>();
        map.combined = combined_from_json(j.at("combined"));
        for (const auto& r : j.at("slots")) {
            std::array<SlotEntry, 4> row;
            for (int i = 0; i < 4; ++i)
                row[i] = {r.at(i).at("edge").get<int>(), r.at(i).at("input").get<int>()};
            map.slots.rows.push_back(row);
        }
        map.value_edges = j.at("value_edges").get<std::vector<int>>();
        map.output_a = j.at("outputs").at("a").get<int>();
        map.output_b = j.at("outputs").at("b").get<int>();
        map.output_q = j.at("outputs").at("q").get<int>();
        for (const auto& p : j.at("normalization"))
            map.normalization.push_back({p.at("middle").get<int>(), p.at("input").get<int>(),
                                         p.at("in_edge").get<int>(), p.at("out_edge").get<int>()});
        for (const auto& f : j.at("fixes"))
            map.fixes.push_back({f.at("edge").get<int>(), f.at("datapoint").get<int>(),
                                 f.at("target").get<int>()});
        for (const auto& r : j.at("qmarks"))
            map.qmarks.push_back({r.at("datapoint").get<int>(), r.at("output").get<int>(),
                                  r.at("new_input").get<int>(), r.at("new_middle").get<int>(),
                                  r.at("in_edge").get<int>(), r.at("out_edge").get<int>()});
    } catch (const json::exception& e) {
        throw SchemaError(std::string("/: ") + e.what());
    }
    return map;
}

} // namespace nntc
