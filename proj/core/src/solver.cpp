#include "nntc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nntc {

namespace {

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

// Double-precision view of an instance, indexed by FlatParams coordinates.
struct FloatNet {
    int nn = 0;
    std::vector<int> topo;
    std::vector<std::vector<const Edge*>> incoming;
    std::vector<int> edge_param;       // edge id -> param index or -1
    std::vector<double> edge_fixed;    // fixed weight value (where fixed)
    std::vector<int> bias_param;       // neuron id -> param index or -1
    std::vector<double> bias_fixed;    // fixed bias value (where fixed)
    std::vector<int> act;              // 0 identity, 1 relu, 2 shifted
    std::vector<double> shift;
    std::vector<char> is_input;
    std::vector<int> out_ids;
    std::vector<std::vector<double>> inputs_by_id;  // per dp, indexed by neuron id
    std::vector<std::vector<std::pair<bool, double>>> targets;  // (ignore, value)
    CostKind cost = CostKind::mse;

    FloatNet(const TrainingInstance& inst, const FlatParams& p) {
        nn = static_cast<int>(inst.neurons.size());
        topo = topological_order(inst);
        incoming.resize(nn);
        for (const auto& e : inst.edges) incoming[e.dst].push_back(&e);
        edge_param.assign(inst.edges.size(), -1);
        edge_fixed.assign(inst.edges.size(), 0.0);
        for (size_t i = 0; i < p.edge_ids.size(); ++i)
            edge_param[p.edge_ids[i]] = static_cast<int>(i);
        for (const auto& e : inst.edges)
            if (e.fixed_weight) edge_fixed[e.id] = e.fixed_weight->to_double();
        bias_param.assign(nn, -1);
        bias_fixed.assign(nn, 0.0);
        for (size_t i = 0; i < p.bias_ids.size(); ++i)
            bias_param[p.bias_ids[i]] = static_cast<int>(p.edge_ids.size() + i);
        act.assign(nn, 0);
        shift.assign(nn, 0.0);
        is_input.assign(nn, 0);
        for (const auto& n : inst.neurons) {
            if (n.role == Role::input) is_input[n.id] = 1;
            if (n.fixed_bias) bias_fixed[n.id] = n.fixed_bias->to_double();
            act[n.id] = static_cast<int>(n.activation);
            if (n.activation == Activation::shifted_relu) shift[n.id] = n.shift.to_double();
        }
        out_ids = inst.output_ids();
        auto in_ids = inst.input_ids();
        cost = inst.cost;
        for (const auto& d : inst.data) {
            std::vector<double> by_id(nn, 0.0);
            for (size_t i = 0; i < in_ids.size(); ++i)
                by_id[in_ids[i]] = d.inputs[i].to_double();
            inputs_by_id.push_back(std::move(by_id));
            std::vector<std::pair<bool, double>> t;
            for (const auto& o : d.outputs)
                t.emplace_back(o.ignore, o.ignore ? 0.0 : o.value.to_double());
            targets.push_back(std::move(t));
        }
    }
};

double eval_cost_grad(const FloatNet& net, const std::vector<double>& x,
                      std::vector<double>* grad) {
    if (grad) grad->assign(x.size(), 0.0);
    double total = 0.0;
    std::vector<double> value(net.nn), pre(net.nn), dvalue(net.nn);

    for (size_t di = 0; di < net.inputs_by_id.size(); ++di) {
        value = net.inputs_by_id[di];
        for (int id : net.topo) {
            if (net.is_input[id]) continue;
            double acc = net.bias_param[id] >= 0 ? x[net.bias_param[id]]
                                                 : net.bias_fixed[id];
            for (const Edge* e : net.incoming[id]) {
                double w = net.edge_param[e->id] >= 0 ? x[net.edge_param[e->id]]
                                                      : net.edge_fixed[e->id];
                acc += w * value[e->src];
            }
            pre[id] = acc;
            if (net.act[id] == 1)
                value[id] = acc > 0 ? acc : 0.0;
            else if (net.act[id] == 2)
                value[id] = acc > net.shift[id] ? acc : net.shift[id];
            else
                value[id] = acc;
        }

        int k = 0;
        for (const auto& [ignore, tgt] : net.targets[di])
            if (!ignore) ++k;
        std::fill(dvalue.begin(), dvalue.end(), 0.0);
        double c = 0.0;
        for (size_t t = 0; t < net.out_ids.size(); ++t) {
            const auto& [ignore, tgt] = net.targets[di][t];
            if (ignore) continue;
            double r = value[net.out_ids[t]] - tgt;
            if (net.cost == CostKind::mse) {
                c += r * r / k;
                dvalue[net.out_ids[t]] = 2.0 * r / k;
            } else {
                c += std::fabs(r);
                dvalue[net.out_ids[t]] = r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0);
            }
        }
        total += c;
        if (!grad) continue;

        for (auto it = net.topo.rbegin(); it != net.topo.rend(); ++it) {
            int id = *it;
            double d = dvalue[id];
            if (d == 0.0) continue;
            if (net.act[id] == 1 && !(pre[id] > 0)) continue;
            if (net.act[id] == 2 && !(pre[id] > net.shift[id])) continue;
            if (net.bias_param[id] >= 0) (*grad)[net.bias_param[id]] += d;
            for (const Edge* e : net.incoming[id]) {
                double w = net.edge_param[e->id] >= 0 ? x[net.edge_param[e->id]]
                                                      : net.edge_fixed[e->id];
                if (net.edge_param[e->id] >= 0)
                    (*grad)[net.edge_param[e->id]] += d * value[e->src];
                dvalue[e->src] += d * w;
            }
        }
    }
    return total;
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

FlatParams flat_params(const TrainingInstance& inst) {
    FlatParams p;
    for (const auto& e : inst.edges)
        if (!e.fixed_weight) p.edge_ids.push_back(e.id);
    for (const auto& n : inst.neurons)
        if (n.role != Role::input && !n.fixed_bias) p.bias_ids.push_back(n.id);
    return p;
}

Witness witness_from_flat(const FlatParams& params, const std::vector<double>& x) {
    if (x.size() != params.size())
        throw IncompatibleDimensions("parameter vector has wrong length");
    Witness w;
    w.mode = Scalar::Mode::floating;
    for (size_t i = 0; i < params.edge_ids.size(); ++i)
        w.weights[params.edge_ids[i]] = Scalar::floating(x[i]);
    for (size_t i = 0; i < params.bias_ids.size(); ++i)
        w.biases[params.bias_ids[i]] = Scalar::floating(x[params.edge_ids.size() + i]);
    return w;
}

std::vector<double> flatten_witness(const FlatParams& params, const Witness& w) {
    std::vector<double> x;
    x.reserve(params.size());
    for (int id : params.edge_ids) x.push_back(w.weights.at(id).to_double());
    for (int id : params.bias_ids) x.push_back(w.biases.at(id).to_double());
    return x;
}

double cost_and_grad(const TrainingInstance& inst, const FlatParams& params,
                     const std::vector<double>& x, std::vector<double>* grad) {
    if (x.size() != params.size())
        throw IncompatibleDimensions("parameter vector has wrong length");
    FloatNet net(inst, params);
    return eval_cost_grad(net, x, grad);
}

SolveResult local_search(const TrainingInstance& inst, const SolverConfig& cfg) {
    if (cfg.restarts < 1 || cfg.init_lo >= cfg.init_hi || cfg.target_tol <= 0)
        throw Error("invalid solver configuration");
    const FlatParams params = flat_params(inst);
    FloatNet net(inst, params);

    SolveResult best;
    best.cost = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;

    for (int r = 0; r < cfg.restarts; ++r) {
        std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(r));
        std::uniform_real_distribution<double> init(cfg.init_lo, cfg.init_hi);
        std::vector<double> x(params.size());
        for (auto& v : x) v = init(rng);

        std::vector<double> grad;
        for (int it = 0; it <= cfg.max_iters; ++it) {
            if (!all_finite(x)) break;  // diverged; abandon this restart
            double c = eval_cost_grad(net, x, &grad);
            if (!std::isfinite(c)) break;
            if (c < best.cost) {
                best.cost = c;
                best.restart = r;
                best_x = x;
            }
            if (c < cfg.target_tol || it == cfg.max_iters) break;
            for (size_t i = 0; i < x.size(); ++i) x[i] -= cfg.step * grad[i];
        }
        if (best.cost < cfg.target_tol) break;
    }

    if (best_x.empty() && params.size() > 0)
        throw NonFiniteCost("every restart diverged");
    if (best_x.empty()) {
        best_x.assign(params.size(), 0.0);
        best.cost = eval_cost_grad(net, best_x, nullptr);
        best.restart = 0;
    }
    best.witness = witness_from_flat(params, best_x);
    return best;
}

namespace {

// Exact evaluator for grid search: unassigned parameters read as 0, which
// is sound because data points are only scored once every parameter they
// can possibly depend on has been assigned.
struct ExactNet {
    const TrainingInstance& inst;
    std::vector<int> topo;
    std::vector<std::vector<const Edge*>> incoming;
    std::vector<int> edge_param, bias_param;
    std::vector<int> in_ids, out_ids;

    ExactNet(const TrainingInstance& i, const FlatParams& p) : inst(i) {
        topo = topological_order(inst);
        incoming.resize(inst.neurons.size());
        for (const auto& e : inst.edges) incoming[e.dst].push_back(&e);
        edge_param.assign(inst.edges.size(), -1);
        for (size_t k = 0; k < p.edge_ids.size(); ++k)
            edge_param[p.edge_ids[k]] = static_cast<int>(k);
        bias_param.assign(inst.neurons.size(), -1);
        for (size_t k = 0; k < p.bias_ids.size(); ++k)
            bias_param[p.bias_ids[k]] = static_cast<int>(p.edge_ids.size() + k);
        in_ids = inst.input_ids();
        out_ids = inst.output_ids();
    }

    // Sum of squared residuals over scored outputs (threshold is 0, so any
    // positive value prunes; the mse divisor is irrelevant).
    bool datapoint_clean(int di, const std::vector<Scalar>& vals) const {
        const Scalar zero = Scalar::exact(0);
        std::vector<Scalar> value(inst.neurons.size(), zero);
        const auto& d = inst.data[di];
        for (size_t i = 0; i < in_ids.size(); ++i) value[in_ids[i]] = d.inputs[i];
        for (int id : topo) {
            const Neuron& n = inst.neurons[id];
            if (n.role == Role::input) continue;
            Scalar acc = n.fixed_bias ? *n.fixed_bias : vals[bias_param[id]];
            for (const Edge* e : incoming[id]) {
                const Scalar& w =
                    e->fixed_weight ? *e->fixed_weight : vals[edge_param[e->id]];
                acc = acc + w * value[e->src];
            }
            if (n.activation == Activation::relu)
                acc = acc < zero ? zero : acc;
            else if (n.activation == Activation::shifted_relu)
                acc = acc < n.shift ? n.shift : acc;
            value[id] = std::move(acc);
        }
        for (size_t t = 0; t < out_ids.size(); ++t) {
            if (d.outputs[t].ignore) continue;
            if (value[out_ids[t]] != d.outputs[t].value) return false;
        }
        return true;
    }
};

} // namespace

std::optional<Witness> grid_search(const TrainingInstance& inst,
                                   const std::vector<Scalar>& grid,
                                   std::uint64_t budget) {
    if (grid.empty()) return std::nullopt;
    for (const auto& g : grid)
        if (!g.is_exact()) throw ModeMismatch("grid search needs exact grid values");
    const FlatParams params = flat_params(inst);
    const size_t k = params.size();

    std::uint64_t space = 1;
    for (size_t i = 0; i < k; ++i) {
        if (space > budget / grid.size() + 1) throw BudgetExceeded("grid too large");
        space *= grid.size();
    }
    if (space > budget) throw BudgetExceeded("grid too large");

    ExactNet net(inst, params);

    // A data point can only be scored once all parameters it can possibly
    // see are assigned: edges on a live path from a nonzero source to a
    // scored output, and biases of neurons feeding a scored output.
    const int nn = static_cast<int>(inst.neurons.size());
    std::vector<std::vector<int>> dp_of_depth(k + 1);
    std::vector<int> constant_dps;
    for (size_t di = 0; di < inst.data.size(); ++di) {
        const auto& d = inst.data[di];
        std::vector<bool> maybe_nonzero(nn, false), reaches(nn, false);
        for (size_t i = 0; i < net.in_ids.size(); ++i)
            maybe_nonzero[net.in_ids[i]] = !d.inputs[i].is_zero();
        for (int id : net.topo) {
            const Neuron& n = inst.neurons[id];
            if (n.role == Role::input) continue;
            bool nz = !n.fixed_bias || !n.fixed_bias->is_zero();
            for (const Edge* e : net.incoming[id])
                if (maybe_nonzero[e->src] &&
                    (!e->fixed_weight || !e->fixed_weight->is_zero()))
                    nz = true;
            maybe_nonzero[id] = nz;
        }
        for (size_t t = 0; t < net.out_ids.size(); ++t)
            if (!d.outputs[t].ignore) reaches[net.out_ids[t]] = true;
        for (auto it = net.topo.rbegin(); it != net.topo.rend(); ++it)
            for (const Edge* e : net.incoming[*it])
                if (reaches[*it]) reaches[e->src] = true;

        int depth = -1;
        for (const auto& e : inst.edges)
            if (net.edge_param[e.id] >= 0 && maybe_nonzero[e.src] && reaches[e.dst])
                depth = std::max(depth, net.edge_param[e.id]);
        for (const auto& n : inst.neurons)
            if (n.role != Role::input && net.bias_param[n.id] >= 0 && reaches[n.id])
                depth = std::max(depth, net.bias_param[n.id]);
        if (depth < 0)
            constant_dps.push_back(static_cast<int>(di));
        else
            dp_of_depth[depth].push_back(static_cast<int>(di));
    }

    std::vector<Scalar> vals(k, Scalar::exact(0));
    for (int di : constant_dps)
        if (!net.datapoint_clean(di, vals)) return std::nullopt;
    if (k == 0) {
        Witness w;
        w.mode = Scalar::Mode::exact;
        return verify_witness(inst, w).accepted ? std::optional<Witness>(w)
                                                : std::nullopt;
    }

    std::vector<size_t> choice(k, 0);
    size_t depth = 0;
    while (true) {
        if (choice[depth] >= grid.size()) {
            if (depth == 0) return std::nullopt;
            choice[depth] = 0;
            --depth;
            ++choice[depth];
            continue;
        }
        vals[depth] = grid[choice[depth]];
        bool clean = true;
        for (int di : dp_of_depth[depth])
            if (!net.datapoint_clean(static_cast<int>(di), vals)) {
                clean = false;
                break;
            }
        if (!clean) {
            ++choice[depth];
            continue;
        }
        if (depth + 1 == k) {
            Witness w;
            w.mode = Scalar::Mode::exact;
            for (size_t i = 0; i < params.edge_ids.size(); ++i)
                w.weights[params.edge_ids[i]] = vals[i];
            for (size_t i = 0; i < params.bias_ids.size(); ++i)
                w.biases[params.bias_ids[i]] = vals[params.edge_ids.size() + i];
            if (verify_witness(inst, w).accepted) return w;
            ++choice[depth];
            continue;
        }
        ++depth;
    }
}

} // namespace nntc
