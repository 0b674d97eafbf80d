#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nntc/lowering.hpp"
#include "nntc/witness_ops.hpp"
#include "support/corpus.hpp"

using namespace nntc;

namespace {

Scalar q(long long n, long long d = 1) { return Scalar::exact(n, d); }

int count_fixed_weights(const TrainingInstance& inst) {
    int n = 0;
    for (const auto& e : inst.edges) n += e.fixed_weight.has_value();
    return n;
}

int count_question_marks(const TrainingInstance& inst) {
    int n = 0;
    for (const auto& d : inst.data)
        for (const auto& t : d.outputs) n += t.ignore;
    return n;
}

bool has_anchor(const TrainingInstance& inst) {
    for (const auto& d : inst.data) {
        bool zero = true;
        for (const auto& x : d.inputs) zero = zero && x.is_zero();
        for (const auto& t : d.outputs) zero = zero && !t.ignore && t.value.is_zero();
        if (zero) return true;
    }
    return false;
}

} // namespace

TEST_CASE("stage names round trip") {
    for (Stage s : {Stage::restricted, Stage::fixedfree, Stage::plain})
        CHECK(parse_stage(stage_name(s)) == s);
    CHECK_THROWS_AS(parse_stage("bogus"), Error);
}

TEST_CASE("fixed-weight removal on the variable gadget: counts") {
    CompilationResult restricted =
        compile_from_combined(parse_combined("+x +x2 -z = 0\n"), Stage::restricted);
    // focus on one gadget's worth of structure via the full three-gadget instance
    auto [freed, removal] = remove_fixed_weights(restricted.instance);

    const auto& before = restricted.instance;
    CHECK(freed.output_ids().size() == before.output_ids().size() + 1);   // +q
    CHECK(freed.input_ids().size() == before.input_ids().size() + 12);    // +s_m per middle
    CHECK(freed.edges.size() == before.edges.size() + 24);                // 2 per middle
    CHECK(freed.data.size() == before.data.size() + 12 + 18);             // d(m) + fixes
    CHECK(count_fixed_weights(freed) == 0);
    CHECK(removal.normalization.size() == 12);
    CHECK(removal.fixes.size() == 18);
    CHECK(removal.q_id == static_cast<int>(before.neurons.size()));

    // prior data points are zero-padded and get '?' at q
    size_t q_pos = freed.output_ids().size() - 1;
    for (size_t d = 0; d < before.data.size(); ++d) {
        CHECK(freed.data[d].outputs[q_pos].ignore);
        for (size_t i = before.data[d].inputs.size(); i < freed.data[d].inputs.size(); ++i)
            CHECK(freed.data[d].inputs[i].is_zero());
    }
}

TEST_CASE("d(m) literal: 1 at s_m, output 1 at q and '?' otherwise") {
    CompilationResult r =
        compile_from_combined(parse_combined("+x +y -z = 0\n"), Stage::restricted);
    auto [freed, removal] = remove_fixed_weights(r.instance);
    auto in_ids = freed.input_ids();
    size_t q_pos = freed.output_ids().size() - 1;
    size_t base = r.instance.data.size();
    for (size_t m = 0; m < removal.normalization.size(); ++m) {
        const DataPoint& d = freed.data[base + m];
        for (size_t i = 0; i < d.inputs.size(); ++i) {
            bool is_sm = in_ids[i] == removal.normalization[m].input_id;
            CHECK(d.inputs[i] == (is_sm ? q(1) : q(0)));
        }
        for (size_t t = 0; t < d.outputs.size(); ++t) {
            if (t == q_pos)
                CHECK(d.outputs[t] == Target::of(q(1)));
            else
                CHECK(d.outputs[t].ignore);
        }
    }
}

TEST_CASE("fixing data points stay within {0,1} and pin the right values") {
    CompilationResult r =
        compile_from_combined(parse_combined("+x +y -z = 0\n"), Stage::restricted);
    auto [freed, removal] = remove_fixed_weights(r.instance);
    for (const auto& fix : removal.fixes) {
        const DataPoint& d = freed.data[fix.datapoint_index];
        for (const auto& x : d.inputs) CHECK((x == q(0) || x == q(1)));
        int two_hot = 0;
        for (const auto& x : d.inputs) two_hot += x == q(1);
        if (fix.target < 0) CHECK(two_hot == 2);  // the -1 edges use the two-hot trick
        else CHECK(two_hot == 1);
    }
    // 3 gadgets x 1 negative fixed edge (s5 -> m3)
    int negative = 0;
    for (const auto& fix : removal.fixes) negative += fix.target < 0;
    CHECK(negative == 3);
}

TEST_CASE("precondition failures of the fixed-weight pass") {
    CompilationResult r =
        compile_from_combined(parse_combined("+x +y -z = 0\n"), Stage::restricted);

    TrainingInstance bad = r.instance;
    bad.kind = InstanceKind::plain;
    CHECK_THROWS_AS(remove_fixed_weights(bad), PassOrderViolation);

    bad = r.instance;
    bad.edges[5].fixed_weight = q(2);  // m1 -> a
    CHECK_THROWS_AS(remove_fixed_weights(bad), NonUnitFixedWeight);

    bad = r.instance;
    // strip every fixed edge incident to the first middle neuron (id 5n = 15)
    int middle = 15;
    for (auto& e : bad.edges)
        if ((e.src == middle || e.dst == middle) && e.fixed_weight)
            e.fixed_weight = std::nullopt;
    CHECK_THROWS_AS(remove_fixed_weights(bad), UnfixableMiddle);

    bad = r.instance;
    // give the source of the fixed -1 edge (s5 of gadget 0) a second outgoing edge
    bad.edges.push_back({static_cast<int>(bad.edges.size()), 4, 5 * 3 + 1, std::nullopt});
    CHECK_THROWS_AS(remove_fixed_weights(bad), AmbiguousIncomingFix);
}

TEST_CASE("bias anchor frees biases and is idempotent") {
    CompilationResult r =
        compile_from_combined(parse_combined("+x +y -z = 0\n"), Stage::fixedfree);
    TrainingInstance anchored = add_bias_anchor(r.instance);
    CHECK(has_anchor(anchored));
    CHECK(anchored.data.size() == r.instance.data.size() + 1);
    for (const auto& n : anchored.neurons)
        if (n.role != Role::input) CHECK(!n.fixed_bias);
    const DataPoint& anchor = anchored.data.back();
    for (const auto& t : anchor.outputs) {
        CHECK(!t.ignore);
        CHECK(t.value.is_zero());
    }
    TrainingInstance twice = add_bias_anchor(anchored);
    CHECK(twice.data.size() == anchored.data.size());
}

TEST_CASE("question-mark removal requires the anchor and yields a plain instance") {
    CompilationResult r =
        compile_from_combined(parse_combined("+x +y -z = 0\n"), Stage::fixedfree);
    CHECK_THROWS_AS(remove_question_marks(r.instance), PassOrderViolation);

    TrainingInstance anchored = add_bias_anchor(r.instance);
    int qmarks = count_question_marks(anchored);
    auto [plain, records] = remove_question_marks(anchored);
    CHECK(static_cast<int>(records.size()) == qmarks);
    CHECK(count_question_marks(plain) == 0);
    CHECK(plain.kind == InstanceKind::plain);
    CHECK(plain.input_ids().size() == anchored.input_ids().size() + records.size());
    CHECK(plain.edges.size() == anchored.edges.size() + 2 * records.size());
    ValidationReport rep = validate_instance(plain, true);
    CHECK_MESSAGE(rep.ok, (rep.violations.empty() ? std::string() : rep.violations[0]));

    // each record's new input is 1 exactly at its own data point
    auto in_ids = plain.input_ids();
    for (const auto& rec : records) {
        size_t pos = 0;
        while (in_ids[pos] != rec.new_input_id) ++pos;
        for (size_t d = 0; d < plain.data.size(); ++d)
            CHECK(plain.data[d].inputs[pos] ==
                  (static_cast<int>(d) == rec.datapoint_index ? q(1) : q(0)));
    }
}

TEST_CASE("pipeline stages stop where asked") {
    EtrInvFormula f = parse_etr_inv("x + y = z\n");
    CompilationResult restricted = compile_full(f, Stage::restricted);
    CHECK(restricted.map.stage == Stage::restricted);
    CHECK(count_fixed_weights(restricted.instance) > 0);
    CHECK(restricted.map.normalization.empty());

    CompilationResult fixedfree = compile_full(f, Stage::fixedfree);
    CHECK(fixedfree.map.stage == Stage::fixedfree);
    CHECK(count_fixed_weights(fixedfree.instance) == 0);
    CHECK(count_question_marks(fixedfree.instance) > 0);

    CompilationResult plain = compile_full(f, Stage::plain);
    CHECK(plain.map.stage == Stage::plain);
    CHECK(count_question_marks(plain.instance) == 0);
    CHECK(plain.instance.kind == InstanceKind::plain);
}

TEST_CASE("zero-cost preservation across passes on the corpus") {
    for (const auto& entry : corpus::entries()) {
        if (!entry.solution) continue;
        EtrInvFormula f = parse_etr_inv(entry.text);
        Assignment a = parse_assignment(f, entry.solution);
        for (Stage stage : {Stage::restricted, Stage::fixedfree, Stage::plain}) {
            CompilationResult res = compile_full(f, stage);
            Witness w = synthesize_witness(res.instance, res.map, a);
            VerifyReport rep = verify_witness(res.instance, w);
            CHECK_MESSAGE(rep.accepted, entry.name, " stage ", stage_name(stage));
            CHECK(rep.total_cost == q(0));
        }
    }
}

TEST_CASE("strict validation passes for the whole corpus") {
    for (const auto& entry : corpus::entries()) {
        CompilationResult res = compile_full(parse_etr_inv(entry.text));
        ValidationReport rep = validate_instance(res.instance, true);
        CHECK_MESSAGE(rep.ok, entry.name, ": ",
                      (rep.violations.empty() ? std::string() : rep.violations[0]));
    }
}

TEST_CASE("compilation map round trips byte-identically") {
    for (const auto& entry : corpus::entries()) {
        for (Stage stage : {Stage::restricted, Stage::fixedfree, Stage::plain}) {
            CompilationResult res = compile_full(parse_etr_inv(entry.text), stage);
            std::string bytes = encode_map(res.map);
            CompilationMap back = decode_map(bytes);
            CHECK(back == res.map);
            CHECK(encode_map(back) == bytes);
        }
    }
    CHECK_THROWS_AS(decode_map("not json"), SchemaError);
    CHECK_THROWS_AS(decode_map("{}"), SchemaError);
}
