#include <benchmark/benchmark.h>

#include <sstream>

#include "nntc/lowering.hpp"
#include "nntc/witness_ops.hpp"

namespace {

// running-sum chain: v_i + u_i = v_{i+1} with fresh summands
std::string chain_formula(int n) {
    std::ostringstream out;
    for (int i = 0; i + 1 < n; ++i)
        out << "v" << i << " + u" << i << " = v" << (i + 1) << "\n";
    return out.str();
}

void BM_compile_chain(benchmark::State& state) {
    nntc::EtrInvFormula f = nntc::parse_etr_inv(chain_formula(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        nntc::CompilationResult res = nntc::compile_full(f);
        benchmark::DoNotOptimize(res.instance.edges.size());
    }
}
BENCHMARK(BM_compile_chain)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_encode_chain(benchmark::State& state) {
    nntc::CompilationResult res = nntc::compile_full(
        nntc::parse_etr_inv(chain_formula(static_cast<int>(state.range(0)))));
    for (auto _ : state) {
        std::string bytes = nntc::encode_instance(res.instance);
        benchmark::DoNotOptimize(bytes.size());
    }
}
BENCHMARK(BM_encode_chain)->Arg(8)->Arg(32);

void BM_verify_chain(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    nntc::EtrInvFormula f = nntc::parse_etr_inv(chain_formula(n));
    nntc::CompilationResult res = nntc::compile_full(f);
    // interned order is v0, u0, v1, u1, ..., v_{n-1}; pick u_i = 1 and
    // v_{i+1} = v_i + 1 starting from 1/3 so every value stays nonzero
    nntc::Assignment a;
    nntc::Rational v(1, 3);
    for (int i = 0; i + 1 < n; ++i) {
        a.values.push_back(nntc::Scalar::exact(v));
        a.values.push_back(nntc::Scalar::exact(1));
        v += 1;
    }
    a.values.push_back(nntc::Scalar::exact(v));
    nntc::Witness w = nntc::synthesize_witness(res.instance, res.map, a);
    for (auto _ : state) {
        nntc::VerifyReport rep = nntc::verify_witness(res.instance, w);
        benchmark::DoNotOptimize(rep.accepted);
    }
}
BENCHMARK(BM_verify_chain)->Arg(4)->Arg(16);

} // namespace

BENCHMARK_MAIN();
