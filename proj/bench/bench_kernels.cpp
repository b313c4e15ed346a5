#include <benchmark/benchmark.h>

#include "attackqa/common/rng.hpp"
#include "attackqa/retrieval/kernels.hpp"

using namespace attackqa;

namespace {

constexpr std::size_t kDim = 768;

kernels::Matrix random_matrix(std::size_t rows, std::uint64_t seed) {
    DetRng rng(seed);
    kernels::Matrix m;
    m.rows = rows;
    m.dim = kDim;
    m.data.resize(rows * kDim);
    for (auto& x : m.data) x = rng.unit() * 2.0 - 1.0;
    for (std::size_t i = 0; i < rows; ++i) m.norms.push_back(kernels::norm(m.row(i)));
    return m;
}

std::vector<std::vector<double>> random_queries(std::size_t n, std::uint64_t seed) {
    DetRng rng(seed);
    std::vector<std::vector<double>> q(n, std::vector<double>(kDim));
    for (auto& v : q) {
        for (auto& x : v) x = rng.unit() * 2.0 - 1.0;
    }
    return q;
}

std::vector<std::string> ids(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("d" + std::to_string(i));
    return out;
}

template <void (*Scores)(const kernels::Matrix&, std::span<const double>, std::span<double>)>
void BM_cosine(benchmark::State& state) {
    const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 1);
    const auto q = random_queries(1, 2).front();
    std::vector<double> out(m.rows);
    for (auto _ : state) {
        Scores(m, q, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.rows));
}

template <bool Omp>
void BM_rank_batch(benchmark::State& state) {
    const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 1);
    const auto doc_ids = ids(m.rows);
    const auto queries = random_queries(static_cast<std::size_t>(state.range(1)), 3);
    for (auto _ : state) {
        auto hits = Omp ? kernels::rank_batch_omp(m, doc_ids, queries, 10)
                        : kernels::rank_batch_serial(m, doc_ids, queries, 10);
        benchmark::DoNotOptimize(hits.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
}

}  // namespace

BENCHMARK(BM_cosine<kernels::cosine_scores_serial>)->Name("cosine/serial")->Arg(2000)->Arg(25000);
BENCHMARK(BM_cosine<kernels::cosine_scores_omp>)->Name("cosine/omp")->Arg(2000)->Arg(25000);
BENCHMARK(BM_rank_batch<false>)->Name("rank_batch/serial")->Args({25000, 64});
BENCHMARK(BM_rank_batch<true>)->Name("rank_batch/omp")->Args({25000, 64});

BENCHMARK_MAIN();
