#include <benchmark/benchmark.h>

#include <random>

#include "gpgad/design.hpp"
#include "gpgad/gad.hpp"
#include "gpgad/gpr.hpp"
#include "gpgad/kernel.hpp"
#include "gpgad/problems.hpp"

using namespace gpgad;

namespace {

Mat random_points(int n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat X(n, d);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = u(rng);
    return X;
}

Dataset example1_data(int n, std::uint64_t seed) {
    const Problem p = make_example1();
    Rng rng(seed);
    Dataset data(ObservationKind::energy, 2);
    const Vec m = (Vec(2) << 2.2, 5.98).finished();
    for (int i = 0; i < n; ++i) {
        const Vec x = m + 0.7 * standard_normal(rng, 2);
        data.add(x, observe(p, x, 0.0, rng));
    }
    return data;
}

Dataset example2_data(int n, std::uint64_t seed) {
    const Problem p = make_example2();
    Rng rng(seed);
    Dataset data(ObservationKind::force, 2);
    const Vec m = (Vec(2) << 0.59, 0.73).finished();
    for (int i = 0; i < n; ++i) {
        const Vec x = m + 0.55 * standard_normal(rng, 2);
        data.add(x, observe(p, x, 0.05, rng));
    }
    return data;
}

}  // namespace

static void BM_CrossBlocks(benchmark::State& state) {
    const Mat X = random_points(static_cast<int>(state.range(0)), 2, 1);
    const Vec x = Vec::Constant(2, 0.1);
    const KernelParams p(1.0, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(cross_blocks(x, X, p));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CrossBlocks)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_JointBlocks(benchmark::State& state) {
    const Vec x = Vec::Constant(2, 0.1), x2 = Vec::Constant(2, -0.3);
    const KernelParams p(1.0, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(joint_blocks(x, x2, p));
}
BENCHMARK(BM_JointBlocks);

static void BM_FitEnergy(benchmark::State& state) {
    const Dataset data = example1_data(static_cast<int>(state.range(0)), 2);
    const KernelParams p(10.0, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(fit(data, p));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitEnergy)->RangeMultiplier(2)->Range(20, 320)->Complexity(benchmark::oNCubed);

static void BM_PredictDerivatives(benchmark::State& state) {
    const Dataset data = state.range(1) ? example2_data(static_cast<int>(state.range(0)), 3)
                                        : example1_data(static_cast<int>(state.range(0)), 3);
    const GprModel m = fit(data, KernelParams(10.0, 2.0, state.range(1) ? 0.05 : 0.0));
    const Vec z = data.locations().front() + Vec::Constant(2, 0.05);
    for (auto _ : state) benchmark::DoNotOptimize(m.predict_derivatives(z));
    state.SetLabel(state.range(1) ? "force" : "energy");
}
BENCHMARK(BM_PredictDerivatives)->ArgsProduct({{20, 80, 320}, {0, 1}});

static void BM_MarginalLikelihood(benchmark::State& state) {
    const Dataset data = example1_data(static_cast<int>(state.range(0)), 4);
    const KernelParams p(10.0, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(log_marginal_likelihood(data, p));
}
BENCHMARK(BM_MarginalLikelihood)->Arg(20)->Arg(100)->Arg(300);

static void BM_UtilityU1(benchmark::State& state) {
    const int n_design = static_cast<int>(state.range(0));
    const DesignBatch D{random_points(n_design, 2, 5)};
    PriorPathSet paths;
    for (int p = 0; p < 20; ++p) {
        std::vector<Vec> path;
        for (int k = 0; k < 10; ++k) path.push_back((Vec(2) << 0.01 * k, 0.01 * p).finished());
        paths.paths.push_back(path);
    }
    const LinCoeffs c{1.0, Vec::Constant(2, 0.1), false};
    const KernelParams p(1.0, 0.5, 1e-4);
    for (auto _ : state) benchmark::DoNotOptimize(utility_u1(D, paths, c, p, 0.01));
}
BENCHMARK(BM_UtilityU1)->Arg(5)->Arg(10)->Arg(20);

static void BM_SamplePriorPaths(benchmark::State& state) {
    const GprModel m = fit(example1_data(40, 6), KernelParams(10.0, 2.0));
    const Vec x = m.data().locations().front(), v = Vec::Constant(2, 1.0).normalized();
    for (auto _ : state) benchmark::DoNotOptimize(sample_prior_paths(m, x, v, 20, 10, 0.01, 7));
}
BENCHMARK(BM_SamplePriorPaths)->Unit(benchmark::kMillisecond);

static void BM_ProposeDesign(benchmark::State& state) {
    const GprModel m = fit(example1_data(40, 8), KernelParams(10.0, 2.0));
    const Vec x = m.data().locations().front(), v = Vec::Constant(2, 1.0).normalized();
    const ActiveLearningConfig al;
    for (auto _ : state) benchmark::DoNotOptimize(propose_design(m, x, v, LinCoeffs::pure_force(2), al, 9));
}
BENCHMARK(BM_ProposeDesign)->Unit(benchmark::kMillisecond);

static void BM_ReferenceGadExample2(benchmark::State& state) {
    const Problem p = make_example2();
    GadConfig cfg;
    cfg.t_max = 500;
    const GadState start{(Vec(2) << 5.87, 6.25).finished(), Vec::Constant(2, 1.0).normalized(), 0};
    for (auto _ : state) {
        Rng rng(1);
        benchmark::DoNotOptimize(run_reference_gad([&](const Vec& x) { return observed_derivatives(p, x, 0.0, rng); }, start, cfg));
    }
}
BENCHMARK(BM_ReferenceGadExample2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
