// Wall-time comparison of the OpenMP kernels against the serial reference
// implementations. Not a correctness gate; run manually.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <vector>

#include "alphasens/dataset.hpp"
#include "alphasens/metric_sensitivity.hpp"
#include "alphasens/mlp.hpp"
#include "alphasens/parallel.hpp"
#include "alphasens/power_mean.hpp"
#include "alphasens/rng.hpp"
#include "alphasens/synthetic.hpp"

using namespace alphasens;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
    // one warmup, then best of reps
    f();
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        f();
        const auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-34s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main() {
    parallel::apply_thread_env();
    std::printf("workers: %d\n", parallel::worker_count());
    std::printf("%-34s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    Rng rng(7);

    {
        // full curve sweep: the parallel path extracts log magnitudes once and
        // reuses them for every grid alpha, the reference recomputes per alpha
        const std::size_t n = 2'000'000;
        std::vector<double> values(n);
        for (double& v : values) v = std::abs(rng.normal()) + 1e-6;
        const JacobianTensor jac(n, 1, 1, values);
        const AlphaGrid grid = AlphaGrid::default_grid();
        volatile double sink = 0.0;
        const double s = time_ms(
            [&] {
                double acc = 0.0;
                for (double alpha : grid.alphas()) {
                    acc += serial::generalized_mean(values, alpha);
                }
                sink = acc + serial::generalized_mean(values, kInf);
            },
            3);
        const double p = time_ms([&] { sink = alpha_curve(jac, 0, 0, grid).asymptote; }, 3);
        row("alpha_curve sweep (2M, 13+inf)", s, p);
        (void)sink;
    }

    {
        const std::size_t n = 2'000'000, m = 3;
        std::vector<double> flat(n * m);
        for (double& v : flat) v = rng.normal();
        const JacobianTensor jac(n, m, 1, flat);
        const NormPair norms(3.0, 1.5);
        volatile double sink = 0.0;
        const double s = time_ms([&] { sink = serial::sensitivity_pq(jac, 0, norms); }, 3);
        const double p = time_ms([&] { sink = sensitivity_pq(jac, 0, norms); }, 3);
        row("sensitivity_pq (2M x 3, p>q)", s, p);
        (void)sink;
    }

    {
        const Dataset data = gen_normal_inputs(60'000, 8, 3);
        const MlpModel model = MlpModel::init({8, 32, 1}, Activation::kTanh, 5);
        volatile double sink = 0.0;
        // serial reference: row loop without the omp pragma
        auto serial_jacobian = [&] {
            double acc = 0.0;
            for (std::size_t i = 0; i < data.n_samples(); ++i) {
                acc += input_jacobian(model, data.features().row(i))(0, 0);
            }
            return acc;
        };
        const double s = time_ms([&] { sink = serial_jacobian(); }, 3);
        const double p = time_ms([&] { sink = dataset_jacobian(model, data).at(0, 0, 0); }, 3);
        row("dataset_jacobian (60k, 8-32-1)", s, p);
        (void)sink;
    }

    return 0;
}
