#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "alphasens/baselines.hpp"
#include "alphasens/dataset.hpp"
#include "alphasens/rng.hpp"
#include "alphasens/synthetic.hpp"

using namespace alphasens;

TEST_CASE("a predictor that ignores its inputs scores zero everywhere") {
    const Dataset d = gen_normal_inputs(200, 4, 3);
    std::vector<double> target(200, 0.5);
    Predictor constant = [](const Matrix& f) {
        return std::vector<double>(f.rows, 0.25);
    };
    const PermutationResult res =
        permutation_importance(constant, d, target, ErrorMetric::kMse, 5, 42);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(res.importance[j] == 0.0);
        for (double v : res.per_repeat[j]) CHECK(v == 0.0);
    }
}

TEST_CASE("unused columns of the cubic-root function score exactly zero") {
    const AdditiveFunction fun = cubic_root_function();
    const Dataset d = gen_normal_inputs(2000, 8, 7);
    const std::vector<double> raw = fun.evaluate_all(d);
    const auto [target, lo, hi] = rescale_target(raw);

    const double span = hi - lo;
    const double base = lo;
    Predictor analytic = [&fun, span, base](const Matrix& f) {
        std::vector<double> out(f.rows);
        for (std::size_t i = 0; i < f.rows; ++i) {
            out[i] = (fun.evaluate(f.row(i)) - base) / span;
        }
        return out;
    };

    const PermutationResult res =
        permutation_importance(analytic, d, target, ErrorMetric::kMse, 10, 11);
    for (std::size_t j = 3; j < 8; ++j) {
        CHECK(std::abs(res.importance[j]) < 1e-3);
        for (double v : res.per_repeat[j]) CHECK(v == 0.0);
    }
    // the used variables do register
    CHECK(res.importance[0] > 1e-3);
    CHECK(res.importance[1] > 1e-3);
}

TEST_CASE("identity predictor importance approaches 2 Var under mse") {
    const std::size_t n = 20000;
    const Dataset d = gen_normal_inputs(n, 1, 13);
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) target[i] = d.feature(i, 0);

    Predictor identity = [](const Matrix& f) { return f.column(0); };
    const PermutationResult res =
        permutation_importance(identity, d, target, ErrorMetric::kMse, 10, 29);

    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += d.feature(i, 0);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = d.feature(i, 0) - mean;
        var += v * v;
    }
    var /= static_cast<double>(n);

    CHECK(res.baseline_error == 0.0);
    CHECK(res.importance[0] == doctest::Approx(2.0 * var).epsilon(0.05));
}

TEST_CASE("importances may be negative and are not clamped") {
    const std::size_t n = 5000;
    const Dataset d = gen_normal_inputs(n, 1, 17);
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) target[i] = d.feature(i, 0);

    // anti-predictor: shuffling decorrelates and cuts the error roughly in half
    Predictor anti = [](const Matrix& f) {
        std::vector<double> out = f.column(0);
        for (double& v : out) v = -v;
        return out;
    };
    const PermutationResult res =
        permutation_importance(anti, d, target, ErrorMetric::kMse, 8, 19);
    CHECK(res.importance[0] < -0.5);
}

TEST_CASE("results are deterministic and thread-count independent") {
    const Dataset d = gen_normal_inputs(500, 3, 21);
    std::vector<double> target(500);
    for (std::size_t i = 0; i < 500; ++i) {
        target[i] = d.feature(i, 0) + 0.5 * d.feature(i, 2);
    }
    Predictor p = [](const Matrix& f) { return f.column(0); };

    const PermutationResult a =
        permutation_importance(p, d, target, ErrorMetric::kMae, 6, 77);
    const PermutationResult b =
        permutation_importance(p, d, target, ErrorMetric::kMae, 6, 77);
    CHECK(a.importance == b.importance);
    CHECK(a.per_repeat == b.per_repeat);

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const PermutationResult c =
        permutation_importance(p, d, target, ErrorMetric::kMae, 6, 77);
    omp_set_num_threads(saved);
    CHECK(a.importance == c.importance);
    CHECK(a.per_repeat == c.per_repeat);
}

TEST_CASE("validation errors") {
    const Dataset d = gen_normal_inputs(10, 2, 1);
    Predictor p = [](const Matrix& f) { return std::vector<double>(f.rows, 0.0); };
    CHECK_THROWS_AS(
        (void)permutation_importance(p, d, {}, ErrorMetric::kMse, 3, 1),
        MissingTargetError);
    CHECK_THROWS_AS((void)permutation_importance(p, d, std::vector<double>(10, 0.0),
                                                 ErrorMetric::kMse, 0, 1),
                    Error);
}
