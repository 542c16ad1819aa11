#include <doctest.h>

#include <cmath>

#include "alphasens/oracle.hpp"
#include "alphasens/rng.hpp"
#include "alphasens/synthetic.hpp"

using namespace alphasens;

namespace {

// Brute-force Shapley over all coalitions with the empirical-mean value
// function v(S) = E_background[ f(x_S, X_rest) ]; for additive f that mean
// splits per component. Weight |S|! (n-|S|-1)! / n!.
std::vector<double> coalition_shapley(const AdditiveFunction& fun, const Dataset& data,
                                      std::span<const double> x) {
    const std::size_t n = fun.n_features();
    std::vector<double> present(n), background(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        present[j] = fun.components[j].value(x[j]);
        for (std::size_t i = 0; i < data.n_samples(); ++i) {
            background[j] += fun.components[j].value(data.feature(i, j));
        }
        background[j] /= static_cast<double>(data.n_samples());
    }
    auto value_of = [&](std::uint32_t mask) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            v += (mask >> j) & 1u ? present[j] : background[j];
        }
        return v;
    };
    std::vector<double> factorial(n + 1, 1.0);
    for (std::size_t k = 1; k <= n; ++k) {
        factorial[k] = factorial[k - 1] * static_cast<double>(k);
    }
    std::vector<double> phi(n, 0.0);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const int size = __builtin_popcount(mask);
        for (std::size_t j = 0; j < n; ++j) {
            if ((mask >> j) & 1u) continue;
            const double weight = factorial[size] *
                                  factorial[n - size - 1] / factorial[n];
            phi[j] += weight * (value_of(mask | (1u << j)) - value_of(mask));
        }
    }
    return phi;
}

}  // namespace

TEST_CASE("gen_normal_inputs is seeded and well calibrated") {
    const Dataset a = gen_normal_inputs(50000, 8, 5);
    const Dataset b = gen_normal_inputs(50000, 8, 5);
    CHECK(a.features().data == b.features().data);

    CHECK(a.feature_names().front() == "X1");
    CHECK(a.feature_names().back() == "X8");

    for (std::size_t j = 0; j < 8; ++j) {
        double mean = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < a.n_samples(); ++i) mean += a.feature(i, j);
        mean /= 50000.0;
        for (std::size_t i = 0; i < a.n_samples(); ++i) {
            const double d = a.feature(i, j) - mean;
            ss += d * d;
        }
        const double stddev = std::sqrt(ss / 49999.0);
        CHECK(std::abs(mean) < 0.02);
        CHECK(std::abs(stddev - 1.0) < 0.02);
    }
}

TEST_CASE("cubic-root function values and derivatives") {
    const AdditiveFunction fun = cubic_root_function();
    REQUIRE(fun.n_features() == 8);

    std::vector<double> x(8, 0.0);
    x[0] = 1.0;
    x[1] = 1.0;
    x[2] = 1.0;
    CHECK(fun.evaluate(x) == doctest::Approx(3.1).epsilon(1e-12));
    CHECK(fun.evaluate(std::vector<double>(8, 0.0)) == 0.0);

    for (double v : {-2.0, -0.1, 0.4, 3.0}) {
        CHECK(fun.components[1].derivative(v) == 2.0);
    }
    CHECK(fun.components[2].derivative(1.0) == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
    // steep near the origin: (1/30) * 0.001^(-2/3) = 10/3
    CHECK(fun.components[2].derivative(0.001) ==
          doctest::Approx(10.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("analytic jacobian") {
    const AdditiveFunction fun = cubic_root_function();
    const Dataset data = gen_normal_inputs(300, 8, 23);
    const JacobianTensor jac = analytic_jacobian(fun, data);

    SUBCASE("columns match the closed forms") {
        for (std::size_t i = 0; i < data.n_samples(); ++i) {
            CHECK(jac.at(i, 0, 1) == 2.0);
            CHECK(jac.at(i, 0, 0) == 2.0 * data.feature(i, 0));
            for (std::size_t j = 3; j < 8; ++j) CHECK(jac.at(i, 0, j) == 0.0);
        }
    }

    SUBCASE("matches central finite differences away from the singularity") {
        VectorFunction f{8, 1, [&fun](std::span<const double> x) {
                             return std::vector<double>{fun.evaluate(x)};
                         }};
        for (std::size_t i = 0; i < 25; ++i) {
            if (std::abs(data.feature(i, 2)) < 1e-2) continue;  // fd itself degrades
            const Matrix fd = finite_diff_jacobian(f, data.features().row(i), 1e-6);
            for (std::size_t j = 0; j < 8; ++j) {
                CHECK(std::abs(fd(0, j) - jac.at(i, 0, j)) <= 1e-6);
            }
        }
    }

    SUBCASE("singular point is reported with its indices") {
        Matrix features(2, 8, 1.0);
        features(1, 2) = 0.0;
        const Dataset bad(features, data.feature_names());
        try {
            (void)analytic_jacobian(fun, bad);
            FAIL("expected SingularPointError");
        } catch (const SingularPointError& e) {
            CHECK(e.sample == 1);
            CHECK(e.variable == 2);
        }
    }
}

TEST_CASE("additive shapley") {
    const AdditiveFunction cubic = cubic_root_function();
    const Dataset data = gen_normal_inputs(500, 8, 41);

    SUBCASE("zero function gives zero attributions") {
        AdditiveFunction zero;
        zero.components.resize(8);
        for (auto& c : zero.components) {
            c = {[](double) { return 0.0; }, [](double) { return 0.0; }, nullptr};
        }
        const auto phi = additive_shapley(zero, data, data.features().row(0));
        for (double v : phi) CHECK(v == 0.0);
    }

    SUBCASE("single linear component on centered data") {
        AdditiveFunction lin;
        lin.components.resize(8);
        for (auto& c : lin.components) {
            c = {[](double) { return 0.0; }, [](double) { return 0.0; }, nullptr};
        }
        lin.components[1] = {[](double v) { return 2.0 * v; }, [](double) { return 2.0; },
                             nullptr};
        // center column 1 so the background mean term vanishes
        Matrix centered = data.features();
        double mean = 0.0;
        for (std::size_t i = 0; i < data.n_samples(); ++i) mean += centered(i, 1);
        mean /= static_cast<double>(data.n_samples());
        for (std::size_t i = 0; i < data.n_samples(); ++i) centered(i, 1) -= mean;
        const Dataset cdata(centered, data.feature_names());

        std::vector<double> x(8, 0.7);
        const auto phi = additive_shapley(lin, cdata, x);
        CHECK(phi[1] == doctest::Approx(1.4).epsilon(1e-12));
        for (std::size_t j = 0; j < 8; ++j) {
            if (j != 1) CHECK(std::abs(phi[j]) < 1e-15);
        }
    }

    SUBCASE("efficiency identity on random points") {
        const std::vector<double> f_values = cubic.evaluate_all(data);
        double f_mean = 0.0;
        for (double v : f_values) f_mean += v;
        f_mean /= static_cast<double>(data.n_samples());

        Rng rng(55);
        for (int t = 0; t < 25; ++t) {
            std::vector<double> x(8);
            for (double& v : x) v = rng.normal();
            const auto phi = additive_shapley(cubic, data, x);
            double total = 0.0;
            for (double v : phi) total += v;
            CHECK(total == doctest::Approx(cubic.evaluate(x) - f_mean).epsilon(1e-10));
        }
    }

    SUBCASE("matches brute-force coalition enumeration over all 2^8 subsets") {
        Rng rng(56);
        for (int t = 0; t < 5; ++t) {
            std::vector<double> x(8);
            for (double& v : x) v = rng.normal();
            const auto fast = additive_shapley(cubic, data, x);
            const auto brute = coalition_shapley(cubic, data, x);
            for (std::size_t j = 0; j < 8; ++j) {
                CHECK(fast[j] == doctest::Approx(brute[j]).epsilon(1e-8));
            }
        }
    }
}
