#include <doctest.h>

#include <cmath>

#include "alphasens/classic_metrics.hpp"
#include "alphasens/metric_sensitivity.hpp"
#include "alphasens/rng.hpp"
#include "alphasens/synthetic.hpp"

using namespace alphasens;

namespace {

JacobianTensor scalar_jac(const std::vector<double>& derivatives) {
    Matrix m(derivatives.size(), 1);
    m.data = derivatives;
    return JacobianTensor::from_matrix(m);
}

}  // namespace

TEST_CASE("classic summaries on the cubic-root ground truth") {
    const AdditiveFunction fun = cubic_root_function();
    const Dataset data = gen_normal_inputs(50000, 8, 21);
    const JacobianTensor jac = analytic_jacobian(fun, data);

    SUBCASE("constant derivative 2 for the linear variable") {
        const SensitivitySummary s = classic_summary(jac, 1, 0);
        CHECK(s.s_avg == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(s.s_sd == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(s.s_sq == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("absent variable is all zeros") {
        const SensitivitySummary s = classic_summary(jac, 4, 0);
        CHECK(s.s_avg == 0.0);
        CHECK(s.s_sd == 0.0);
        CHECK(s.s_sq == 0.0);
    }
    SUBCASE("quadratic variable: derivative 2Z has mean 0 and rms 2") {
        const SensitivitySummary s = classic_summary(jac, 0, 0);
        CHECK(std::abs(s.s_avg) < 0.05);
        CHECK(s.s_sq == doctest::Approx(2.0).epsilon(0.025));
    }
}

TEST_CASE("pythagorean identity with the population convention") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> d(64);
        for (double& v : d) v = rng.normal() * 3.0 + 0.5;
        const SensitivitySummary s = classic_summary(scalar_jac(d), 0, 0);
        const double lhs = s.s_sd * s.s_sd + s.s_avg * s.s_avg;
        CHECK(lhs == doctest::Approx(s.s_sq * s.s_sq).epsilon(1e-10));
    }
}

TEST_CASE("classification rules") {
    auto make = [](double avg, double sd, double sq) {
        SensitivitySummary s;
        s.s_avg = avg;
        s.s_sd = sd;
        s.s_sq = sq;
        return s;
    };
    CHECK(classify_variable(make(2.0, 0.0, 2.0), 2.0, 1e-3) == VariableLabel::kLinear);
    CHECK(classify_variable(make(0.0, 0.0, 0.0), 2.0, 1e-3) == VariableLabel::kIrrelevant);
    CHECK(classify_variable(make(0.0, 2.0, 2.0), 2.0, 1e-3) == VariableLabel::kNonlinear);

    SUBCASE("invariant under joint positive rescaling") {
        Rng rng(9);
        for (int t = 0; t < 50; ++t) {
            const double avg = rng.normal();
            const double sd = std::abs(rng.normal());
            const double sq = std::sqrt(avg * avg + sd * sd);
            const double scale = std::abs(rng.normal()) + 0.1;
            const double c = std::exp(2.0 * rng.normal());
            const VariableLabel a = classify_variable(make(avg, sd, sq), scale, 1e-2);
            const VariableLabel b =
                classify_variable(make(c * avg, c * sd, c * sq), c * scale, 1e-2);
            CHECK(a == b);
        }
    }

    SUBCASE("scale must be positive") {
        CHECK_THROWS_AS((void)classify_variable(make(1, 1, 1), 0.0, 1e-2),
                        NonPositiveScaleError);
        CHECK_THROWS_AS((void)classify_variable(make(1, 1, 1), -3.0, 1e-2),
                        NonPositiveScaleError);
    }
}

TEST_CASE("moments") {
    SUBCASE("constant derivative c at alpha = 3 gives c^3") {
        CHECK(moment(scalar_jac({1.7, 1.7, -1.7}), 0, 0, 3.0) ==
              doctest::Approx(1.7 * 1.7 * 1.7).epsilon(1e-12));
    }
    SUBCASE("direct summation example") {
        CHECK(moment(scalar_jac({1.0, 2.0}), 0, 0, 2.0) ==
              doctest::Approx(2.5).epsilon(1e-12));
    }
    SUBCASE("moment duality across the default grid") {
        const AdditiveFunction fun = cubic_root_function();
        const Dataset data = gen_normal_inputs(2000, 8, 31337);
        const JacobianTensor jac = analytic_jacobian(fun, data);
        const AlphaGrid grid = AlphaGrid::default_grid();
        for (std::size_t j = 0; j < 3; ++j) {
            for (double alpha : grid.alphas()) {
                const double ms = alpha_mean_sensitivity(jac, j, 0, alpha);
                CHECK(moment(jac, j, 0, alpha) ==
                      doctest::Approx(std::pow(ms, alpha)).epsilon(1e-12));
            }
        }
    }
}
