#include "alphasens/synthetic.hpp"

#include <cmath>

#include "alphasens/errors.hpp"
#include "alphasens/rng.hpp"

namespace alphasens {

double AdditiveFunction::evaluate(std::span<const double> x) const {
    if (x.size() != components.size()) {
        throw DimensionMismatchError("AdditiveFunction input length");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < components.size(); ++j) sum += components[j].value(x[j]);
    return sum;
}

std::vector<double> AdditiveFunction::evaluate_all(const Dataset& dataset) const {
    if (dataset.n_features() != components.size()) {
        throw DimensionMismatchError("AdditiveFunction vs dataset width");
    }
    std::vector<double> out(dataset.n_samples());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(dataset.n_samples()); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        out[i] = evaluate(dataset.features().row(i));
    }
    return out;
}

Dataset gen_normal_inputs(std::size_t n_samples, std::size_t n_features, std::uint64_t seed) {
    if (n_samples == 0 || n_features == 0) throw EmptyInputError("gen_normal_inputs");
    Matrix features(n_samples, n_features);
    Rng rng(seed);
    for (double& v : features.data) v = rng.normal();
    std::vector<std::string> names(n_features);
    for (std::size_t j = 0; j < n_features; ++j) names[j] = "X" + std::to_string(j + 1);
    return Dataset(std::move(features), std::move(names));
}

AdditiveFunction cubic_root_function() {
    AdditiveFunction fun;
    fun.components.resize(8);
    fun.components[0] = {[](double x) { return x * x; }, [](double x) { return 2.0 * x; },
                         nullptr};
    fun.components[1] = {[](double x) { return 2.0 * x; }, [](double) { return 2.0; },
                         nullptr};
    // d/dx cbrt(x)/10 = 1/(30 * cbrt(x)^2), unbounded at 0.
    fun.components[2] = {[](double x) { return 0.1 * std::cbrt(x); },
                         [](double x) {
                             const double c = std::cbrt(x);
                             return 1.0 / (30.0 * c * c);
                         },
                         [](double x) { return std::abs(x) < 1e-300; }};
    for (std::size_t j = 3; j < 8; ++j) {
        fun.components[j] = {[](double) { return 0.0; }, [](double) { return 0.0; }, nullptr};
    }
    return fun;
}

JacobianTensor analytic_jacobian(const AdditiveFunction& fun, const Dataset& dataset) {
    const std::size_t n = fun.n_features();
    if (dataset.n_features() != n) {
        throw DimensionMismatchError("AdditiveFunction vs dataset width");
    }
    const std::size_t rows = dataset.n_samples();

    // Singularities are reported for the lowest offending sample index.
    for (std::size_t j = 0; j < n; ++j) {
        const auto& singular = fun.components[j].singular_at;
        if (!singular) continue;
        for (std::size_t i = 0; i < rows; ++i) {
            if (singular(dataset.feature(i, j))) throw SingularPointError(i, j);
        }
    }

    JacobianTensor jac(rows, 1, n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(rows); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < n; ++j) {
            jac.at(i, 0, j) = fun.components[j].derivative(dataset.feature(i, j));
        }
    }
    jac.validate();
    return jac;
}

std::vector<double> additive_shapley(const AdditiveFunction& fun, const Dataset& dataset,
                                     std::span<const double> x) {
    const std::size_t n = fun.n_features();
    if (dataset.n_features() != n) {
        throw DimensionMismatchError("AdditiveFunction vs dataset width");
    }
    if (x.size() != n) throw DimensionMismatchError("additive_shapley point length");

    std::vector<double> phi(n);
    const double inv_n = 1.0 / static_cast<double>(dataset.n_samples());
    for (std::size_t j = 0; j < n; ++j) {
        double background = 0.0;
        for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
            background += fun.components[j].value(dataset.feature(i, j));
        }
        phi[j] = fun.components[j].value(x[j]) - background * inv_n;
    }
    return phi;
}

}  // namespace alphasens
