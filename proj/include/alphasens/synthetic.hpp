#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "alphasens/dataset.hpp"

namespace alphasens {

// Sum of univariate components f(x) = sum_j f_j(x_j), each with a closed-form
// derivative. Components may declare points where the derivative blows up.
struct AdditiveFunction {
    struct Component {
        std::function<double(double)> value;
        std::function<double(double)> derivative;
        // Returns true where the derivative is undefined/unbounded.
        std::function<bool(double)> singular_at;
    };

    std::vector<Component> components;

    std::size_t n_features() const { return components.size(); }

    double evaluate(std::span<const double> x) const;
    std::vector<double> evaluate_all(const Dataset& dataset) const;
};

// Seeded standard-normal feature matrix with columns named X1..Xn.
Dataset gen_normal_inputs(std::size_t n_samples, std::size_t n_features, std::uint64_t seed);

// f(x) = x1^2 + 2*x2 + (1/10)*cbrt(x3) over 8 variables; components 4..8 are
// identically zero. cbrt is the real (sign-preserving) cube root.
AdditiveFunction cubic_root_function();

// Exact derivative tensor (m = 1). Throws SingularPointError where a
// component declares the derivative unbounded.
JacobianTensor analytic_jacobian(const AdditiveFunction& fun, const Dataset& dataset);

// Exact Shapley values of an additive function at x against the empirical
// background: phi_j(x) = f_j(x_j) - (1/N) sum_i f_j(x_ij). Efficiency
// sum_j phi_j = f(x) - mean_i f(x_i) holds by construction.
std::vector<double> additive_shapley(const AdditiveFunction& fun, const Dataset& dataset,
                                     std::span<const double> x);

}  // namespace alphasens
