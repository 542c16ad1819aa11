#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "alphasens/dataset.hpp"

namespace alphasens {

// A differentiable map R^n -> R^m given as a black box.
struct VectorFunction {
    std::size_t n_inputs = 0;
    std::size_t n_outputs = 0;
    std::function<std::vector<double>(std::span<const double>)> eval;
};

struct OperatorNormEstimate {
    double value = 0.0;
    std::vector<double> maximizer;  // h on the unit Lp sphere attaining value
};

inline constexpr std::size_t kOracleMaxSamples = 12;

// Maximizes || D h ||_q over || h ||_p = 1 for the block-diagonal operator
// built from one variable's N x m derivative slice, by projected gradient
// ascent with seeded restarts (one-hot starts first, then random ones).
// A feasible-point maximizer can only lower-bound the supremum, so the value
// never exceeds the closed form; with enough restarts it reaches it.
OperatorNormEstimate brute_force_operator_norm(const Matrix& jac_slice, const NormPair& norms,
                                               std::size_t restarts, std::size_t iters,
                                               std::uint64_t seed);

// Estimates the limit definition of sensitivity directly from function
// evaluations: for each epsilon, the supremum over sampled perturbations
// || h ||_p = epsilon of the total variation ratio v(f, h) / epsilon.
// Returns (epsilon, sup estimate) pairs in the given epsilon order.
std::vector<std::pair<double, double>> empirical_sensitivity_limit(
    const VectorFunction& f, const Dataset& dataset, std::size_t variable,
    const NormPair& norms, const std::vector<double>& epsilons, std::size_t probes,
    std::uint64_t seed);

// Central differences (f(x + s e_j) - f(x - s e_j)) / (2 s), one column per input.
Matrix finite_diff_jacobian(const VectorFunction& f, std::span<const double> x, double step);

}  // namespace alphasens
