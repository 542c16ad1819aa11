#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "alphasens/dataset.hpp"

namespace alphasens {

enum class ErrorMetric { kMse, kMae };

std::string to_string(ErrorMetric m);
ErrorMetric error_metric_from_string(const std::string& s);

// Predicts a scalar per row of a feature matrix.
using Predictor = std::function<std::vector<double>(const Matrix&)>;

struct PermutationResult {
    std::vector<double> importance;               // mean error increase per variable
    std::vector<std::vector<double>> per_repeat;  // [variable][repeat]
    double baseline_error = 0.0;
    std::uint64_t seed = 0;
    std::string metric_name;
};

// Error increase when one feature column is shuffled, averaged over seeded
// repeats. Each (variable, repeat) pair draws from its own substream, so the
// result does not depend on evaluation order. Negative importances are
// reported as-is.
PermutationResult permutation_importance(const Predictor& predict, const Dataset& dataset,
                                         const std::vector<double>& target,
                                         ErrorMetric metric, std::size_t repeats,
                                         std::uint64_t seed);

}  // namespace alphasens
