#pragma once

#include <cstddef>
#include <string>

#include "alphasens/dataset.hpp"

namespace alphasens {

enum class VariableLabel { kUnset, kLinear, kNonlinear, kIrrelevant };

std::string to_string(VariableLabel label);
VariableLabel variable_label_from_string(const std::string& s);

// Mean / standard deviation / root-mean-square of the signed partial
// derivatives of one (variable, output) pair. s_sd uses the population
// convention (ddof = 0) so s_avg^2 + s_sd^2 == s_sq^2 holds exactly.
struct SensitivitySummary {
    std::size_t variable_index = 0;
    double s_avg = 0.0;
    double s_sd = 0.0;
    double s_sq = 0.0;
    VariableLabel label = VariableLabel::kUnset;
};

SensitivitySummary classic_summary(const JacobianTensor& jac, std::size_t variable,
                                   std::size_t output);

// Threshold rule against a common scale (typically max_j s_sq):
//   irrelevant  if s_sd < eps*scale and |s_avg| < eps*scale
//   linear      if s_sd < eps*scale and |s_avg| >= eps*scale
//   nonlinear   otherwise
VariableLabel classify_variable(const SensitivitySummary& summary, double scale,
                                double eps_rel);

// (1/N) * sum_i |d f_k / d X_j|^alpha, finite alpha >= 1. Equals
// alpha_mean_sensitivity(...)^alpha.
double moment(const JacobianTensor& jac, std::size_t variable, std::size_t output,
              double alpha);

}  // namespace alphasens
