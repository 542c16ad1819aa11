#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace alphasens {

// Generalized alpha-mean M_alpha of nonnegative values:
//   M_alpha = ((sum_i t_i^alpha) / N)^(1/alpha),   M_inf = max_i t_i.
// Evaluated in the log domain (log-sum-exp over alpha*log t_i, zeros dropped
// from the power sum, N kept as the full count) so power sums cannot
// overflow for t_i <= 1e300 and alpha <= 1e4. All-zero input returns 0.
double generalized_mean(std::span<const double> values, double alpha);

// Raw absolute moment (1/N) * sum_i t_i^alpha for finite alpha >= 1,
// same log-domain evaluation.
double power_moment(std::span<const double> values, double alpha);

namespace detail {

// Precomputed log magnitudes: log(t_i) per entry, -inf marking zeros (such
// entries drop out of the power sum on their own). Zero entries may also be
// omitted entirely, in which case n_total still counts them. These are the
// shared kernel behind generalized_mean / power_moment and the alpha-curve
// sweep, which evaluates many alphas over one log vector.
double mean_from_logs(std::span<const double> log_values, std::size_t n_total, double alpha);
double moment_from_logs(std::span<const double> log_values, std::size_t n_total, double alpha);

// log(sum_i exp(a_i)); -inf for an empty span.
double log_sum_exp(std::span<const double> values);

// Validates and extracts logs of the positive entries of |values|.
// Throws EmptyInputError / NegativeValueError / NonFiniteError.
std::vector<double> checked_logs(std::span<const double> values);

}  // namespace detail

// Plain ascending-order loops, no OpenMP. Kept as the reference the parallel
// kernels are tested and benchmarked against.
namespace serial {

double generalized_mean(std::span<const double> values, double alpha);
double power_moment(std::span<const double> values, double alpha);

}  // namespace serial

}  // namespace alphasens
