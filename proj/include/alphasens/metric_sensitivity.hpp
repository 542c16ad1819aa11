#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "alphasens/dataset.hpp"

namespace alphasens {

// Strictly increasing alpha values in [1, inf), plus an optional infinity point.
class AlphaGrid {
  public:
    AlphaGrid(std::vector<double> alphas, bool include_infinity = true);

    const std::vector<double>& alphas() const { return alphas_; }
    bool include_infinity() const { return include_infinity_; }

    // {1, 1.25, 1.5, 2, 2.5, 3, 4, 5, 6, 8, 10, 12, 16} + inf.
    static AlphaGrid default_grid();

    // count geometrically spaced points from lo to hi (inclusive) + inf.
    static AlphaGrid geometric(double lo, double hi, std::size_t count);

  private:
    std::vector<double> alphas_;
    bool include_infinity_;
};

// One variable's alpha-mean sensitivities over a grid, with the alpha -> inf
// asymptote (the max absolute derivative). Nondecreasing and bounded by the
// asymptote by construction; the constructor re-checks both.
struct AlphaCurve {
    std::size_t variable_index = 0;
    std::vector<std::pair<double, double>> points;  // (alpha, ms^alpha)
    double asymptote = 0.0;

    AlphaCurve() = default;
    AlphaCurve(std::size_t variable, std::vector<std::pair<double, double>> pts,
               double asymptote_value);

    double value_at_index(std::size_t t) const { return points[t].second; }
    double front() const { return points.front().second; }
};

// M_alpha over { |d f_k / d X_j (x_i)| : i = 1..N }.
double alpha_mean_sensitivity(const JacobianTensor& jac, std::size_t variable,
                              std::size_t output, double alpha);

// Full curve over the grid; one pass extracts the log magnitudes, every grid
// point reuses them.
AlphaCurve alpha_curve(const JacobianTensor& jac, std::size_t variable, std::size_t output,
                       const AlphaGrid& grid);

// Curves for all variables of one output, sharing the grid.
std::vector<AlphaCurve> alpha_curves_all(const JacobianTensor& jac, std::size_t output,
                                         const AlphaGrid& grid);

// The mean order induced by an (Lp, Lq) norm choice on a scalar function:
//   p >  q (finite):  pq / (p - q)
//   p <= q:           inf
//   p = inf, finite q: q   (limit of pq/(p-q) as p -> inf)
double alpha_from_pq(const NormPair& norms);

// Closed-form (Lp -> Lq) operator-norm sensitivity of variable j:
//   p <= q:  max_i || row_i ||_q
//   p >  q:  ( sum_i ( sum_k |g_ik|^q )^(p/(p-q)) )^((p-q)/(pq))
// with the p = inf case taken as the analytic limit of the second branch.
double sensitivity_pq(const JacobianTensor& jac, std::size_t variable, const NormPair& norms);

namespace serial {
// Reference evaluation with plain ascending loops (direct power sums scaled
// by the max magnitude, no log-sum-exp).
double sensitivity_pq(const JacobianTensor& jac, std::size_t variable, const NormPair& norms);
}  // namespace serial

}  // namespace alphasens
