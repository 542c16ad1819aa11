#include "alphasens/metric_sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "alphasens/errors.hpp"
#include "alphasens/parallel.hpp"
#include "alphasens/power_mean.hpp"

namespace alphasens {

AlphaGrid::AlphaGrid(std::vector<double> alphas, bool include_infinity)
    : alphas_(std::move(alphas)), include_infinity_(include_infinity) {
    if (alphas_.empty()) throw EmptyInputError("AlphaGrid");
    double prev = 0.0;
    for (double a : alphas_) {
        if (!std::isfinite(a) || a < 1.0) throw Error("grid alphas must lie in [1, inf)");
        if (a <= prev) throw Error("grid alphas must be strictly increasing");
        prev = a;
    }
}

AlphaGrid AlphaGrid::default_grid() {
    return AlphaGrid({1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 16.0});
}

AlphaGrid AlphaGrid::geometric(double lo, double hi, std::size_t count) {
    if (count < 2 || !(lo >= 1.0) || !(hi > lo) || !std::isfinite(hi)) {
        throw Error("geometric grid needs 1 <= lo < hi and count >= 2");
    }
    std::vector<double> alphas(count);
    const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        alphas[i] = lo * std::exp(ratio * static_cast<double>(i));
    }
    alphas.front() = lo;
    alphas.back() = hi;
    return AlphaGrid(std::move(alphas));
}

AlphaCurve::AlphaCurve(std::size_t variable, std::vector<std::pair<double, double>> pts,
                       double asymptote_value)
    : variable_index(variable), points(std::move(pts)), asymptote(asymptote_value) {
    if (points.empty()) throw EmptyInputError("AlphaCurve");
    // Nondecreasing along the grid and below the asymptote, 1e-12 relative slack.
    for (std::size_t t = 0; t + 1 < points.size(); ++t) {
        const double a = points[t].second;
        const double b = points[t + 1].second;
        if (a > b + 1e-12 * std::max(std::abs(a), std::abs(b))) {
            throw Error("alpha-curve is not nondecreasing");
        }
    }
    for (const auto& [alpha, value] : points) {
        if (value > asymptote + 1e-12 * asymptote) {
            throw Error("alpha-curve exceeds its asymptote");
        }
    }
}

namespace {

void check_indices(const JacobianTensor& jac, std::size_t variable, std::size_t output) {
    if (variable >= jac.n_features()) {
        throw IndexOutOfRangeError("variable " + std::to_string(variable) + " of " +
                                   std::to_string(jac.n_features()));
    }
    if (output >= jac.n_outputs()) {
        throw IndexOutOfRangeError("output " + std::to_string(output) + " of " +
                                   std::to_string(jac.n_outputs()));
    }
}

// log |d f_k / d X_j| at every sample where it is nonzero.
std::vector<double> derivative_logs(const JacobianTensor& jac, std::size_t variable,
                                    std::size_t output) {
    std::vector<double> logs;
    logs.reserve(jac.n_samples());
    for (std::size_t i = 0; i < jac.n_samples(); ++i) {
        const double v = std::abs(jac.at(i, output, variable));
        if (v > 0.0) logs.push_back(std::log(v));
    }
    return logs;
}

}  // namespace

double alpha_mean_sensitivity(const JacobianTensor& jac, std::size_t variable,
                              std::size_t output, double alpha) {
    check_indices(jac, variable, output);
    if (std::isnan(alpha) || alpha < 1.0) throw Error("alpha must lie in [1, inf]");
    const std::vector<double> logs = derivative_logs(jac, variable, output);
    return detail::mean_from_logs(logs, jac.n_samples(), alpha);
}

AlphaCurve alpha_curve(const JacobianTensor& jac, std::size_t variable, std::size_t output,
                       const AlphaGrid& grid) {
    check_indices(jac, variable, output);
    const std::vector<double> logs = derivative_logs(jac, variable, output);
    const std::size_t n = jac.n_samples();

    std::vector<std::pair<double, double>> points(grid.alphas().size());
    for (std::size_t t = 0; t < grid.alphas().size(); ++t) {
        const double a = grid.alphas()[t];
        points[t] = {a, detail::mean_from_logs(logs, n, a)};
    }
    const double asymptote = detail::mean_from_logs(logs, n, kInf);
    return AlphaCurve(variable, std::move(points), asymptote);
}

std::vector<AlphaCurve> alpha_curves_all(const JacobianTensor& jac, std::size_t output,
                                         const AlphaGrid& grid) {
    std::vector<AlphaCurve> curves;
    curves.reserve(jac.n_features());
    for (std::size_t j = 0; j < jac.n_features(); ++j) {
        curves.push_back(alpha_curve(jac, j, output, grid));
    }
    return curves;
}

double alpha_from_pq(const NormPair& norms) {
    const double p = norms.p;
    const double q = norms.q;
    if (p <= q) return kInf;
    if (p == kInf) return q;  // limit of pq/(p-q)
    return p * q / (p - q);
}

double sensitivity_pq(const JacobianTensor& jac, std::size_t variable, const NormPair& norms) {
    check_indices(jac, variable, 0);
    const double p = norms.p;
    const double q = norms.q;
    const std::size_t n = jac.n_samples();
    const std::size_t m = jac.n_outputs();

    if (p <= q) {
        // max over samples of the Lq norm of the per-sample gradient row.
        return parallel::blockwise_max(
            n,
            [&](std::size_t i) {
                double row_max = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    const double v = std::abs(jac.at(i, k, variable));
                    if (v > row_max) row_max = v;
                }
                if (q == kInf || row_max == 0.0) return row_max;
                double s = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    const double v = std::abs(jac.at(i, k, variable)) / row_max;
                    if (v > 0.0) s += std::pow(v, q);
                }
                return row_max * std::pow(s, 1.0 / q);
            },
            0.0);
    }

    // p > q, q finite. Work with b_i = log(sum_k |g_ik|^q); the outer sum is a
    // log-sum-exp over p' * b_i with p' = p/(p-q). For p = inf this degrades
    // to p' = 1 and overall exponent 1/q, the analytic limit.
    const double p_prime = (p == kInf) ? 1.0 : p / (p - q);
    const double outer_exponent = (p == kInf) ? 1.0 / q : (p - q) / (p * q);

    std::vector<double> scaled_logs(n, -kInf);  // zero rows drop out on their own
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double row_max = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double v = std::abs(jac.at(i, k, variable));
            if (v > row_max) row_max = v;
        }
        if (row_max == 0.0) continue;
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double v = std::abs(jac.at(i, k, variable)) / row_max;
            if (v > 0.0) s += std::pow(v, q);
        }
        const double b = q * std::log(row_max) + std::log(s);
        scaled_logs[i] = p_prime * b;
    }
    const double lse = detail::log_sum_exp(scaled_logs);
    return lse == -kInf ? 0.0 : std::exp(lse * outer_exponent);
}

namespace serial {

double sensitivity_pq(const JacobianTensor& jac, std::size_t variable, const NormPair& norms) {
    if (variable >= jac.n_features()) {
        throw IndexOutOfRangeError("variable " + std::to_string(variable));
    }
    const double p = norms.p;
    const double q = norms.q;
    const std::size_t n = jac.n_samples();
    const std::size_t m = jac.n_outputs();

    auto row_q_norm = [&](std::size_t i) {
        double row_max = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            row_max = std::max(row_max, std::abs(jac.at(i, k, variable)));
        }
        if (q == kInf || row_max == 0.0) return row_max;
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double v = std::abs(jac.at(i, k, variable)) / row_max;
            if (v > 0.0) s += std::pow(v, q);
        }
        return row_max * std::pow(s, 1.0 / q);
    };

    if (p <= q) {
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) best = std::max(best, row_q_norm(i));
        return best;
    }

    // Direct power sums, scaled by the largest row norm for stability.
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, row_q_norm(i));
    if (scale == 0.0) return 0.0;
    const double p_prime = (p == kInf) ? 1.0 : p / (p - q);
    const double outer_exponent = (p == kInf) ? 1.0 / q : (p - q) / (p * q);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = row_q_norm(i) / scale;
        if (r > 0.0) s += std::pow(r, q * p_prime);
    }
    return scale * std::pow(s, outer_exponent);
}

}  // namespace serial

}  // namespace alphasens
