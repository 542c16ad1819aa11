#include "alphasens/power_mean.hpp"

#include <cmath>

#include "alphasens/dataset.hpp"
#include "alphasens/errors.hpp"
#include "alphasens/parallel.hpp"

namespace alphasens {

namespace detail {

std::vector<double> checked_logs(std::span<const double> values) {
    if (values.empty()) throw EmptyInputError("generalized mean");
    bool nonfinite = false;
    bool negative = false;
    std::vector<double> logs(values.size());
#pragma omp parallel for schedule(static) reduction(||: nonfinite, negative)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(values.size()); ++ii) {
        const double v = values[static_cast<std::size_t>(ii)];
        nonfinite = nonfinite || !std::isfinite(v);
        negative = negative || v < 0.0;
        // zeros map to -inf and drop out of the power sum on their own
        logs[static_cast<std::size_t>(ii)] = v > 0.0 ? std::log(v) : -kInf;
    }
    if (nonfinite) throw NonFiniteError("generalized mean input");
    if (negative) throw NegativeValueError("generalized mean input");
    return logs;
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) return -kInf;
    const double m =
        parallel::blockwise_max(values.size(), [&](std::size_t i) { return values[i]; },
                                -kInf);
    if (m == -kInf) return -kInf;  // all terms are exactly zero
    const double s = parallel::blockwise_sum(
        values.size(), [&](std::size_t i) { return std::exp(values[i] - m); });
    return m + std::log(s);
}

double mean_from_logs(std::span<const double> log_values, std::size_t n_total, double alpha) {
    if (n_total == 0) throw EmptyInputError("generalized mean");
    if (log_values.empty()) return 0.0;
    const double max_log = parallel::blockwise_max(
        log_values.size(), [&](std::size_t i) { return log_values[i]; }, -kInf);
    if (max_log == -kInf) return 0.0;  // all zeros
    if (alpha == kInf) return std::exp(max_log);
    const double m = alpha * max_log;
    const double s = parallel::blockwise_sum(log_values.size(), [&](std::size_t i) {
        return std::exp(alpha * log_values[i] - m);
    });
    const double lse = m + std::log(s);
    return std::exp((lse - std::log(static_cast<double>(n_total))) / alpha);
}

double moment_from_logs(std::span<const double> log_values, std::size_t n_total,
                        double alpha) {
    if (n_total == 0) throw EmptyInputError("power moment");
    if (log_values.empty()) return 0.0;
    const double max_log = parallel::blockwise_max(
        log_values.size(), [&](std::size_t i) { return log_values[i]; }, -kInf);
    if (max_log == -kInf) return 0.0;
    const double m = alpha * max_log;
    const double s = parallel::blockwise_sum(log_values.size(), [&](std::size_t i) {
        return std::exp(alpha * log_values[i] - m);
    });
    const double lse = m + std::log(s);
    return std::exp(lse - std::log(static_cast<double>(n_total)));
}

}  // namespace detail

namespace {

void check_alpha(double alpha, bool allow_inf) {
    if (std::isnan(alpha) || alpha < 1.0 || (!allow_inf && alpha == kInf)) {
        throw Error("alpha must lie in [1, inf)" + std::string(allow_inf ? " or be inf" : ""));
    }
}

}  // namespace

double generalized_mean(std::span<const double> values, double alpha) {
    check_alpha(alpha, /*allow_inf=*/true);
    const std::vector<double> logs = detail::checked_logs(values);
    return detail::mean_from_logs(logs, values.size(), alpha);
}

double power_moment(std::span<const double> values, double alpha) {
    check_alpha(alpha, /*allow_inf=*/false);
    const std::vector<double> logs = detail::checked_logs(values);
    return detail::moment_from_logs(logs, values.size(), alpha);
}

namespace serial {

double generalized_mean(std::span<const double> values, double alpha) {
    check_alpha(alpha, /*allow_inf=*/true);
    if (values.empty()) throw EmptyInputError("generalized mean");
    double max_log = -kInf;
    std::size_t positive = 0;
    for (double v : values) {
        if (!std::isfinite(v)) throw NonFiniteError("generalized mean input");
        if (v < 0.0) throw NegativeValueError("generalized mean input");
        if (v > 0.0) {
            ++positive;
            const double lv = std::log(v);
            if (lv > max_log) max_log = lv;
        }
    }
    if (positive == 0) return 0.0;
    if (alpha == kInf) return std::exp(max_log);
    double s = 0.0;
    for (double v : values) {
        if (v > 0.0) s += std::exp(alpha * (std::log(v) - max_log));
    }
    const double lse = alpha * max_log + std::log(s);
    return std::exp((lse - std::log(static_cast<double>(values.size()))) / alpha);
}

double power_moment(std::span<const double> values, double alpha) {
    check_alpha(alpha, /*allow_inf=*/false);
    if (values.empty()) throw EmptyInputError("power moment");
    double max_log = -kInf;
    std::size_t positive = 0;
    for (double v : values) {
        if (!std::isfinite(v)) throw NonFiniteError("power moment input");
        if (v < 0.0) throw NegativeValueError("power moment input");
        if (v > 0.0) {
            ++positive;
            const double lv = std::log(v);
            if (lv > max_log) max_log = lv;
        }
    }
    if (positive == 0) return 0.0;
    double s = 0.0;
    for (double v : values) {
        if (v > 0.0) s += std::exp(alpha * (std::log(v) - max_log));
    }
    const double lse = alpha * max_log + std::log(s);
    return std::exp(lse - std::log(static_cast<double>(values.size())));
}

}  // namespace serial

}  // namespace alphasens
