#include "alphasens/classic_metrics.hpp"

#include <cmath>

#include "alphasens/errors.hpp"
#include "alphasens/parallel.hpp"
#include "alphasens/power_mean.hpp"

namespace alphasens {

std::string to_string(VariableLabel label) {
    switch (label) {
        case VariableLabel::kLinear: return "linear";
        case VariableLabel::kNonlinear: return "nonlinear";
        case VariableLabel::kIrrelevant: return "irrelevant";
        case VariableLabel::kUnset: return "unset";
    }
    return "unset";
}

VariableLabel variable_label_from_string(const std::string& s) {
    if (s == "linear") return VariableLabel::kLinear;
    if (s == "nonlinear") return VariableLabel::kNonlinear;
    if (s == "irrelevant") return VariableLabel::kIrrelevant;
    return VariableLabel::kUnset;
}

SensitivitySummary classic_summary(const JacobianTensor& jac, std::size_t variable,
                                   std::size_t output) {
    if (variable >= jac.n_features()) {
        throw IndexOutOfRangeError("variable " + std::to_string(variable));
    }
    if (output >= jac.n_outputs()) {
        throw IndexOutOfRangeError("output " + std::to_string(output));
    }
    const std::size_t n = jac.n_samples();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double sum = parallel::blockwise_sum(
        n, [&](std::size_t i) { return jac.at(i, output, variable); });
    const double sum_sq = parallel::blockwise_sum(n, [&](std::size_t i) {
        const double v = jac.at(i, output, variable);
        return v * v;
    });
    const double mean = sum * inv_n;
    const double mean_sq = sum_sq * inv_n;
    const double var = std::max(0.0, mean_sq - mean * mean);

    SensitivitySummary out;
    out.variable_index = variable;
    out.s_avg = mean;
    out.s_sd = std::sqrt(var);
    out.s_sq = std::sqrt(mean_sq);
    return out;
}

VariableLabel classify_variable(const SensitivitySummary& summary, double scale,
                                double eps_rel) {
    if (!(scale > 0.0)) throw NonPositiveScaleError();
    if (!(eps_rel > 0.0) || !(eps_rel < 1.0)) throw Error("eps_rel must lie in (0, 1)");
    const double threshold = eps_rel * scale;
    if (summary.s_sd < threshold) {
        return std::abs(summary.s_avg) < threshold ? VariableLabel::kIrrelevant
                                                   : VariableLabel::kLinear;
    }
    return VariableLabel::kNonlinear;
}

double moment(const JacobianTensor& jac, std::size_t variable, std::size_t output,
              double alpha) {
    if (variable >= jac.n_features()) {
        throw IndexOutOfRangeError("variable " + std::to_string(variable));
    }
    if (output >= jac.n_outputs()) {
        throw IndexOutOfRangeError("output " + std::to_string(output));
    }
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
        throw Error("moment alpha must be finite and >= 1");
    }
    std::vector<double> logs;
    logs.reserve(jac.n_samples());
    for (std::size_t i = 0; i < jac.n_samples(); ++i) {
        const double v = std::abs(jac.at(i, output, variable));
        if (v > 0.0) logs.push_back(std::log(v));
    }
    return detail::moment_from_logs(logs, jac.n_samples(), alpha);
}

}  // namespace alphasens
