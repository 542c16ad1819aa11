#include "alphasens/dataset.hpp"

#include <cmath>
#include <unordered_set>

#include "alphasens/parallel.hpp"

namespace alphasens {

Dataset::Dataset(Matrix features, std::vector<std::string> feature_names,
                 std::vector<double> target)
    : features_(std::move(features)),
      target_(std::move(target)),
      feature_names_(std::move(feature_names)) {
    if (features_.rows == 0 || features_.cols == 0) {
        throw EmptyInputError("Dataset features");
    }
    if (feature_names_.size() != features_.cols) {
        throw DimensionMismatchError("feature_names size " +
                                     std::to_string(feature_names_.size()) + " vs " +
                                     std::to_string(features_.cols) + " columns");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names_) {
        if (name.empty()) throw Error("feature name must be nonempty");
        if (!seen.insert(name).second) throw Error("duplicate feature name '" + name + "'");
    }
    for (double v : features_.data) {
        if (!std::isfinite(v)) throw NonFiniteError("Dataset features");
    }
    if (!target_.empty()) {
        if (target_.size() != features_.rows) {
            throw DimensionMismatchError("target size " + std::to_string(target_.size()) +
                                         " vs " + std::to_string(features_.rows) + " rows");
        }
        for (double v : target_) {
            if (!std::isfinite(v)) throw NonFiniteError("Dataset target");
        }
    }
}

JacobianTensor::JacobianTensor(std::size_t n_samples, std::size_t n_outputs,
                               std::size_t n_features)
    : n_samples_(n_samples),
      n_outputs_(n_outputs),
      n_features_(n_features),
      values_(n_samples * n_outputs * n_features, 0.0) {
    if (n_samples_ == 0 || n_outputs_ == 0 || n_features_ == 0) {
        throw EmptyInputError("JacobianTensor dimensions");
    }
}

JacobianTensor::JacobianTensor(std::size_t n_samples, std::size_t n_outputs,
                               std::size_t n_features, std::vector<double> values)
    : n_samples_(n_samples),
      n_outputs_(n_outputs),
      n_features_(n_features),
      values_(std::move(values)) {
    if (n_samples_ == 0 || n_outputs_ == 0 || n_features_ == 0) {
        throw EmptyInputError("JacobianTensor dimensions");
    }
    if (values_.size() != n_samples_ * n_outputs_ * n_features_) {
        throw DimensionMismatchError("JacobianTensor values size");
    }
    validate();
}

void JacobianTensor::validate() const {
    for (double v : values_) {
        if (!std::isfinite(v)) throw NonFiniteError("JacobianTensor values");
    }
}

Matrix JacobianTensor::slice_for_variable(std::size_t j) const {
    if (j >= n_features_) {
        throw IndexOutOfRangeError("variable " + std::to_string(j) + " of " +
                                   std::to_string(n_features_));
    }
    Matrix out(n_samples_, n_outputs_);
    for (std::size_t i = 0; i < n_samples_; ++i) {
        for (std::size_t k = 0; k < n_outputs_; ++k) out(i, k) = at(i, k, j);
    }
    return out;
}

JacobianTensor JacobianTensor::from_matrix(const Matrix& derivatives) {
    JacobianTensor out(derivatives.rows, 1, derivatives.cols, derivatives.data);
    return out;
}

NormPair::NormPair(double p_, double q_) : p(p_), q(q_) {
    const bool p_ok = (p >= 1.0 && std::isfinite(p)) || p == kInf;
    const bool q_ok = (q >= 1.0 && std::isfinite(q)) || q == kInf;
    if (!p_ok || !q_ok) {
        throw Error("norm orders must lie in [1, inf]");
    }
}

std::pair<Dataset, StandardizationParams> standardize(const Dataset& dataset) {
    const std::size_t n = dataset.n_features();
    const std::size_t rows = dataset.n_samples();

    StandardizationParams params;
    params.mean.resize(n);
    params.stddev.resize(n);

    const Matrix& src = dataset.features();
    Matrix out(rows, n);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(n); ++jj) {
        const std::size_t j = static_cast<std::size_t>(jj);
        double sum = 0.0;
        for (std::size_t i = 0; i < rows; ++i) sum += src(i, j);
        const double mean = sum / static_cast<double>(rows);
        double ss = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            const double d = src(i, j) - mean;
            ss += d * d;
        }
        const double denom = rows > 1 ? static_cast<double>(rows - 1) : 1.0;
        params.mean[j] = mean;
        params.stddev[j] = std::sqrt(ss / denom);
    }

    for (std::size_t j = 0; j < n; ++j) {
        if (!(params.stddev[j] > 0.0)) throw ConstantColumnError(j);
    }

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(rows); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = (src(i, j) - params.mean[j]) / params.stddev[j];
        }
    }

    return {Dataset(std::move(out), dataset.feature_names(), dataset.target()),
            std::move(params)};
}

Dataset inverse_standardize(const Dataset& dataset, const StandardizationParams& params) {
    const std::size_t n = dataset.n_features();
    const std::size_t rows = dataset.n_samples();
    if (params.mean.size() != n || params.stddev.size() != n) {
        throw DimensionMismatchError("standardization params vs dataset width");
    }
    Matrix out(rows, n);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = dataset.feature(i, j) * params.stddev[j] + params.mean[j];
        }
    }
    return Dataset(std::move(out), dataset.feature_names(), dataset.target());
}

std::tuple<std::vector<double>, double, double> rescale_target(
    const std::vector<double>& target) {
    if (target.empty()) throw EmptyInputError("rescale_target");
    double lo = target[0];
    double hi = target[0];
    for (double v : target) {
        if (!std::isfinite(v)) throw NonFiniteError("rescale_target");
        lo = v < lo ? v : lo;
        hi = v > hi ? v : hi;
    }
    if (!(hi > lo)) throw DegenerateTargetError();
    std::vector<double> out(target.size());
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < target.size(); ++i) out[i] = (target[i] - lo) * inv;
    return {std::move(out), lo, hi};
}

}  // namespace alphasens
