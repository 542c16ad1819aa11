#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "alphasens/errors.hpp"

namespace alphasens {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Row-major dense matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data.data() + i * cols, cols);
    }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out(rows);
        for (std::size_t i = 0; i < rows; ++i) out[i] = data[i * cols + j];
        return out;
    }
};

// A tabular dataset: one column per variable, optional scalar target.
class Dataset {
  public:
    Dataset(Matrix features, std::vector<std::string> feature_names,
            std::vector<double> target = {});

    std::size_t n_samples() const { return features_.rows; }
    std::size_t n_features() const { return features_.cols; }
    bool has_target() const { return !target_.empty(); }

    const Matrix& features() const { return features_; }
    const std::vector<double>& target() const { return target_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    double feature(std::size_t i, std::size_t j) const { return features_(i, j); }
    std::vector<double> column(std::size_t j) const { return features_.column(j); }

    Dataset with_target(std::vector<double> target) const {
        return Dataset(features_, feature_names_, std::move(target));
    }

  private:
    Matrix features_;
    std::vector<double> target_;
    std::vector<std::string> feature_names_;
};

// Dense N x m x n tensor of partial derivatives: at(i, k, j) = d f_k / d X_j
// evaluated at sample i.
class JacobianTensor {
  public:
    JacobianTensor(std::size_t n_samples, std::size_t n_outputs, std::size_t n_features);
    JacobianTensor(std::size_t n_samples, std::size_t n_outputs, std::size_t n_features,
                   std::vector<double> values);

    std::size_t n_samples() const { return n_samples_; }
    std::size_t n_outputs() const { return n_outputs_; }
    std::size_t n_features() const { return n_features_; }

    double at(std::size_t i, std::size_t k, std::size_t j) const {
        return values_[(i * n_outputs_ + k) * n_features_ + j];
    }
    double& at(std::size_t i, std::size_t k, std::size_t j) {
        return values_[(i * n_outputs_ + k) * n_features_ + j];
    }
    const std::vector<double>& values() const { return values_; }

    // Checks finiteness of every entry; constructors with data call this.
    void validate() const;

    // N x m slice for one variable, row i = gradient of all outputs at sample i.
    Matrix slice_for_variable(std::size_t j) const;

    // m = 1 convenience: wrap an N x n matrix of scalar-output derivatives.
    static JacobianTensor from_matrix(const Matrix& derivatives);

  private:
    std::size_t n_samples_;
    std::size_t n_outputs_;
    std::size_t n_features_;
    std::vector<double> values_;
};

// Perturbation/target norm orders, each in [1, inf].
struct NormPair {
    double p = 2.0;
    double q = 2.0;

    NormPair(double p_, double q_);
};

struct StandardizationParams {
    std::vector<double> mean;
    std::vector<double> stddev;  // sample convention, ddof = 1
    double target_min = 0.0;
    double target_max = 1.0;
    bool has_target_range = false;
};

// Centers every feature column to mean 0 and scales to sample std 1.
// Throws ConstantColumnError for zero-variance columns.
std::pair<Dataset, StandardizationParams> standardize(const Dataset& dataset);

// Undoes standardize() exactly (modulo rounding).
Dataset inverse_standardize(const Dataset& dataset, const StandardizationParams& params);

// Affine map of target onto [0, 1]; returns (rescaled, min, max).
std::tuple<std::vector<double>, double, double> rescale_target(
    const std::vector<double>& target);

}  // namespace alphasens
