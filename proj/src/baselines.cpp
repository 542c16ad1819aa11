#include "alphasens/baselines.hpp"

#include <cmath>
#include <numeric>

#include "alphasens/errors.hpp"
#include "alphasens/rng.hpp"

namespace alphasens {

std::string to_string(ErrorMetric m) {
    return m == ErrorMetric::kMse ? "mse" : "mae";
}

ErrorMetric error_metric_from_string(const std::string& s) {
    if (s == "mse") return ErrorMetric::kMse;
    if (s == "mae") return ErrorMetric::kMae;
    throw Error("unknown error metric '" + s + "'");
}

namespace {

double score(ErrorMetric metric, const std::vector<double>& pred,
             const std::vector<double>& target) {
    if (pred.size() != target.size()) {
        throw DimensionMismatchError("predictions vs target length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!std::isfinite(pred[i])) throw NonFiniteError("predictions");
        const double d = pred[i] - target[i];
        acc += metric == ErrorMetric::kMse ? d * d : std::abs(d);
    }
    return acc / static_cast<double>(pred.size());
}

}  // namespace

PermutationResult permutation_importance(const Predictor& predict, const Dataset& dataset,
                                         const std::vector<double>& target,
                                         ErrorMetric metric, std::size_t repeats,
                                         std::uint64_t seed) {
    if (target.empty()) throw MissingTargetError();
    if (target.size() != dataset.n_samples()) {
        throw DimensionMismatchError("target length vs dataset rows");
    }
    if (repeats == 0) throw Error("repeats must be >= 1");

    const std::size_t n = dataset.n_features();
    const std::size_t rows = dataset.n_samples();

    PermutationResult result;
    result.seed = seed;
    result.metric_name = to_string(metric);
    result.baseline_error = score(metric, predict(dataset.features()), target);
    result.per_repeat.assign(n, std::vector<double>(repeats, 0.0));

#pragma omp parallel for collapse(2) schedule(dynamic)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(n); ++jj) {
        for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(repeats); ++rr) {
            const std::size_t j = static_cast<std::size_t>(jj);
            const std::size_t r = static_cast<std::size_t>(rr);
            Rng rng(mix_seed(seed, j, r));

            std::vector<std::size_t> perm(rows);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            rng.shuffle(perm.begin(), perm.end());

            Matrix shuffled = dataset.features();
            for (std::size_t i = 0; i < rows; ++i) {
                shuffled(i, j) = dataset.feature(perm[i], j);
            }
            const double err = score(metric, predict(shuffled), target);
            result.per_repeat[j][r] = err - result.baseline_error;
        }
    }

    result.importance.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (double v : result.per_repeat[j]) acc += v;
        result.importance[j] = acc / static_cast<double>(repeats);
    }
    return result;
}

}  // namespace alphasens
