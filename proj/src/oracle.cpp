#include "alphasens/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "alphasens/errors.hpp"
#include "alphasens/rng.hpp"

namespace alphasens {

namespace {

double lp_norm(std::span<const double> v, double p) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    if (p == kInf || m == 0.0) return m;
    double s = 0.0;
    for (double x : v) {
        const double r = std::abs(x) / m;
        if (r > 0.0) s += std::pow(r, p);
    }
    return m * std::pow(s, 1.0 / p);
}

// Objective for the block-diagonal operator, nonnegative h:
//   q finite: F(h) = (sum_i c_i h_i^q)^(1/q),  c_i = sum_k |g_ik|^q
//   q = inf:  F(h) = max_i r_i h_i,            r_i = max_k |g_ik|
struct BlockObjective {
    std::vector<double> coeff;  // c_i (q finite) or r_i (q = inf)
    double q;

    double value(std::span<const double> h) const {
        if (q == kInf) {
            double best = 0.0;
            for (std::size_t i = 0; i < h.size(); ++i) {
                best = std::max(best, coeff[i] * std::abs(h[i]));
            }
            return best;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h[i] > 0.0 && coeff[i] > 0.0) s += coeff[i] * std::pow(h[i], q);
        }
        return s > 0.0 ? std::pow(s, 1.0 / q) : 0.0;
    }

    // Ascent direction at h (h > 0 componentwise after the kink bump).
    void gradient(std::span<const double> h, double f_value,
                  std::vector<double>& grad) const {
        if (q == kInf) {
            std::fill(grad.begin(), grad.end(), 0.0);
            std::size_t best = 0;
            double best_v = -1.0;
            for (std::size_t i = 0; i < h.size(); ++i) {
                const double v = coeff[i] * h[i];
                if (v > best_v) {
                    best_v = v;
                    best = i;
                }
            }
            grad[best] = coeff[best];
            return;
        }
        const double scale = f_value > 0.0 ? std::pow(f_value, 1.0 - q) : 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            grad[i] = scale * coeff[i] * std::pow(h[i], q - 1.0);
        }
    }
};

// Clamp to the nonnegative orthant, nudge exact zeros off the kink, and
// project back onto the unit Lp sphere. For finite p the projection is
// radial; for p = inf the box clamp keeps saturated coordinates at 1 so the
// rest can keep climbing toward the all-ones corner.
void project(std::vector<double>& h, double p) {
    for (double& v : h) {
        if (v < 1e-9) v = 1e-9;
        if (p == kInf && v > 1.0) v = 1.0;
    }
    const double norm = lp_norm(h, p);
    for (double& v : h) v /= norm;
}

}  // namespace

OperatorNormEstimate brute_force_operator_norm(const Matrix& jac_slice, const NormPair& norms,
                                               std::size_t restarts, std::size_t iters,
                                               std::uint64_t seed) {
    const std::size_t n = jac_slice.rows;
    const std::size_t m = jac_slice.cols;
    if (n == 0 || m == 0) throw EmptyInputError("brute_force_operator_norm");
    if (n > kOracleMaxSamples) throw TooLargeError(n, kOracleMaxSamples);
    if (restarts == 0 || iters == 0) throw Error("restarts and iters must be >= 1");

    BlockObjective obj;
    obj.q = norms.q;
    obj.coeff.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (norms.q == kInf) {
            for (std::size_t k = 0; k < m; ++k) {
                obj.coeff[i] = std::max(obj.coeff[i], std::abs(jac_slice(i, k)));
            }
        } else {
            double row_max = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                row_max = std::max(row_max, std::abs(jac_slice(i, k)));
            }
            if (row_max == 0.0) continue;
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double r = std::abs(jac_slice(i, k)) / row_max;
                if (r > 0.0) s += std::pow(r, norms.q);
            }
            obj.coeff[i] = std::pow(row_max, norms.q) * s;
        }
    }
    if (std::all_of(obj.coeff.begin(), obj.coeff.end(), [](double c) { return c == 0.0; })) {
        std::vector<double> h(n, 0.0);
        h[0] = 1.0;
        return {0.0, std::move(h)};
    }

    struct Candidate {
        double value = -1.0;
        std::size_t restart = 0;
        std::vector<double> h;
    };
    std::vector<Candidate> results(restarts);

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(restarts); ++rr) {
        const std::size_t r = static_cast<std::size_t>(rr);
        Rng rng(mix_seed(seed, r));
        std::vector<double> h(n, 0.0);
        if (r < n) {
            h[r] = 1.0;  // one-hot starts cover every vertex of the feasible hull
        } else {
            for (double& v : h) v = std::abs(rng.normal());
        }
        project(h, norms.p);

        Candidate best;
        best.restart = r;
        best.h = h;
        best.value = obj.value(h);

        // Ascent with a backtracking step: accepted moves grow the step,
        // rejected ones shrink it. For finite p the step follows the
        // gradient component tangent to the Lp sphere (normal h_i^(p-1));
        // stepping along the raw gradient stalls wherever it is merely
        // radial, which is KKT-stationary only for p = 2. For p = inf the
        // box clamp in project() does the geometry instead.
        std::vector<double> grad(n, 0.0), step(n), candidate(n);
        double f = best.value;
        double eta = 0.25;
        for (std::size_t t = 0; t < iters; ++t) {
            obj.gradient(h, f, grad);
            if (norms.p != kInf) {
                double gn = 0.0, nn = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double normal = std::pow(h[i], norms.p - 1.0);
                    gn += grad[i] * normal;
                    nn += normal * normal;
                }
                const double scale = nn > 0.0 ? gn / nn : 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    step[i] = grad[i] - scale * std::pow(h[i], norms.p - 1.0);
                }
            } else {
                step = grad;
            }
            double snorm = 0.0;
            for (double s : step) snorm += s * s;
            snorm = std::sqrt(snorm);
            if (snorm < 1e-15 || eta < 1e-14) break;
            for (std::size_t i = 0; i < n; ++i) {
                candidate[i] = h[i] + eta * step[i] / snorm;
            }
            project(candidate, norms.p);
            const double f_new = obj.value(candidate);
            if (f_new > f) {
                h = candidate;
                f = f_new;
                eta = std::min(eta * 1.3, 1.0);
                if (f > best.value) {
                    best.value = f;
                    best.h = h;
                }
            } else {
                eta *= 0.5;
            }
        }
        results[r] = std::move(best);
    }

    // Deterministic reduce: best value, ties broken by lowest restart index.
    const Candidate* winner = &results[0];
    for (const Candidate& c : results) {
        if (c.value > winner->value) winner = &c;
    }
    return {winner->value, winner->h};
}

namespace {

double total_variation(const VectorFunction& f, const Dataset& dataset,
                       const std::vector<std::vector<double>>& base, std::size_t variable,
                       std::span<const double> perturbation, double q) {
    const std::size_t n = dataset.n_samples();
    std::vector<double> diffs;
    diffs.reserve(n * f.n_outputs);
    std::vector<double> x(dataset.n_features());
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = dataset.features().row(i);
        std::copy(row.begin(), row.end(), x.begin());
        x[variable] += perturbation[i];
        const std::vector<double> y = f.eval(x);
        if (y.size() != f.n_outputs) {
            throw DimensionMismatchError("VectorFunction output length");
        }
        for (std::size_t k = 0; k < y.size(); ++k) {
            const double d = y[k] - base[i][k];
            if (!std::isfinite(d)) throw NonFiniteError("empirical_sensitivity_limit");
            diffs.push_back(d);
        }
    }
    return lp_norm(diffs, q);
}

}  // namespace

std::vector<std::pair<double, double>> empirical_sensitivity_limit(
    const VectorFunction& f, const Dataset& dataset, std::size_t variable,
    const NormPair& norms, const std::vector<double>& epsilons, std::size_t probes,
    std::uint64_t seed) {
    if (variable >= dataset.n_features()) {
        throw IndexOutOfRangeError("variable " + std::to_string(variable));
    }
    if (epsilons.empty()) throw EmptyInputError("epsilons");
    if (probes == 0) throw Error("probes must be >= 1");
    for (std::size_t t = 0; t < epsilons.size(); ++t) {
        const bool ordered = t + 1 == epsilons.size() || epsilons[t] > epsilons[t + 1];
        if (!(epsilons[t] > 0.0) || !ordered) {
            throw Error("epsilons must be positive and decreasing");
        }
    }

    const std::size_t n = dataset.n_samples();
    std::vector<std::vector<double>> base(n);
    for (std::size_t i = 0; i < n; ++i) {
        base[i] = f.eval(dataset.features().row(i));
        for (double v : base[i]) {
            if (!std::isfinite(v)) throw NonFiniteError("function value");
        }
    }

    std::vector<std::pair<double, double>> out;
    out.reserve(epsilons.size());

    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        const double eps = epsilons[e];
        Rng rng(mix_seed(seed, e));

        auto ratio_of = [&](std::span<const double> direction) {
            std::vector<double> h(direction.begin(), direction.end());
            const double norm = lp_norm(h, norms.p);
            for (double& v : h) v *= eps / norm;
            return total_variation(f, dataset, base, variable, h, norms.q) / eps;
        };

        double best = 0.0;
        std::vector<double> best_dir(n, 0.0);

        // Signed one-hot probes first, then random directions.
        std::vector<double> dir(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (double sign : {1.0, -1.0}) {
                std::fill(dir.begin(), dir.end(), 0.0);
                dir[i] = sign;
                const double r = ratio_of(dir);
                if (r > best) {
                    best = r;
                    best_dir = dir;
                }
            }
        }
        for (std::size_t t = 0; t < probes; ++t) {
            for (double& v : dir) v = rng.normal();
            const double r = ratio_of(dir);
            if (r > best) {
                best = r;
                best_dir = dir;
            }
        }

        // Local refinement around the best sampled direction with a shrinking
        // proposal radius; keeps only improvements.
        double radius = 0.5;
        std::vector<double> proposal(n);
        for (std::size_t t = 0; t < 200; ++t) {
            for (std::size_t i = 0; i < n; ++i) {
                proposal[i] = best_dir[i] + radius * rng.normal();
            }
            const double r = ratio_of(proposal);
            if (r > best) {
                best = r;
                best_dir = proposal;
            } else {
                radius *= 0.97;
            }
        }

        out.emplace_back(eps, best);
    }
    return out;
}

Matrix finite_diff_jacobian(const VectorFunction& f, std::span<const double> x, double step) {
    if (!(step > 0.0)) throw Error("step must be positive");
    if (x.size() != f.n_inputs) throw DimensionMismatchError("finite_diff_jacobian input");
    Matrix jac(f.n_outputs, f.n_inputs);
    std::vector<double> xp(x.begin(), x.end());
    for (std::size_t j = 0; j < f.n_inputs; ++j) {
        const double saved = xp[j];
        xp[j] = saved + step;
        const std::vector<double> plus = f.eval(xp);
        xp[j] = saved - step;
        const std::vector<double> minus = f.eval(xp);
        xp[j] = saved;
        if (plus.size() != f.n_outputs || minus.size() != f.n_outputs) {
            throw DimensionMismatchError("VectorFunction output length");
        }
        for (std::size_t k = 0; k < f.n_outputs; ++k) {
            const double d = (plus[k] - minus[k]) / (2.0 * step);
            if (!std::isfinite(d)) throw NonFiniteError("finite_diff_jacobian");
            jac(k, j) = d;
        }
    }
    return jac;
}

}  // namespace alphasens
