#include "alphasens/mlp.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "alphasens/errors.hpp"
#include "alphasens/rng.hpp"

namespace alphasens {

namespace {

using nlohmann::json;

double activate(Activation a, double z) {
    switch (a) {
        case Activation::kTanh: return std::tanh(z);
        case Activation::kSigmoid:
            return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                            : std::exp(z) / (1.0 + std::exp(z));
        case Activation::kSoftplus:
            return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    }
    return z;
}

double activate_derivative(Activation a, double z) {
    switch (a) {
        case Activation::kTanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::kSigmoid: {
            const double s = activate(Activation::kSigmoid, z);
            return s * (1.0 - s);
        }
        case Activation::kSoftplus: return activate(Activation::kSigmoid, z);
    }
    return 1.0;
}

// Pre-activations and activations for every layer of one input.
struct ForwardTrace {
    std::vector<std::vector<double>> pre;   // z_l, l = 0..L-1
    std::vector<std::vector<double>> post;  // a_0 = x, a_1..a_L
};

ForwardTrace forward_trace(const MlpModel& model, std::span<const double> x) {
    ForwardTrace trace;
    trace.post.emplace_back(x.begin(), x.end());
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        const std::size_t in = model.sizes[l];
        const std::size_t out = model.sizes[l + 1];
        const auto& w = model.weights[l];
        const auto& a = trace.post.back();
        std::vector<double> z(out);
        for (std::size_t r = 0; r < out; ++r) {
            double acc = model.biases[l][r];
            const double* wr = w.data() + r * in;
            for (std::size_t c = 0; c < in; ++c) acc += wr[c] * a[c];
            z[r] = acc;
        }
        std::vector<double> act(out);
        if (l + 1 == model.n_layers()) {
            act = z;  // identity output
        } else {
            for (std::size_t r = 0; r < out; ++r) act[r] = activate(model.activation, z[r]);
        }
        trace.pre.push_back(std::move(z));
        trace.post.push_back(std::move(act));
    }
    return trace;
}

}  // namespace

std::string to_string(Activation a) {
    switch (a) {
        case Activation::kTanh: return "tanh";
        case Activation::kSigmoid: return "sigmoid";
        case Activation::kSoftplus: return "softplus";
    }
    return "tanh";
}

Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::kTanh;
    if (s == "sigmoid") return Activation::kSigmoid;
    if (s == "softplus") return Activation::kSoftplus;
    throw Error("unknown activation '" + s + "'");
}

std::string to_string(Optimizer o) {
    return o == Optimizer::kSgd ? "sgd" : "adam";
}

Optimizer optimizer_from_string(const std::string& s) {
    if (s == "sgd") return Optimizer::kSgd;
    if (s == "adam") return Optimizer::kAdam;
    throw Error("unknown optimizer '" + s + "'");
}

void MlpModel::validate() const {
    if (sizes.size() < 2) throw Error("model needs at least input and output sizes");
    for (std::size_t s : sizes) {
        if (s == 0) throw Error("layer sizes must be positive");
    }
    if (weights.size() != n_layers() || biases.size() != n_layers()) {
        throw DimensionMismatchError("layer count vs parameter count");
    }
    for (std::size_t l = 0; l < n_layers(); ++l) {
        if (weights[l].size() != sizes[l + 1] * sizes[l]) {
            throw DimensionMismatchError("weights of layer " + std::to_string(l));
        }
        if (biases[l].size() != sizes[l + 1]) {
            throw DimensionMismatchError("biases of layer " + std::to_string(l));
        }
        for (double v : weights[l]) {
            if (!std::isfinite(v)) throw NonFiniteError("model weights");
        }
        for (double v : biases[l]) {
            if (!std::isfinite(v)) throw NonFiniteError("model biases");
        }
    }
}

MlpModel MlpModel::init(std::vector<std::size_t> sizes, Activation activation,
                        std::uint64_t seed) {
    MlpModel model;
    model.sizes = std::move(sizes);
    model.activation = activation;
    if (model.sizes.size() < 2) throw Error("model needs at least input and output sizes");
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < model.sizes.size(); ++l) {
        const std::size_t in = model.sizes[l];
        const std::size_t out = model.sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::vector<double> w(out * in);
        std::vector<double> b(out);
        for (double& v : w) v = rng.uniform(-bound, bound);
        for (double& v : b) v = rng.uniform(-bound, bound);
        model.weights.push_back(std::move(w));
        model.biases.push_back(std::move(b));
    }
    model.validate();
    return model;
}

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
    if (x.size() != model.n_inputs()) {
        throw DimensionMismatchError("forward input length " + std::to_string(x.size()) +
                                     " vs " + std::to_string(model.n_inputs()));
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw NonFiniteError("forward input");
    }
    return forward_trace(model, x).post.back();
}

namespace {

// Reusable buffers so the per-sample loop in dataset_jacobian does not touch
// the allocator; resize() is a no-op once the shapes settle.
struct JacobianScratch {
    std::vector<std::vector<double>> pre;  // hidden pre-activations, kept for slopes
    std::vector<double> act_a, act_b;      // rolling activation buffers
    Matrix jac, next;
};

// Leaves the result in scratch.jac (m x n).
void input_jacobian_into(const MlpModel& model, std::span<const double> x,
                         JacobianScratch& s) {
    const std::size_t n = model.n_inputs();
    const std::size_t layers = model.n_layers();

    // forward pass: keep every pre-activation, roll the activations
    s.pre.resize(layers);
    std::span<const double> input = x;
    std::vector<double>* cur = &s.act_a;
    std::vector<double>* alt = &s.act_b;
    for (std::size_t l = 0; l + 1 < layers; ++l) {
        const std::size_t in = model.sizes[l];
        const std::size_t out = model.sizes[l + 1];
        s.pre[l].resize(out);
        cur->resize(out);
        for (std::size_t r = 0; r < out; ++r) {
            double acc = model.biases[l][r];
            const double* wr = model.weights[l].data() + r * in;
            for (std::size_t c = 0; c < in; ++c) acc += wr[c] * input[c];
            s.pre[l][r] = acc;
            (*cur)[r] = activate(model.activation, acc);
        }
        input = *cur;
        std::swap(cur, alt);
    }

    // J starts as the first weight matrix and is pushed through every layer:
    // hidden layers scale rows by the activation slope, then J <- W_next * J.
    s.jac.rows = model.sizes[1];
    s.jac.cols = n;
    s.jac.data.assign(model.weights[0].begin(), model.weights[0].end());
    for (std::size_t l = 0; l + 1 < layers; ++l) {
        for (std::size_t r = 0; r < model.sizes[l + 1]; ++r) {
            const double slope = activate_derivative(model.activation, s.pre[l][r]);
            double* row = s.jac.data.data() + r * n;
            for (std::size_t c = 0; c < n; ++c) row[c] *= slope;
        }
        // J <- W_{l+1} * J
        const std::size_t in = model.sizes[l + 1];
        const std::size_t out = model.sizes[l + 2];
        s.next.rows = out;
        s.next.cols = n;
        s.next.data.assign(out * n, 0.0);
        for (std::size_t r = 0; r < out; ++r) {
            const double* wr = model.weights[l + 1].data() + r * in;
            double* dst = s.next.data.data() + r * n;
            for (std::size_t k = 0; k < in; ++k) {
                const double w = wr[k];
                if (w == 0.0) continue;
                const double* src = s.jac.data.data() + k * n;
                for (std::size_t c = 0; c < n; ++c) dst[c] += w * src[c];
            }
        }
        std::swap(s.jac, s.next);
    }
}

}  // namespace

Matrix input_jacobian(const MlpModel& model, std::span<const double> x) {
    if (x.size() != model.n_inputs()) {
        throw DimensionMismatchError("input_jacobian input length");
    }
    JacobianScratch scratch;
    input_jacobian_into(model, x, scratch);
    return scratch.jac;
}

JacobianTensor dataset_jacobian(const MlpModel& model, const Dataset& dataset) {
    if (dataset.n_features() != model.n_inputs()) {
        throw DimensionMismatchError("dataset width vs model inputs");
    }
    const std::size_t rows = dataset.n_samples();
    const std::size_t m = model.n_outputs();
    const std::size_t n = model.n_inputs();
    JacobianTensor jac(rows, m, n);
#pragma omp parallel
    {
        JacobianScratch scratch;
#pragma omp for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(rows); ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            input_jacobian_into(model, dataset.features().row(i), scratch);
            for (std::size_t k = 0; k < m; ++k) {
                for (std::size_t c = 0; c < n; ++c) jac.at(i, k, c) = scratch.jac(k, c);
            }
        }
    }
    jac.validate();
    return jac;
}

namespace {

double full_mse(const MlpModel& model, const Dataset& dataset) {
    const std::size_t rows = dataset.n_samples();
    double acc = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        const std::vector<double> y = forward(model, dataset.features().row(i));
        const double r = y[0] - dataset.target()[i];
        acc += r * r;
    }
    return acc / static_cast<double>(rows);
}

struct AdamState {
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::size_t step = 0;
};

}  // namespace

TrainResult train(const MlpModel& model, const Dataset& dataset, const TrainConfig& config) {
    if (!dataset.has_target()) throw MissingTargetError();
    if (model.n_outputs() != 1) {
        throw DimensionMismatchError("train expects a scalar-output model");
    }
    if (dataset.n_features() != model.n_inputs()) {
        throw DimensionMismatchError("dataset width vs model inputs");
    }
    if (config.epochs < 1 || config.batch_size < 1 || !(config.learning_rate >= 0.0)) {
        throw Error("invalid training configuration");
    }
    model.validate();

    MlpModel current = model;
    const std::size_t rows = dataset.n_samples();
    const std::size_t layers = current.n_layers();

    AdamState adam;
    if (config.optimizer == Optimizer::kAdam) {
        for (std::size_t l = 0; l < layers; ++l) {
            adam.m_w.emplace_back(current.weights[l].size(), 0.0);
            adam.v_w.emplace_back(current.weights[l].size(), 0.0);
            adam.m_b.emplace_back(current.biases[l].size(), 0.0);
            adam.v_b.emplace_back(current.biases[l].size(), 0.0);
        }
    }

    std::vector<double> trace;
    trace.reserve(config.epochs + 1);
    trace.push_back(full_mse(current, dataset));

    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(config.seed);

    std::vector<std::vector<double>> grad_w(layers), grad_b(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        grad_w[l].assign(current.weights[l].size(), 0.0);
        grad_b[l].assign(current.biases[l].size(), 0.0);
    }

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order.begin(), order.end());
        for (std::size_t start = 0; start < rows; start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, rows);
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            for (std::size_t l = 0; l < layers; ++l) {
                std::fill(grad_w[l].begin(), grad_w[l].end(), 0.0);
                std::fill(grad_b[l].begin(), grad_b[l].end(), 0.0);
            }

            for (std::size_t b = start; b < end; ++b) {
                const std::size_t i = order[b];
                const ForwardTrace tr = forward_trace(current, dataset.features().row(i));
                // d(mse)/d(yhat) for the scalar output
                std::vector<double> delta(1);
                delta[0] = 2.0 * (tr.post.back()[0] - dataset.target()[i]) * inv_batch;

                for (std::size_t l = layers; l-- > 0;) {
                    const std::size_t in = current.sizes[l];
                    const std::size_t out = current.sizes[l + 1];
                    const auto& a_prev = tr.post[l];
                    for (std::size_t r = 0; r < out; ++r) {
                        grad_b[l][r] += delta[r];
                        double* gw = grad_w[l].data() + r * in;
                        const double d = delta[r];
                        for (std::size_t c = 0; c < in; ++c) gw[c] += d * a_prev[c];
                    }
                    if (l == 0) break;
                    std::vector<double> next(in, 0.0);
                    for (std::size_t r = 0; r < out; ++r) {
                        const double d = delta[r];
                        const double* wr = current.weights[l].data() + r * in;
                        for (std::size_t c = 0; c < in; ++c) next[c] += d * wr[c];
                    }
                    for (std::size_t c = 0; c < in; ++c) {
                        next[c] *= activate_derivative(current.activation, tr.pre[l - 1][c]);
                    }
                    delta = std::move(next);
                }
            }

            if (config.optimizer == Optimizer::kSgd) {
                for (std::size_t l = 0; l < layers; ++l) {
                    for (std::size_t t = 0; t < grad_w[l].size(); ++t) {
                        current.weights[l][t] -= config.learning_rate * grad_w[l][t];
                    }
                    for (std::size_t t = 0; t < grad_b[l].size(); ++t) {
                        current.biases[l][t] -= config.learning_rate * grad_b[l][t];
                    }
                }
            } else {
                adam.step += 1;
                const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step));
                const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step));
                for (std::size_t l = 0; l < layers; ++l) {
                    auto update = [&](std::vector<double>& param, std::vector<double>& g,
                                      std::vector<double>& m, std::vector<double>& v) {
                        for (std::size_t t = 0; t < param.size(); ++t) {
                            m[t] = adam.beta1 * m[t] + (1.0 - adam.beta1) * g[t];
                            v[t] = adam.beta2 * v[t] + (1.0 - adam.beta2) * g[t] * g[t];
                            const double mhat = m[t] / bc1;
                            const double vhat = v[t] / bc2;
                            param[t] -=
                                config.learning_rate * mhat / (std::sqrt(vhat) + adam.eps);
                        }
                    };
                    update(current.weights[l], grad_w[l], adam.m_w[l], adam.v_w[l]);
                    update(current.biases[l], grad_b[l], adam.m_b[l], adam.v_b[l]);
                }
            }
        }

        const double mse = full_mse(current, dataset);
        if (!std::isfinite(mse)) throw DivergedTrainingError(epoch);
        trace.push_back(mse);
    }

    return {std::move(current), std::move(trace)};
}

std::string save_model(const MlpModel& model) {
    model.validate();
    json doc;
    doc["version"] = 1;
    doc["sizes"] = model.sizes;
    doc["activation"] = to_string(model.activation);
    doc["weights"] = model.weights;
    doc["biases"] = model.biases;
    return doc.dump(2) + "\n";
}

MlpModel load_model(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw SchemaError("(root)", e.what());
    }
    auto require = [&](const char* key) -> const json& {
        if (!doc.contains(key)) throw SchemaError(key, "missing field");
        return doc.at(key);
    };
    if (!require("version").is_number_integer() || doc["version"].get<int>() != 1) {
        throw SchemaError("version", "expected 1");
    }
    MlpModel model;
    try {
        model.sizes = require("sizes").get<std::vector<std::size_t>>();
    } catch (const json::exception& e) {
        throw SchemaError("sizes", e.what());
    }
    try {
        model.activation = activation_from_string(require("activation").get<std::string>());
    } catch (const json::exception& e) {
        throw SchemaError("activation", e.what());
    }
    try {
        model.weights = require("weights").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw SchemaError("weights", e.what());
    }
    try {
        model.biases = require("biases").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw SchemaError("biases", e.what());
    }
    try {
        model.validate();
    } catch (const Error& e) {
        throw SchemaError("(model)", e.what());
    }
    return model;
}

void save_model_file(const MlpModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << save_model(model);
}

MlpModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_model(ss.str());
}

}  // namespace alphasens
