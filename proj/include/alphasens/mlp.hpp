#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alphasens/dataset.hpp"

namespace alphasens {

// Smooth hidden activations only: the closed-form sensitivity results assume
// a C^2 model, so kinked activations are not offered.
enum class Activation { kTanh, kSigmoid, kSoftplus };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// Feedforward network sizes[0] -> ... -> sizes.back() with one shared hidden
// activation and identity output.
struct MlpModel {
    std::vector<std::size_t> sizes;
    Activation activation = Activation::kTanh;
    // weights[l]: row-major (sizes[l+1] x sizes[l]); biases[l]: sizes[l+1].
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    std::size_t n_inputs() const { return sizes.front(); }
    std::size_t n_outputs() const { return sizes.back(); }
    std::size_t n_layers() const { return sizes.size() - 1; }

    void validate() const;

    // Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)], seeded.
    static MlpModel init(std::vector<std::size_t> sizes, Activation activation,
                         std::uint64_t seed);
};

enum class Optimizer { kSgd, kAdam };

std::string to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string& s);

struct TrainConfig {
    std::size_t epochs = 40;
    std::size_t batch_size = 64;
    double learning_rate = 1e-2;
    Optimizer optimizer = Optimizer::kAdam;
    std::uint64_t seed = 1;
};

struct TrainResult {
    MlpModel model;
    std::vector<double> loss_trace;  // full-dataset MSE; entry 0 = before training
};

std::vector<double> forward(const MlpModel& model, std::span<const double> x);

// Exact m x n input Jacobian by chain rule through every layer.
Matrix input_jacobian(const MlpModel& model, std::span<const double> x);

// input_jacobian applied to every dataset row; parallel over samples.
JacobianTensor dataset_jacobian(const MlpModel& model, const Dataset& dataset);

// Mini-batch MSE training (single-threaded, deterministic for a fixed seed).
// Expects standardized features and a target rescaled to [0, 1].
TrainResult train(const MlpModel& model, const Dataset& dataset, const TrainConfig& config);

// Versioned JSON document, weights row-major per layer. Round-trips are
// bit-exact for the parameters.
std::string save_model(const MlpModel& model);
MlpModel load_model(const std::string& document);

void save_model_file(const MlpModel& model, const std::string& path);
MlpModel load_model_file(const std::string& path);

}  // namespace alphasens
