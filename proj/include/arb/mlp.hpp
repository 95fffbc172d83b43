#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arb/features.hpp"

namespace arb {

// Fully connected network with ReLU hidden layers and a linear output layer.
// The network itself maps normalized inputs to normalized outputs; the stored
// normalizations make forward() a raw-prices-in, dollars-per-MWh-out map.
struct MlpModel {
    std::vector<int> dims;                     // layer sizes, input first
    std::vector<std::vector<double>> weights;  // layer l: dims[l+1] x dims[l], row-major
    std::vector<std::vector<double>> biases;   // layer l: dims[l+1]
    FeatureSpec feature_spec;
    Normalization norm_x;
    Normalization norm_y;
    std::uint64_t seed = 0;  // seed the weights were initialized from

    int num_layers() const { return static_cast<int>(dims.size()) - 1; }
    int output_size() const { return dims.back(); }

    // He-uniform weights (bound sqrt(6/fan_in)), zero biases, deterministic in seed.
    void init(const std::vector<int>& layer_dims, std::uint64_t seed);

    // Normalized input -> normalized output.
    std::vector<double> net_forward(const std::vector<double>& xn) const;

    // Raw feature vector -> marginal values in $/MWh.
    std::vector<double> forward(const std::vector<double>& x_raw) const;
};

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static Gradients like(const MlpModel& model);
    void zero();
};

struct AdamState {
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
    long step = 0;

    static AdamState like(const MlpModel& model);
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Mean over the batch of the per-sample mean squared error, plus its gradient
// with respect to every weight and bias. X and Y hold normalized rows; idx
// selects the batch.
double loss_and_grad(const MlpModel& model, const std::vector<std::vector<double>>& X,
                     const std::vector<std::vector<double>>& Y, const int* idx, int count,
                     Gradients& out);

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state, const AdamConfig& cfg);

void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace arb
