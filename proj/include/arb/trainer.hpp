#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arb/mlp.hpp"
#include "arb/prices.hpp"
#include "arb/storage.hpp"
#include "arb/value_curve.hpp"

namespace arb {

// Training hyperparameters. Settings 1-4 are preset rows
// (lags, day-ahead inputs, hidden width, epochs):
//   1: (36, 0, 60, 10)    2: (288, 0, 256, 20)
//   3: (36, 24, 60, 10)   4: (288, 24, 256, 20)
// setting 0 keeps the explicit fields as given.
struct TrainConfig {
    int setting = 0;
    int n_rtp_lags = 36;
    int n_dap = 0;  // 0 or 24
    int hidden = 60;
    int epochs = 10;
    int n_seeds = 10;
    int label_segments = 50;
    int batch_size = 512;
    StorageParams params;
    AdamConfig adam;

    TrainConfig resolved() const;  // applies the preset row and validates
    FeatureSpec feature_spec() const { return {n_rtp_lags, n_dap > 0}; }
    std::vector<int> layer_dims() const;
};

// Supervised pairs plus everything train_one needs: normalization stats and
// the training price window for the post-training profit backtest.
struct Dataset {
    FeatureSpec spec;
    std::vector<std::vector<double>> X;  // normalized features
    std::vector<std::vector<double>> Y;  // normalized labels
    Normalization norm_x;
    Normalization norm_y;
    PriceSeries prices;
    int first_period = 0;  // period index of sample 0

    int size() const { return static_cast<int>(X.size()); }
};

// One sample per period with a full look-back window; the label for period t
// is the end-of-period-t marginal value curve down-sampled to k_target
// segments.
Dataset build_dataset(const PriceSeries& prices, const ValueFunctionSeries& series,
                      const FeatureSpec& spec, int k_target = 50);

struct TrainResult {
    MlpModel model;
    double training_profit = 0.0;
    std::vector<double> epoch_losses;
};

struct SeedSummary {
    std::uint64_t seed = 0;
    bool diverged = false;
    double training_profit = 0.0;
    std::vector<double> epoch_losses;
};

struct SelectionResult {
    TrainResult best;
    std::uint64_t best_seed = 0;
    std::vector<SeedSummary> seeds;
};

// Configured epochs of mini-batch Adam on the normalized MSE, then a
// training-window backtest from an empty store to score the model.
TrainResult train_one(const TrainConfig& cfg, const Dataset& data, std::uint64_t seed);

// Trains seeds 0..n_seeds-1 and keeps the model with the highest training
// profit; ties go to the lower seed. Diverging seeds are skipped with a
// warning; if every seed diverges this throws.
SelectionResult train_select(const TrainConfig& cfg, const Dataset& data);

// Delimited per-seed log: one row per epoch with the loss, the training
// profit filled in on each seed's final row.
void save_seed_log(const SelectionResult& result, const std::string& path);

}  // namespace arb
