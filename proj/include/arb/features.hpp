#pragma once

#include <vector>

#include "arb/prices.hpp"

namespace arb {

// Shape of one model input vector: the most recent `n_rtp_lags` real-time
// prices (newest first), optionally followed by the 24 day-ahead hourly
// prices of the operating day.
struct FeatureSpec {
    int n_rtp_lags = 36;
    bool use_dap = false;

    int length() const { return n_rtp_lags + (use_dap ? 24 : 0); }
};

// Per-component affine normalization (z-score). Components whose standard
// deviation is effectively zero get std 1 so they normalize to exactly 0.
struct Normalization {
    std::vector<double> mean;
    std::vector<double> std;

    void apply(std::vector<double>& x) const;
    void apply_batch(std::vector<std::vector<double>>& rows) const;
};

// Features for deciding period t. Uses only prices from periods t-1 and
// earlier plus the day-ahead prices for the day containing t, all of which
// are known before t starts. Requires t >= n_rtp_lags.
std::vector<double> build_features(const PriceSeries& prices, int t, const FeatureSpec& spec);

Normalization fit_normalization(const std::vector<std::vector<double>>& rows);

}  // namespace arb
