#include "arb/features.hpp"

#include <cmath>

#include "arb/errors.hpp"

namespace arb {

std::vector<double> build_features(const PriceSeries& prices, int t, const FeatureSpec& spec) {
    if (spec.n_rtp_lags < 1) throw ConfigError("feature spec needs at least one price lag");
    if (t < spec.n_rtp_lags || t >= prices.num_periods())
        throw InputError("build_features: period lacks a full look-back window");
    std::vector<double> x;
    x.reserve(static_cast<size_t>(spec.length()));
    for (int lag = 1; lag <= spec.n_rtp_lags; ++lag) x.push_back(prices.rtp[t - lag]);
    if (spec.use_dap) {
        const std::array<double, 24>& day = prices.dap_for(t);
        x.insert(x.end(), day.begin(), day.end());
    }
    return x;
}

Normalization fit_normalization(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) throw InputError("fit_normalization: need at least two rows");
    const size_t dim = rows.front().size();
    Normalization norm;
    norm.mean.assign(dim, 0.0);
    norm.std.assign(dim, 0.0);
    for (const auto& row : rows) {
        if (row.size() != dim) throw InputError("fit_normalization: ragged rows");
        for (size_t j = 0; j < dim; ++j) norm.mean[j] += row[j];
    }
    const double n = static_cast<double>(rows.size());
    for (size_t j = 0; j < dim; ++j) norm.mean[j] /= n;
    for (const auto& row : rows)
        for (size_t j = 0; j < dim; ++j) {
            const double d = row[j] - norm.mean[j];
            norm.std[j] += d * d;
        }
    for (size_t j = 0; j < dim; ++j) {
        norm.std[j] = std::sqrt(norm.std[j] / n);
        if (norm.std[j] < 1e-12) norm.std[j] = 1.0;  // constant column -> normalized 0
    }
    return norm;
}

void Normalization::apply(std::vector<double>& x) const {
    if (x.size() != mean.size()) throw InputError("normalization size mismatch");
    for (size_t j = 0; j < x.size(); ++j) x[j] = (x[j] - mean[j]) / std[j];
}

void Normalization::apply_batch(std::vector<std::vector<double>>& rows) const {
    for (auto& row : rows) apply(row);
}

}  // namespace arb
