#include "arb/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>

#include "arb/controller.hpp"
#include "arb/errors.hpp"

namespace arb {

TrainConfig TrainConfig::resolved() const {
    TrainConfig r = *this;
    switch (setting) {
        case 0:
            break;
        case 1: r.n_rtp_lags = 36;  r.n_dap = 0;  r.hidden = 60;  r.epochs = 10; break;
        case 2: r.n_rtp_lags = 288; r.n_dap = 0;  r.hidden = 256; r.epochs = 20; break;
        case 3: r.n_rtp_lags = 36;  r.n_dap = 24; r.hidden = 60;  r.epochs = 10; break;
        case 4: r.n_rtp_lags = 288; r.n_dap = 24; r.hidden = 256; r.epochs = 20; break;
        default:
            throw ConfigError("train config: setting must be 0 (explicit) or 1-4");
    }
    if (r.n_rtp_lags < 1) throw ConfigError("train config: need at least one price lag");
    if (r.n_dap != 0 && r.n_dap != 24)
        throw ConfigError("train config: day-ahead input count must be 0 or 24");
    if (r.hidden < 1) throw ConfigError("train config: hidden width must be positive");
    if (r.epochs < 1) throw ConfigError("train config: epochs must be positive");
    if (r.n_seeds < 1) throw ConfigError("train config: need at least one seed");
    if (r.label_segments < 1) throw ConfigError("train config: label segments must be positive");
    if (r.batch_size < 1) throw ConfigError("train config: batch size must be positive");
    r.params.validate();
    return r;
}

std::vector<int> TrainConfig::layer_dims() const {
    return {feature_spec().length(), hidden, hidden, label_segments};
}

Dataset build_dataset(const PriceSeries& prices, const ValueFunctionSeries& series,
                      const FeatureSpec& spec, int k_target) {
    const int t_max = prices.num_periods();
    if (series.horizon() != t_max)
        throw InputError("build_dataset: value series horizon differs from price series");
    if (k_target < 1) throw InputError("build_dataset: label segment count must be positive");
    if (t_max <= spec.n_rtp_lags)
        throw InputError("build_dataset: price series shorter than the look-back window");

    Dataset data;
    data.spec = spec;
    data.prices = prices;
    data.first_period = spec.n_rtp_lags;
    const int n = t_max - spec.n_rtp_lags;
    data.X.reserve(static_cast<size_t>(n));
    data.Y.reserve(static_cast<size_t>(n));
    for (int t = spec.n_rtp_lags; t < t_max; ++t) {
        data.X.push_back(build_features(prices, t, spec));
        data.Y.push_back(series.curves[static_cast<size_t>(t) + 1].downsample(k_target)
                             .segment_values);
    }
    data.norm_x = fit_normalization(data.X);
    data.norm_y = fit_normalization(data.Y);
    data.norm_x.apply_batch(data.X);
    data.norm_y.apply_batch(data.Y);
    return data;
}

TrainResult train_one(const TrainConfig& raw_cfg, const Dataset& data, std::uint64_t seed) {
    const TrainConfig cfg = raw_cfg.resolved();
    if (data.size() == 0) throw InputError("train_one: empty dataset");
    if (data.spec.n_rtp_lags != cfg.n_rtp_lags || data.spec.use_dap != (cfg.n_dap > 0))
        throw ConfigError("train_one: dataset features differ from the train config");
    if (static_cast<int>(data.Y.front().size()) != cfg.label_segments)
        throw ConfigError("train_one: dataset label size differs from the train config");

    TrainResult result;
    MlpModel& model = result.model;
    model.init(cfg.layer_dims(), seed);
    model.feature_spec = data.spec;
    model.norm_x = data.norm_x;
    model.norm_y = data.norm_y;

    const int n = data.size();
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(seed ^ 0x9e3779b97f4a7c15ULL);

    Gradients grads = Gradients::like(model);
    AdamState adam = AdamState::like(model);
    result.epoch_losses.reserve(static_cast<size_t>(cfg.epochs));
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(shuffle_rng() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
        }
        double epoch_loss = 0.0;
        for (int begin = 0; begin < n; begin += cfg.batch_size) {
            const int count = std::min(cfg.batch_size, n - begin);
            double batch_loss;
            try {
                batch_loss = loss_and_grad(model, data.X, data.Y,
                                           order.data() + begin, count, grads);
            } catch (const NumericError&) {
                throw NumericError("train_one: loss diverged in epoch " +
                                   std::to_string(epoch));
            }
            adam_step(model, grads, adam, cfg.adam);
            epoch_loss += batch_loss * count;
        }
        epoch_loss /= n;
        if (!std::isfinite(epoch_loss))
            throw NumericError("train_one: loss diverged in epoch " + std::to_string(epoch));
        result.epoch_losses.push_back(epoch_loss);
    }

    result.training_profit = run_backtest(data.prices, cfg.params, model, 0.0).profit;
    return result;
}

SelectionResult train_select(const TrainConfig& raw_cfg, const Dataset& data) {
    const TrainConfig cfg = raw_cfg.resolved();
    SelectionResult sel;
    bool have_best = false;
    for (int s = 0; s < cfg.n_seeds; ++s) {
        const auto seed = static_cast<std::uint64_t>(s);
        SeedSummary summary;
        summary.seed = seed;
        try {
            TrainResult r = train_one(cfg, data, seed);
            summary.training_profit = r.training_profit;
            summary.epoch_losses = r.epoch_losses;
            if (!have_best || r.training_profit > sel.best.training_profit) {
                sel.best = std::move(r);
                sel.best_seed = seed;
                have_best = true;
            }
        } catch (const NumericError& e) {
            summary.diverged = true;
            std::cerr << "warning: seed " << s << " skipped: " << e.what() << '\n';
        }
        sel.seeds.push_back(std::move(summary));
    }
    if (!have_best) throw NumericError("train_select: every seed diverged");
    return sel;
}

void save_seed_log(const SelectionResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "seed,epoch,loss,training_profit\n";
    char buf[96];
    for (const auto& s : result.seeds) {
        const size_t n = s.epoch_losses.size();
        for (size_t e = 0; e < n; ++e) {
            out << s.seed << ',' << (e + 1) << ',';
            std::snprintf(buf, sizeof buf, "%.17g", s.epoch_losses[e]);
            out << buf << ',';
            if (e + 1 == n && !s.diverged) {
                std::snprintf(buf, sizeof buf, "%.17g", s.training_profit);
                out << buf;
            }
            out << '\n';
        }
        if (s.diverged) out << s.seed << ',' << (n + 1) << ",diverged,\n";
    }
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace arb
