// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. argv[1] is the command-line binary, used for the end-to-end
// determinism criterion.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arb/controller.hpp"
#include "arb/dp.hpp"
#include "arb/mlp.hpp"
#include "arb/prices.hpp"
#include "arb/storage.hpp"
#include "arb/trainer.hpp"
#include "arb/value_curve.hpp"
#include "test_util.hpp"

namespace {

using namespace arb;
using testutil::make_grid_instance;
using testutil::make_rtp_series;
using testutil::random_params;
using testutil::random_rtp_series;
using testutil::uniform;

struct Criterion {
    bool pass = false;
    std::string text = "not run";
};

std::vector<DispatchRecord> g_records;  // every dispatch log produced below

void collect(const ControlState& st) {
    g_records.insert(g_records.end(), st.log.begin(), st.log.end());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, format);
    vsnprintf(buf, sizeof buf, format, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Dispatching against the true backward-recursion curves reproduces the
//    tabular-DP optimal profit on random instances.
Criterion criterion1() {
    std::mt19937_64 rng(20260825u);
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    const int n_instances = 100;
    for (int rep = 0; rep < n_instances; ++rep) {
        const int segments = 40 + static_cast<int>(rng() % 141);
        const auto gi = make_grid_instance(rng, segments);
        const int horizon = rep < 94 ? 20 + static_cast<int>(rng() % 381)
                                     : 1000 + static_cast<int>(rng() % 1001);
        const PriceSeries prices = random_rtp_series(rng, horizon, -25.0, 130.0);
        const ValueFunctionSeries curves = generate_series(prices, gi.params, gi.segments);
        const ControlState run = run_backtest(prices, gi.params, curves, gi.e0);
        collect(run);
        const OracleResult oracle =
            oracle_dp(prices, gi.params, gi.segments + 1, gi.oracle_actions(), gi.e0);
        double max_abs_price = 0.0;
        for (double p : prices.rtp) max_abs_price = std::max(max_abs_price, std::fabs(p));
        const double band =
            std::max(1e-6 * std::fabs(oracle.optimal_profit),
                     gi.params.energy_mwh / gi.segments * max_abs_price);
        const double diff = std::fabs(run.profit - oracle.optimal_profit);
        worst = std::max(worst, diff);
        if (diff > band)
            return {false, fmt("instance %d: dispatch profit %.6f vs oracle %.6f "
                               "(band %.3g)",
                               rep, run.profit, oracle.optimal_profit, band)};
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 60.0)
        return {false, fmt("runtime %.1f s exceeds the 60 s budget", elapsed)};
    return {true, fmt("dispatch with true curves matches the tabular-DP optimum on %d "
                      "random instances (worst |diff| %.2e, %.1f s)",
                      n_instances, worst, elapsed)};
}

// ---------------------------------------------------------------------------
// 2. The analytic backward recursion matches brute-force tabular DP value
//    functions on a 1001-point SoC grid.
Criterion criterion2() {
    std::mt19937_64 rng(777u);
    double worst_generic = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        StorageParams params = random_params(rng);
        params.power_mw = uniform(rng, 0.05, 0.4) * params.energy_mwh;
        const int horizon = 5 + static_cast<int>(rng() % 46);
        const PriceSeries prices = random_rtp_series(rng, horizon, -20.0, 120.0);
        const ValueFunctionSeries analytic = generate_series(prices, params, 1000);
        const OracleResult oracle = oracle_dp(prices, params, 1001, 401);
        const double w = params.energy_mwh / 1000.0;
        for (int t = 0; t <= horizon; ++t) {
            // Integrated values from empty on the shared 1001-point grid.
            double va = 0.0, vo = 0.0, sup = 0.0, scale = 1.0;
            for (int i = 0; i < 1000; ++i) {
                va += w * analytic.curves[t].segment_values[i];
                vo += w * oracle.series.curves[t].segment_values[i];
                sup = std::max(sup, std::fabs(va - vo));
                scale = std::max(scale, std::fabs(vo));
            }
            worst_generic = std::max(worst_generic, sup / scale);
            if (sup > 0.01 * scale)
                return {false, fmt("generic instance %d, t=%d: value gap %.4f on scale "
                                   "%.2f exceeds 1%%",
                                   rep, t, sup, scale)};
        }
    }
    double worst_aligned = 0.0;
    for (int rep = 0; rep < 6; ++rep) {
        const auto gi = make_grid_instance(rng, 1000);
        const int horizon = 5 + static_cast<int>(rng() % 46);
        const PriceSeries prices = random_rtp_series(rng, horizon, -20.0, 120.0);
        const ValueFunctionSeries analytic = generate_series(prices, gi.params, 1000);
        const OracleResult oracle =
            oracle_dp(prices, gi.params, 1001, gi.oracle_actions());
        for (int t = 0; t <= horizon; ++t)
            for (int i = 0; i < 1000; ++i) {
                const double a = analytic.curves[t].segment_values[i];
                const double o = oracle.series.curves[t].segment_values[i];
                const double gap = std::fabs(a - o) / std::max(1.0, std::fabs(o));
                worst_aligned = std::max(worst_aligned, gap);
                if (gap > 1e-6)
                    return {false, fmt("aligned instance %d, t=%d, seg %d: marginal %.9f "
                                       "vs oracle %.9f",
                                       rep, t, i, a, o)};
            }
    }
    return {true, fmt("analytic recursion matches tabular DP on 1001-point grids "
                      "(integrated-value sup gap %.2e of scale; aligned marginal gap %.2e)",
                      worst_generic, worst_aligned)};
}

// ---------------------------------------------------------------------------
// 3. Generated curves are non-increasing with an exactly zero terminal curve,
//    and on non-negative price series lie in [0, max price / eta_charge].
Criterion criterion3() {
    std::mt19937_64 rng(4242u);
    int checked = 0;
    for (int rep = 0; rep < 40; ++rep) {
        const StorageParams params = random_params(rng);
        const int segments = 200 + static_cast<int>(rng() % 301);
        const int horizon = 10 + static_cast<int>(rng() % 191);
        const bool non_negative = rep % 2 == 0;
        const PriceSeries prices =
            random_rtp_series(rng, horizon, non_negative ? 0.0 : -40.0, 150.0);
        const ValueFunctionSeries series = generate_series(prices, params, segments);
        for (double v : series.curves.back().segment_values)
            if (v != 0.0) return {false, "terminal curve is not identically zero"};
        double hi = 0.0;
        for (double p : prices.rtp) hi = std::max(hi, p);
        hi /= params.eta_charge;
        for (int t = 0; t <= horizon; ++t) {
            const auto& c = series.curves[t];
            if (!c.non_increasing(0.0))
                return {false, fmt("instance %d: curve %d is not non-increasing", rep, t)};
            if (non_negative)
                for (double v : c.segment_values)
                    if (v < 0.0 || v > hi * (1.0 + 1e-12))
                        return {false, fmt("instance %d: marginal %.9f outside [0, %.6f]",
                                           rep, v, hi)};
            ++checked;
        }
    }
    return {true, fmt("%d curves non-increasing with zero terminal; bounds "
                      "0 <= v <= max(price)/eta_charge hold on the non-negative-price half",
                      checked)};
}

// ---------------------------------------------------------------------------
// 4. Backprop gradients match central finite differences.
bool far_from_kinks(const MlpModel& m, const std::vector<double>& x) {
    std::vector<double> a = x;
    for (int l = 0; l + 1 < m.num_layers(); ++l) {
        const int nin = m.dims[static_cast<size_t>(l)];
        const int nout = m.dims[static_cast<size_t>(l) + 1];
        std::vector<double> z(static_cast<size_t>(nout));
        for (int j = 0; j < nout; ++j) {
            double s = m.biases[static_cast<size_t>(l)][static_cast<size_t>(j)];
            for (int i = 0; i < nin; ++i)
                s += m.weights[static_cast<size_t>(l)][static_cast<size_t>(j * nin + i)] *
                     a[static_cast<size_t>(i)];
            if (std::fabs(s) < 1e-3) return false;
            z[static_cast<size_t>(j)] = s > 0.0 ? s : 0.0;
        }
        a = std::move(z);
    }
    return true;
}

double eval_loss(const MlpModel& m, const std::vector<std::vector<double>>& X,
                 const std::vector<std::vector<double>>& Y, const std::vector<int>& idx) {
    Gradients g = Gradients::like(m);
    return loss_and_grad(m, X, Y, idx.data(), static_cast<int>(idx.size()), g);
}

Criterion criterion4() {
    std::mt19937_64 rng(99u);
    const double h = 1e-5;
    double worst = 0.0;
    int params_checked = 0;
    for (int rep = 0; rep < 12; ++rep) {
        std::vector<int> dims{2 + static_cast<int>(rng() % 5)};
        const int hidden_layers = 1 + static_cast<int>(rng() % 2);
        for (int l = 0; l < hidden_layers; ++l) dims.push_back(3 + static_cast<int>(rng() % 8));
        dims.push_back(1 + static_cast<int>(rng() % 5));
        MlpModel model;
        model.init(dims, rng());

        const int count = 1 + static_cast<int>(rng() % 5);
        std::vector<std::vector<double>> X, Y;
        std::vector<int> idx;
        for (int s = 0; s < count; ++s) {
            std::vector<double> x(static_cast<size_t>(dims.front()));
            for (int tries = 0; tries < 500; ++tries) {
                for (auto& v : x) v = uniform(rng, -2.0, 2.0);
                if (far_from_kinks(model, x)) break;
            }
            std::vector<double> y(static_cast<size_t>(dims.back()));
            for (auto& v : y) v = uniform(rng, -1.5, 1.5);
            X.push_back(x);
            Y.push_back(y);
            idx.push_back(s);
        }

        Gradients grads = Gradients::like(model);
        loss_and_grad(model, X, Y, idx.data(), count, grads);
        for (int l = 0; l < model.num_layers(); ++l) {
            for (size_t k = 0; k < model.weights[static_cast<size_t>(l)].size(); ++k) {
                MlpModel probe = model;
                probe.weights[static_cast<size_t>(l)][k] += h;
                const double lp = eval_loss(probe, X, Y, idx);
                probe.weights[static_cast<size_t>(l)][k] -= 2.0 * h;
                const double lm = eval_loss(probe, X, Y, idx);
                const double fd = (lp - lm) / (2.0 * h);
                const double an = grads.weights[static_cast<size_t>(l)][k];
                const double gap = std::fabs(an - fd) / std::max(1.0, std::fabs(an));
                worst = std::max(worst, gap);
                ++params_checked;
                if (gap > 1e-4)
                    return {false, fmt("rep %d layer %d weight %zu: analytic %.8f vs "
                                       "finite-difference %.8f",
                                       rep, l, k, an, fd)};
            }
            for (size_t k = 0; k < model.biases[static_cast<size_t>(l)].size(); ++k) {
                MlpModel probe = model;
                probe.biases[static_cast<size_t>(l)][k] += h;
                const double lp = eval_loss(probe, X, Y, idx);
                probe.biases[static_cast<size_t>(l)][k] -= 2.0 * h;
                const double lm = eval_loss(probe, X, Y, idx);
                const double fd = (lp - lm) / (2.0 * h);
                const double an = grads.biases[static_cast<size_t>(l)][k];
                const double gap = std::fabs(an - fd) / std::max(1.0, std::fabs(an));
                worst = std::max(worst, gap);
                ++params_checked;
                if (gap > 1e-4)
                    return {false, fmt("rep %d layer %d bias %zu: analytic %.8f vs "
                                       "finite-difference %.8f",
                                       rep, l, k, an, fd)};
            }
        }
    }
    return {true, fmt("backprop matches central finite differences on 12 random "
                      "model/batch pairs (%d parameters, worst rel gap %.2e)",
                      params_checked, worst)};
}

// ---------------------------------------------------------------------------
// 5. Golden toy profit, plus: no dispatch log produced anywhere in this suite
//    discharges during a negative-price period.
Criterion criterion5_golden() {
    StorageParams params;
    params.period_hours = 1.0;
    params.power_mw = 0.5;
    params.energy_mwh = 1.0;
    params.eta_charge = 1.0;
    params.eta_discharge = 1.0;
    params.marginal_cost = 0.0;
    const PriceSeries prices = make_rtp_series({10.0, 50.0});
    const double profit = perfect_foresight_profit(prices, params, 0.0, 1000);
    if (profit != 20.0)
        return {false, fmt("two-period toy profit %.17g != 20", profit)};

    // A run over a series with several negative-price periods, for the scan.
    StorageParams asset;
    asset.period_hours = 1.0;
    const PriceSeries neg =
        make_rtp_series({30.0, -10.0, 80.0, -5.0, 20.0, -40.0, 100.0, -1.0, 60.0});
    const ValueFunctionSeries curves = generate_series(neg, asset, 400);
    collect(run_backtest(neg, asset, curves, 0.4));
    return {true, ""};
}

Criterion criterion5_finish(const Criterion& golden) {
    if (!golden.pass) return golden;
    long negatives = 0;
    for (const DispatchRecord& r : g_records)
        if (r.price < 0.0) {
            ++negatives;
            if (r.discharge_mwh != 0.0)
                return {false, fmt("discharge %.6f MWh at price %.2f (timestamp %lld)",
                                   r.discharge_mwh, r.price,
                                   static_cast<long long>(r.timestamp))};
        }
    if (negatives < 50)
        return {false, fmt("only %ld negative-price periods were dispatched; scan has "
                           "no coverage", negatives)};
    return {true, fmt("two-period toy profit is exactly 20; zero discharge in all %ld "
                      "negative-price periods across %zu logged dispatches",
                      negatives, g_records.size())};
}

// ---------------------------------------------------------------------------
// 6. Runtime: value-curve generation over two years of 5-minute data, and one
//    epoch of the wide-feature training row.
Criterion criterion6() {
    const PriceSeries prices = synth_prices(17, 730, 1.0 / 12.0);
    if (prices.num_periods() != 210240)
        return {false, fmt("expected 210240 periods, got %d", prices.num_periods())};
    const StorageParams params;  // 0.5 MW / 1 MWh / 0.9 / $10, 5-minute periods

    const auto t0 = std::chrono::steady_clock::now();
    TrainConfig cfg;
    cfg.setting = 0;
    cfg.n_rtp_lags = 36;
    cfg.n_dap = 24;
    cfg.hidden = 60;
    cfg.epochs = 1;
    cfg.n_seeds = 1;
    cfg.params = params;
    double dp_seconds = 0.0;
    Dataset data;
    {
        const ValueFunctionSeries series = generate_series(prices, params, 1001);
        dp_seconds = seconds_since(t0);
        if (series.horizon() != prices.num_periods())
            return {false, "curve series horizon does not match the price series"};
        data = build_dataset(prices, series, cfg.feature_spec(), cfg.label_segments);
    }  // the full-resolution curve series is released before training

    const auto t1 = std::chrono::steady_clock::now();
    const TrainResult result = train_one(cfg, data, 0);
    const double epoch_seconds = seconds_since(t1);
    if (result.epoch_losses.size() != 1 || !std::isfinite(result.epoch_losses[0]))
        return {false, "single-epoch training did not produce a finite loss"};
    if (dp_seconds >= 120.0)
        return {false, fmt("value generation took %.1f s (budget 120 s)", dp_seconds)};
    if (epoch_seconds >= 60.0)
        return {false, fmt("one training epoch took %.1f s (budget 60 s)", epoch_seconds)};
    return {true, fmt("210,240-period value generation in %.1f s (budget 120 s); one "
                      "60-feature training epoch on %d samples in %.1f s (budget 60 s)",
                      dp_seconds, data.size(), epoch_seconds)};
}

// ---------------------------------------------------------------------------
// 7. Synthetic end-to-end run: the trained model recovers at least half the
//    hindsight profit out of sample and beats the zero-value myopic policy.
Criterion criterion7() {
    const StorageParams params;
    const PriceSeries full = synth_prices(11, 244, 1.0 / 12.0);
    const PriceSeries train = full.slice(0, 183 * 288);
    const PriceSeries test = full.slice(183 * 288, 61 * 288);

    TrainConfig cfg;
    cfg.setting = 3;
    cfg.n_seeds = 3;
    cfg.params = params;
    const TrainConfig rcfg = cfg.resolved();

    Dataset data;
    {
        const ValueFunctionSeries curves = generate_series(train, params, 1001);
        data = build_dataset(train, curves, rcfg.feature_spec(), rcfg.label_segments);
    }
    const SelectionResult sel = train_select(rcfg, data);

    const ValueFunctionSeries test_curves = generate_series(test, params, 1001);
    const ControlState hind = run_backtest(test, params, test_curves, 0.0);
    const ControlState model_run = run_backtest(test, params, sel.best.model, 0.0);
    ValueFunctionSeries zero;
    zero.params = params;
    zero.curves.assign(static_cast<size_t>(test.num_periods()) + 1,
                       MarginalValueCurve::constant(0.0, params.energy_mwh, 1));
    const ControlState myopic = run_backtest(test, params, zero, 0.0);
    collect(hind);
    collect(model_run);
    collect(myopic);

    if (hind.profit <= 0.0)
        return {false, fmt("hindsight profit %.2f is not positive", hind.profit)};
    const double ratio = model_run.profit / hind.profit;
    if (ratio < 0.5)
        return {false, fmt("test-window profit ratio %.1f%% is below 50%% "
                           "(model %.2f, hindsight %.2f)",
                           100.0 * ratio, model_run.profit, hind.profit)};
    if (!(model_run.profit > myopic.profit))
        return {false, fmt("model profit %.2f does not beat the myopic policy %.2f",
                           model_run.profit, myopic.profit)};
    return {true, fmt("61-day out-of-sample run: model %.0f of hindsight %.0f "
                      "(%.1f%%, myopic %.0f, seed %llu of 3)",
                      model_run.profit, hind.profit, 100.0 * ratio, myopic.profit,
                      static_cast<unsigned long long>(sel.best_seed))};
}

// ---------------------------------------------------------------------------
// 8. Byte-identical artifacts across two identical CLI runs.
int run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Criterion criterion8(const std::string& cli) {
    if (cli.empty()) return {false, "no CLI binary path was supplied"};
    const std::string train_flags =
        " --setting 0 --lags 12 --dap-inputs 0 --hidden 16 --epochs 2 --seeds 2"
        " --batch 128 --label-segments 10";
    const std::vector<std::string> steps = {
        "synth --seed 21 --days 3 --out-rtp acc8_rtp.csv --out-dap acc8_dap.csv",
        "gen-values --rtp acc8_rtp.csv --out acc8_vals1.bin --segments 301 --downsample 100",
        "gen-values --rtp acc8_rtp.csv --out acc8_vals2.bin --segments 301 --downsample 100",
        "train --rtp acc8_rtp.csv --values acc8_vals1.bin --out acc8_m1.mlp" + train_flags,
        "train --rtp acc8_rtp.csv --values acc8_vals1.bin --out acc8_m2.mlp" + train_flags,
        "backtest --rtp acc8_rtp.csv --model acc8_m1.mlp --hindsight acc8_vals1.bin"
        " --report acc8_rep1.txt --log acc8_log1.csv --label det",
        "backtest --rtp acc8_rtp.csv --model acc8_m2.mlp --hindsight acc8_vals2.bin"
        " --report acc8_rep2.txt --log acc8_log2.csv --label det",
    };
    for (const auto& step : steps) {
        const int rc = run_cli(cli, step);
        if (rc != 0) return {false, fmt("step '%s' exited %d", step.c_str(), rc)};
    }
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"acc8_vals1.bin", "acc8_vals2.bin"},
        {"acc8_m1.mlp", "acc8_m2.mlp"},
        {"acc8_m1.mlp.seeds.csv", "acc8_m2.mlp.seeds.csv"},
        {"acc8_rep1.txt", "acc8_rep2.txt"},
        {"acc8_log1.csv", "acc8_log2.csv"},
    };
    for (const auto& [a, b] : pairs) {
        const std::string da = slurp(a), db = slurp(b);
        if (da.empty()) return {false, fmt("artifact %s is empty or missing", a.c_str())};
        if (da != db) return {false, fmt("artifacts %s and %s differ", a.c_str(), b.c_str())};
    }
    return {true, "value files, models, seed logs, reports, and dispatch logs are "
                  "byte-identical across two identical runs"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    std::vector<Criterion> res(8);
    res[0] = criterion1();
    res[1] = criterion2();
    res[2] = criterion3();
    res[3] = criterion4();
    const Criterion golden = criterion5_golden();
    res[5] = criterion6();
    res[6] = criterion7();
    res[4] = criterion5_finish(golden);  // scans every log collected above
    res[7] = criterion8(cli);

    int failures = 0;
    for (int i = 0; i < 8; ++i) {
        std::printf("%s: criterion %d -- %s\n", res[static_cast<size_t>(i)].pass ? "PASS" : "FAIL",
                    i + 1, res[static_cast<size_t>(i)].text.c_str());
        failures += res[static_cast<size_t>(i)].pass ? 0 : 1;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
