// Command-line driver for the storage arbitrage toolkit: synthetic data,
// hindsight value functions, model training, backtesting, and report tables.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arb/controller.hpp"
#include "arb/dp.hpp"
#include "arb/errors.hpp"
#include "arb/metrics.hpp"
#include "arb/mlp.hpp"
#include "arb/prices.hpp"
#include "arb/trainer.hpp"
#include "arb/value_curve.hpp"

namespace {

bool quiet() { return std::getenv("ARB_QUIET") != nullptr; }

void info(const std::string& msg) {
    if (!quiet()) std::cout << msg << '\n';
}

// Asset flags shared by every subcommand that runs the model or the DP.
struct AssetOpts {
    arb::StorageParams params;
    double eta_both = -1.0;
    double dt_minutes = 5.0;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--power", params.power_mw, "power rating, MW")->capture_default_str();
        cmd->add_option("--energy", params.energy_mwh, "energy capacity, MWh")
            ->capture_default_str();
        cmd->add_option("--eta-charge", params.eta_charge, "charging efficiency in (0,1]")
            ->capture_default_str();
        cmd->add_option("--eta-discharge", params.eta_discharge, "discharging efficiency in (0,1]")
            ->capture_default_str();
        cmd->add_option("--eta", eta_both, "one-way efficiency for both directions");
        cmd->add_option("--cost", params.marginal_cost, "marginal discharge cost, $/MWh")
            ->capture_default_str();
        cmd->add_option("--dt-minutes", dt_minutes, "period length, minutes")
            ->capture_default_str();
    }

    arb::StorageParams resolve() const {
        arb::StorageParams p = params;
        if (eta_both > 0.0) p.eta_charge = p.eta_discharge = eta_both;
        p.period_hours = dt_minutes / 60.0;
        p.validate();
        return p;
    }
};

// Input flags shared by every subcommand that reads price CSVs.
struct PriceOpts {
    std::string rtp_path;
    std::string dap_path;
    std::string date_from;
    std::string date_to;
    std::string time_col = "timestamp";
    std::string price_col = "price";

    void add_flags(CLI::App* cmd, bool rtp_required) {
        auto* rtp = cmd->add_option("--rtp", rtp_path, "real-time price CSV");
        if (rtp_required) rtp->required();
        cmd->add_option("--dap", dap_path, "day-ahead hourly price CSV");
        cmd->add_option("--from", date_from, "first operating day, YYYY-MM-DD (inclusive)");
        cmd->add_option("--to", date_to, "last operating day, YYYY-MM-DD (inclusive)");
        cmd->add_option("--time-col", time_col, "timestamp column name")->capture_default_str();
        cmd->add_option("--price-col", price_col, "price column name")->capture_default_str();
    }

    arb::PriceSeries load(const arb::StorageParams& params) const {
        arb::CsvSchema schema;
        schema.timestamp_column = time_col;
        schema.price_column = price_col;
        schema.date_from = date_from;
        schema.date_to = date_to;
        schema.period_hours = params.period_hours;
        return arb::load_prices(rtp_path, dap_path, schema);
    }
};

void check_series_params(const arb::ValueFunctionSeries& series, const arb::StorageParams& params,
                         const std::string& path) {
    auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); };
    if (!close(series.params.energy_mwh, params.energy_mwh) ||
        !close(series.params.power_mw, params.power_mw) ||
        !close(series.params.eta_charge, params.eta_charge) ||
        !close(series.params.eta_discharge, params.eta_discharge) ||
        !close(series.params.marginal_cost, params.marginal_cost) ||
        !close(series.params.period_hours, params.period_hours))
        throw arb::ConfigError(path + ": stored asset parameters differ from the requested ones");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Storage price-arbitrage toolkit: hindsight value functions via dynamic\n"
        "programming, neural value-function prediction, and dispatch backtests.\n"
        "Set ARB_QUIET=1 to silence informational output."};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a config file (flags take precedence)");

    // ---- synth ----------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a synthetic price series");
    struct {
        std::uint64_t seed = 1;
        int days = 30;
        double dt_minutes = 5.0;
        std::string zone = "SYNTH";
        std::string out_rtp, out_dap;
        arb::SynthProfile profile;
    } sy;
    synth->add_option("--seed", sy.seed, "random seed")->capture_default_str();
    synth->add_option("--days", sy.days, "number of operating days")->capture_default_str();
    synth->add_option("--dt-minutes", sy.dt_minutes, "period length, minutes")
        ->capture_default_str();
    synth->add_option("--zone", sy.zone, "zone label")->capture_default_str();
    synth->add_option("--out-rtp", sy.out_rtp, "output real-time price CSV")->required();
    synth->add_option("--out-dap", sy.out_dap, "output day-ahead price CSV")->required();
    synth->add_option("--base", sy.profile.base_level, "mean price level, $/MWh")
        ->capture_default_str();
    synth->add_option("--amplitude", sy.profile.daily_amplitude, "daily swing, $/MWh")
        ->capture_default_str();
    synth->add_option("--noise", sy.profile.noise_std, "noise scale, $/MWh")
        ->capture_default_str();
    synth->add_option("--spike-prob", sy.profile.spike_prob, "per-period spike probability")
        ->capture_default_str();
    synth->add_option("--spike-mag", sy.profile.spike_magnitude, "spike height, $/MWh")
        ->capture_default_str();
    synth->add_option("--neg-prob", sy.profile.negative_prob,
                      "per-period negative-price probability")
        ->capture_default_str();
    synth->add_option("--neg-mag", sy.profile.negative_magnitude, "negative dip, $/MWh")
        ->capture_default_str();
    synth->callback([&] {
        arb::PriceSeries series =
            arb::synth_prices(sy.seed, sy.days, sy.dt_minutes / 60.0, sy.profile, sy.zone);
        arb::save_prices(series, sy.out_rtp, sy.out_dap, {});
        info("wrote " + std::to_string(series.num_periods()) + " periods to " + sy.out_rtp +
             " and " + std::to_string(series.dap_days.size()) + " days to " + sy.out_dap);
    });

    // ---- gen-values -----------------------------------------------------
    auto* gen = app.add_subcommand("gen-values",
                                   "compute hindsight marginal value functions by backward DP");
    struct {
        PriceOpts prices;
        AssetOpts asset;
        std::string out;
        int segments = 1001;
        int downsample = 0;
    } gv;
    gv.prices.add_flags(gen, true);
    gv.asset.add_flags(gen);
    gen->add_option("--out", gv.out, "output value-series file (.txt for text)")->required();
    gen->add_option("--segments", gv.segments, "SoC segments per curve")->capture_default_str();
    gen->add_option("--downsample", gv.downsample,
                    "down-sample curves to this many segments before writing (0 = keep)");
    gen->callback([&] {
        const arb::StorageParams params = gv.asset.resolve();
        arb::PriceSeries prices = gv.prices.load(params);
        const auto t0 = std::chrono::steady_clock::now();
        arb::ValueFunctionSeries series = arb::generate_series(prices, params, gv.segments);
        const auto t1 = std::chrono::steady_clock::now();
        if (gv.downsample > 0)
            for (auto& c : series.curves) c = c.downsample(gv.downsample);
        arb::save_value_series(series, gv.out);
        char buf[160];
        std::snprintf(buf, sizeof buf, "computed %d curves (K=%d) in %.2f s -> %s",
                      static_cast<int>(series.curves.size()), series.num_segments(),
                      std::chrono::duration<double>(t1 - t0).count(), gv.out.c_str());
        std::cout << buf << '\n';
    });

    // ---- train ----------------------------------------------------------
    auto* train = app.add_subcommand("train", "train value-prediction models and keep the best");
    struct {
        PriceOpts prices;
        AssetOpts asset;
        std::string values, out, log;
        arb::TrainConfig cfg;
    } tr;
    tr.prices.add_flags(train, true);
    tr.asset.add_flags(train);
    train->add_option("--values", tr.values, "hindsight value-series file for labels")->required();
    train->add_option("--out", tr.out, "output model file")->required();
    train->add_option("--log", tr.log, "per-seed training log CSV (default: <out>.seeds.csv)");
    train->add_option("--setting", tr.cfg.setting,
                      "preset 1-4: (lags,dap,H,epochs) = (36,0,60,10) (288,0,256,20) "
                      "(36,24,60,10) (288,24,256,20); 0 = use explicit flags")
        ->capture_default_str();
    train->add_option("--lags", tr.cfg.n_rtp_lags, "real-time price lags (setting 0)")
        ->capture_default_str();
    train->add_option("--dap-inputs", tr.cfg.n_dap, "day-ahead inputs, 0 or 24 (setting 0)")
        ->capture_default_str();
    train->add_option("--hidden", tr.cfg.hidden, "hidden layer width (setting 0)")
        ->capture_default_str();
    train->add_option("--epochs", tr.cfg.epochs, "training epochs (setting 0)")
        ->capture_default_str();
    train->add_option("--seeds", tr.cfg.n_seeds, "number of random seeds")->capture_default_str();
    train->add_option("--batch", tr.cfg.batch_size, "mini-batch size")->capture_default_str();
    train->add_option("--label-segments", tr.cfg.label_segments, "label curve segments")
        ->capture_default_str();
    train->callback([&] {
        tr.cfg.params = tr.asset.resolve();
        const arb::TrainConfig cfg = tr.cfg.resolved();
        if (cfg.n_dap > 0 && tr.prices.dap_path.empty())
            throw arb::ConfigError("this setting needs day-ahead inputs; pass --dap");
        arb::PriceSeries prices = tr.prices.load(cfg.params);
        arb::ValueFunctionSeries series = arb::load_value_series(tr.values);
        check_series_params(series, cfg.params, tr.values);
        arb::Dataset data = arb::build_dataset(prices, series, cfg.feature_spec(),
                                               cfg.label_segments);
        info("dataset: " + std::to_string(data.size()) + " samples, " +
             std::to_string(data.spec.length()) + " features");
        arb::SelectionResult sel = arb::train_select(cfg, data);
        arb::save_model(sel.best.model, tr.out);
        const std::string log_path = tr.log.empty() ? tr.out + ".seeds.csv" : tr.log;
        arb::save_seed_log(sel, log_path);
        char buf[120];
        for (const auto& s : sel.seeds) {
            if (s.diverged)
                std::snprintf(buf, sizeof buf, "seed %llu: diverged",
                              static_cast<unsigned long long>(s.seed));
            else
                std::snprintf(buf, sizeof buf, "seed %llu: training profit %.2f",
                              static_cast<unsigned long long>(s.seed), s.training_profit);
            info(buf);
        }
        std::snprintf(buf, sizeof buf, "selected seed %llu -> %s",
                      static_cast<unsigned long long>(sel.best_seed), tr.out.c_str());
        info(buf);
    });

    // ---- backtest -------------------------------------------------------
    auto* back = app.add_subcommand("backtest", "dispatch storage over a price series");
    struct {
        PriceOpts prices;
        AssetOpts asset;
        std::string model, values, hindsight, report, log, label;
        double e0 = 0.0;
    } bt;
    bt.prices.add_flags(back, true);
    bt.asset.add_flags(back);
    auto* model_opt = back->add_option("--model", bt.model, "trained model file (model mode)");
    auto* values_opt =
        back->add_option("--values", bt.values, "value-series file (hindsight mode)");
    model_opt->excludes(values_opt);
    back->add_option("--hindsight", bt.hindsight,
                     "value-series file for the profit-ratio denominator");
    back->add_option("--report", bt.report, "output metrics report file")->required();
    back->add_option("--log", bt.log, "output dispatch log CSV");
    back->add_option("--label", bt.label, "report label (default: mode:zone)");
    back->add_option("--e0", bt.e0, "initial SoC, MWh")->capture_default_str();
    back->callback([&] {
        if (bt.model.empty() == bt.values.empty())
            throw arb::ConfigError("pass exactly one of --model or --values");
        const arb::StorageParams params = bt.asset.resolve();
        arb::PriceSeries prices = bt.prices.load(params);

        arb::ControlState state;
        std::string mode;
        if (!bt.model.empty()) {
            mode = "model";
            arb::MlpModel model = arb::load_model(bt.model);
            if (model.feature_spec.use_dap && bt.prices.dap_path.empty())
                throw arb::ConfigError("model uses day-ahead inputs; pass --dap");
            state = arb::run_backtest(prices, params, model, bt.e0);
        } else {
            mode = "hindsight";
            arb::ValueFunctionSeries series = arb::load_value_series(bt.values);
            check_series_params(series, params, bt.values);
            state = arb::run_backtest(prices, params, series, bt.e0);
        }

        const std::string label = bt.label.empty() ? mode + ":" + prices.zone : bt.label;
        arb::MetricsReport report =
            arb::compute_metrics(label, state, prices.num_periods(), params.period_hours);
        if (!bt.hindsight.empty()) {
            arb::ValueFunctionSeries series = arb::load_value_series(bt.hindsight);
            check_series_params(series, params, bt.hindsight);
            report.hindsight_profit =
                bt.hindsight == bt.values ? state.profit
                                          : arb::run_backtest(prices, params, series, bt.e0).profit;
            report.has_hindsight = true;
        } else if (mode == "hindsight") {
            report.hindsight_profit = state.profit;  // this run is the benchmark
            report.has_hindsight = true;
        }
        arb::save_report(report, bt.report);
        if (!bt.log.empty()) arb::save_dispatch_log(state.log, bt.log);
        if (!quiet()) std::cout << arb::format_comparison({report});
    });

    // ---- compare --------------------------------------------------------
    auto* cmp = app.add_subcommand("compare", "merge metric reports into one table");
    struct {
        std::vector<std::string> reports;
        std::string out;
    } cp;
    cmp->add_option("--reports", cp.reports, "metric report files")->required()->expected(-1);
    cmp->add_option("--out", cp.out, "also write the table to this file");
    cmp->callback([&] {
        std::vector<arb::MetricsReport> reports;
        reports.reserve(cp.reports.size());
        for (const auto& path : cp.reports) reports.push_back(arb::load_report(path));
        for (size_t i = 1; i < reports.size(); ++i)
            if (std::fabs(reports[i].hours() - reports[0].hours()) > 1e-9 * reports[0].hours())
                std::cerr << "warning: report '" << reports[i].label
                          << "' covers a different horizon; annualized columns still comparable\n";
        const std::string table = arb::format_comparison(reports);
        std::cout << table;
        if (!cp.out.empty()) {
            std::ofstream out(cp.out);
            if (!out) throw arb::InputError("cannot open for writing: " + cp.out);
            out << table;
            if (!out) throw arb::InputError("write failed: " + cp.out);
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags are input errors
    } catch (const arb::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const arb::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const arb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
