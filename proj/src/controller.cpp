#include "arb/controller.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "arb/features.hpp"

namespace arb {

namespace {

struct DirectionBest {
    double gain = 0.0;
    double soc = 0.0;
};

// Best destination above soc_prev for charging: maximizes the integral of
// (v - charge threshold) walking segment by segment. Piecewise-linear in the
// destination, so the maximum sits on a segment boundary or at the bound.
DirectionBest best_charge(const MarginalValueCurve& curve, double theta_c, double soc_prev,
                          double soc_max) {
    DirectionBest best{0.0, soc_prev};
    const double w = curve.segment_width();
    const int k = curve.num_segments();
    double x = soc_prev;
    double gain = 0.0;
    int i = std::min(k - 1, static_cast<int>(std::floor(x / w)));
    while (x < soc_max && i < k) {
        const double boundary = (i + 1) * w;
        const double stop = std::min(soc_max, boundary);
        gain += (curve.segment_values[i] - theta_c) * (stop - x);
        x = stop;
        if (gain > best.gain) best = {gain, x};
        ++i;
    }
    return best;
}

// Mirror image for discharging: maximizes the integral of (discharge
// threshold - v) walking downward.
DirectionBest best_discharge(const MarginalValueCurve& curve, double theta_d, double soc_prev,
                             double soc_min) {
    DirectionBest best{0.0, soc_prev};
    const double w = curve.segment_width();
    const int k = curve.num_segments();
    double x = soc_prev;
    double gain = 0.0;
    int i = std::clamp(static_cast<int>(std::ceil(x / w)) - 1, 0, k - 1);
    while (x > soc_min && i >= 0) {
        const double boundary = i * w;
        const double stop = std::max(soc_min, boundary);
        gain += (theta_d - curve.segment_values[i]) * (x - stop);
        x = stop;
        if (gain > best.gain) best = {gain, x};
        --i;
    }
    return best;
}

}  // namespace

Dispatch single_period_dispatch(const MarginalValueCurve& curve, double price,
                                const StorageParams& params, double soc_prev) {
    const double cap = params.energy_mwh;
    soc_prev = std::clamp(soc_prev, 0.0, cap);
    const double pbar = params.energy_per_period();
    const double theta_c = price / params.eta_charge;
    const double theta_d = (price - params.marginal_cost) * params.eta_discharge;

    const DirectionBest charge =
        best_charge(curve, theta_c, soc_prev, std::min(cap, soc_prev + params.eta_charge * pbar));
    DirectionBest discharge{0.0, soc_prev};
    if (price >= 0.0)
        discharge = best_discharge(curve, theta_d, soc_prev,
                                   std::max(0.0, soc_prev - pbar / params.eta_discharge));

    Dispatch d;
    if (discharge.gain > charge.gain && discharge.gain > 0.0) {
        d.discharge_mwh = std::min(pbar, (soc_prev - discharge.soc) * params.eta_discharge);
        d.soc_end_mwh = discharge.soc;
    } else if (charge.gain > 0.0) {
        d.charge_mwh = std::min(pbar, (charge.soc - soc_prev) / params.eta_charge);
        d.soc_end_mwh = charge.soc;
    } else {
        d.soc_end_mwh = soc_prev;
    }
    return d;
}

namespace {

template <typename CurveAt>
ControlState backtest_loop(const PriceSeries& prices, const StorageParams& params, double e0,
                           CurveAt&& curve_at) {
    params.validate();
    if (e0 < -kSocTol || e0 > params.energy_mwh + kSocTol)
        throw ConfigError("backtest: initial SoC outside [0, capacity]");
    ControlState state;
    state.soc = std::clamp(e0, 0.0, params.energy_mwh);
    const int t_max = prices.num_periods();
    state.log.reserve(static_cast<size_t>(t_max));
    for (int t = 0; t < t_max; ++t) {
        const double price = prices.rtp[t];
        const MarginalValueCurve* curve = curve_at(t);
        Dispatch d;
        if (curve)
            d = single_period_dispatch(*curve, price, params, state.soc);
        else
            d.soc_end_mwh = state.soc;  // warmup: no value prediction yet
        const double period_profit =
            price * (d.discharge_mwh - d.charge_mwh) - params.marginal_cost * d.discharge_mwh;
        state.soc = d.soc_end_mwh;
        state.profit += period_profit;
        state.discharged_mwh += d.discharge_mwh;
        state.log.push_back({prices.timestamp(t), price, d.charge_mwh, d.discharge_mwh,
                             d.soc_end_mwh, period_profit});
    }
    return state;
}

}  // namespace

ControlState run_backtest(const PriceSeries& prices, const StorageParams& params,
                          const ValueFunctionSeries& curves, double e0) {
    if (curves.horizon() != prices.num_periods())
        throw InputError("backtest: value series horizon differs from price series");
    return backtest_loop(prices, params, e0,
                         [&](int t) { return &curves.curves[t + 1]; });
}

ControlState run_backtest(const PriceSeries& prices, const StorageParams& params,
                          const MlpModel& model, double e0) {
    const FeatureSpec& spec = model.feature_spec;
    if (model.dims.empty() || model.dims.front() != spec.length())
        throw ConfigError("backtest: model input size differs from its feature spec");
    const int warmup = spec.n_rtp_lags;
    if (warmup > 0 && prices.num_periods() > 0)
        std::cerr << "note: idling the first " << warmup
                  << " period(s) until the look-back window fills\n";
    MarginalValueCurve curve;
    curve.capacity_mwh = params.energy_mwh;
    return backtest_loop(prices, params, e0, [&](int t) -> const MarginalValueCurve* {
        if (t < warmup) return nullptr;
        curve.segment_values = model.forward(build_features(prices, t, spec));
        return &curve;
    });
}

void save_dispatch_log(const std::vector<DispatchRecord>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "timestamp,price,charge_mwh,discharge_mwh,soc_mwh,profit\n";
    char buf[160];
    for (const auto& r : log) {
        std::snprintf(buf, sizeof buf, ",%.10g,%.10g,%.10g,%.10g,%.10g\n", r.price, r.charge_mwh,
                      r.discharge_mwh, r.soc_mwh, r.profit);
        out << format_timestamp(r.timestamp) << buf;
    }
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace arb
