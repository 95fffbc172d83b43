#include "arb/dp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "arb/controller.hpp"

namespace arb {

MarginalValueCurve backward_update(const MarginalValueCurve& v_next, double price,
                                   const StorageParams& params) {
    params.validate();
    if (!std::isfinite(price)) throw NumericError("backward_update: non-finite price");
    const int k = v_next.num_segments();
    const double cap = v_next.capacity_mwh;
    if (std::abs(cap - params.energy_mwh) > kSocTol * std::max(1.0, cap))
        throw ConfigError("backward_update: curve capacity differs from storage capacity");
    if (!v_next.non_increasing(1e-9 * std::max(1.0, std::abs(price))))
        throw NumericError("backward_update: v_next is not non-increasing");

    const double w = v_next.segment_width();
    const double theta_c = price / params.eta_charge;
    const double theta_d = (price - params.marginal_cost) * params.eta_discharge;
    // Shifts measured in segment widths; evaluated at segment midpoints so the
    // 0.5 offset keeps floor() away from cell edges.
    const double shift_c = params.eta_charge * params.energy_per_period() / w;
    const double shift_d = params.energy_per_period() / params.eta_discharge / w;
    const bool can_discharge = price >= 0.0;

    MarginalValueCurve out;
    out.capacity_mwh = cap;
    out.segment_values.resize(static_cast<size_t>(k));
    const auto& v = v_next.segment_values;
    for (int i = 0; i < k; ++i) {
        const double mid = i + 0.5;
        const double v0 = v[i];
        // Full power-bound charge lands at mid + shift_c; past the top of the
        // range the SoC cap binds and the marginal becomes the charge
        // threshold (partial-charge condition).
        const double pos_c = mid + shift_c;
        const double vc = pos_c > static_cast<double>(k)
                              ? theta_c
                              : v[std::min(k - 1, static_cast<int>(pos_c))];
        double value;
        if (vc > theta_c) {
            value = vc;  // still worth charging after a full-power charge
        } else if (!can_discharge) {
            value = std::min(v0, theta_c);
        } else {
            const double pos_d = mid - shift_d;
            const double vd = pos_d < 0.0 ? theta_d : v[std::max(0, static_cast<int>(pos_d))];
            if (vd < theta_d)
                value = vd;  // still worth discharging after a full-power discharge
            else
                value = std::clamp(v0, theta_d, theta_c);
        }
        out.segment_values[i] = value;
    }
    return out;
}

ValueFunctionSeries generate_series(const PriceSeries& prices, const StorageParams& params,
                                    int segments) {
    params.validate();
    if (segments < 1) throw ConfigError("generate_series: segment count must be >= 1");
    if (prices.num_periods() < 1) throw InputError("generate_series: empty price series");
    const int t = prices.num_periods();
    ValueFunctionSeries series;
    series.params = params;
    series.curves.resize(static_cast<size_t>(t) + 1);
    series.curves[t] = MarginalValueCurve::constant(0.0, params.energy_mwh, segments);
    for (int i = t - 1; i >= 0; --i)
        series.curves[i] = backward_update(series.curves[i + 1], prices.rtp[i], params);
    return series;
}

namespace {

double lerp_value(const std::vector<double>& values, double pos) {
    const int n = static_cast<int>(values.size());
    if (pos <= 0.0) return values.front();
    if (pos >= n - 1) return values.back();
    const int i = static_cast<int>(pos);
    const double f = pos - i;
    return values[i] * (1.0 - f) + values[std::min(i + 1, n - 1)] * f;
}

}  // namespace

OracleResult oracle_dp(const PriceSeries& prices, const StorageParams& params,
                       int soc_grid_n, int action_grid_n, double e0) {
    params.validate();
    if (soc_grid_n < 2 || action_grid_n < 2)
        throw ConfigError("oracle_dp: grid sizes must be >= 2");
    if (prices.num_periods() < 1) throw InputError("oracle_dp: empty price series");
    const int t_max = prices.num_periods();
    const int n = soc_grid_n;
    const double cap = params.energy_mwh;
    const double h = cap / (n - 1);
    const double pbar = params.energy_per_period();
    if (params.eta_charge * pbar < h || pbar / params.eta_discharge < h)
        std::cerr << "warning: oracle_dp: SoC grid coarser than one period's energy move\n";

    // Candidate charge/discharge levels, zero excluded (idle handled apart).
    std::vector<double> levels(static_cast<size_t>(action_grid_n) - 1);
    for (int a = 1; a < action_grid_n; ++a)
        levels[a - 1] = pbar * a / (action_grid_n - 1);

    OracleResult result;
    result.series.params = params;
    result.series.curves.resize(static_cast<size_t>(t_max) + 1);
    result.series.curves[t_max] = MarginalValueCurve::constant(0.0, cap, n - 1);

    std::vector<double> v_next(static_cast<size_t>(n), 0.0);
    std::vector<double> v_cur(static_cast<size_t>(n), 0.0);
    const double edge = kSocTol * std::max(1.0, cap);
    for (int t = t_max - 1; t >= 0; --t) {
        const double price = prices.rtp[t];
        for (int i = 0; i < n; ++i) {
            const double e_prev = i * h;
            double best = v_next[i];  // idle
            for (double b : levels) {
                const double e = e_prev + b * params.eta_charge;
                if (e > cap + edge) break;
                const double cand = -price * b + lerp_value(v_next, std::min(e, cap) / h);
                if (cand > best) best = cand;
            }
            if (price >= 0.0) {
                for (double p : levels) {
                    const double e = e_prev - p / params.eta_discharge;
                    if (e < -edge) break;
                    const double cand = (price - params.marginal_cost) * p +
                                        lerp_value(v_next, std::max(e, 0.0) / h);
                    if (cand > best) best = cand;
                }
            }
            v_cur[i] = best;
        }
        auto& curve = result.series.curves[t];
        curve.capacity_mwh = cap;
        curve.segment_values.resize(static_cast<size_t>(n) - 1);
        for (int i = 0; i + 1 < n; ++i)
            curve.segment_values[i] = (v_cur[i + 1] - v_cur[i]) / h;
        std::swap(v_next, v_cur);
    }
    result.optimal_profit = lerp_value(v_next, std::clamp(e0, 0.0, cap) / h);
    return result;
}

double perfect_foresight_profit(const PriceSeries& prices, const StorageParams& params,
                                double e0, int segments) {
    const ValueFunctionSeries series = generate_series(prices, params, segments);
    return run_backtest(prices, params, series, e0).profit;
}

}  // namespace arb
