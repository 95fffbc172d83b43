#pragma once

#include <cstdint>
#include <vector>

#include "arb/mlp.hpp"
#include "arb/prices.hpp"
#include "arb/storage.hpp"
#include "arb/value_curve.hpp"

namespace arb {

struct DispatchRecord {
    std::int64_t timestamp = 0;
    double price = 0.0;
    double charge_mwh = 0.0;
    double discharge_mwh = 0.0;
    double soc_mwh = 0.0;   // end of period
    double profit = 0.0;    // price*(p-b) - cost*p for this period
};

// Running state of a backtest.
struct ControlState {
    double soc = 0.0;
    double profit = 0.0;
    double discharged_mwh = 0.0;
    std::vector<DispatchRecord> log;
};

// Solves the single-period problem against a piecewise-constant marginal
// value curve: maximizes price*(p-b) - cost*p + integral of the curve over
// the SoC change, subject to power, SoC, and negative-price constraints.
// The returned dispatch never charges and discharges simultaneously.
Dispatch single_period_dispatch(const MarginalValueCurve& curve, double price,
                                const StorageParams& params, double soc_prev);

// Hindsight mode: dispatch each period against the true end-of-period curve.
ControlState run_backtest(const PriceSeries& prices, const StorageParams& params,
                          const ValueFunctionSeries& curves, double e0);

// Model mode: predict the curve each period from lagged prices; the first
// look-back-window periods idle (no feature history) and are logged as such.
ControlState run_backtest(const PriceSeries& prices, const StorageParams& params,
                          const MlpModel& model, double e0);

void save_dispatch_log(const std::vector<DispatchRecord>& log, const std::string& path);

}  // namespace arb
