#pragma once

#include "arb/prices.hpp"
#include "arb/storage.hpp"
#include "arb/value_curve.hpp"

namespace arb {

// One step of the deterministic backward recursion: given the marginal value
// of SoC at the end of the period and the period's price, returns the
// marginal value at the start of the period.
//
// With charge threshold price/eta_charge and discharge threshold
// (price - cost) * eta_discharge, the start-of-period marginal at SoC e is
// the end-of-period marginal after a full power-bound charge or discharge
// when that is still profitable at the margin, the threshold itself when the
// action is partial (first-order condition) or stopped by an SoC bound, and
// the unchanged marginal when idling. Discharge is disabled at negative
// prices. Requires v_next non-increasing; the result is non-increasing.
MarginalValueCurve backward_update(const MarginalValueCurve& v_next, double price,
                                   const StorageParams& params);

// Runs the recursion over a whole price series from a zero terminal value.
// Returns T+1 curves: curves[t] is the value of SoC at the end of period t
// (1-based), curves[0] the start-of-horizon curve.
ValueFunctionSeries generate_series(const PriceSeries& prices, const StorageParams& params,
                                    int segments = 1001);

struct OracleResult {
    double optimal_profit = 0.0;
    ValueFunctionSeries series;
};

// Brute-force tabular DP: SoC discretized to soc_grid_n points, charge and
// discharge levels each to action_grid_n points, end-of-period values looked
// up by linear interpolation. Independent of backward_update by construction;
// used to validate it. Returns the optimal profit from e0 and the
// finite-difference marginal curves.
OracleResult oracle_dp(const PriceSeries& prices, const StorageParams& params,
                       int soc_grid_n, int action_grid_n, double e0 = 0.0);

// Profit of the hindsight-optimal dispatch: generates the true value
// functions and runs the single-period controller against them.
double perfect_foresight_profit(const PriceSeries& prices, const StorageParams& params,
                                double e0, int segments = 1001);

}  // namespace arb
