#pragma once

#include <array>
#include <cstdint>

#include "arb/errors.hpp"

namespace arb {

// Physical description of the storage asset. The power rating is folded into
// a per-period energy cap: every dispatch quantity in this library is MWh per
// market period, so revenue is price * (discharge - charge) directly in $.
struct StorageParams {
    double power_mw = 0.5;            // P, MW
    double energy_mwh = 1.0;          // E, usable capacity in MWh
    double eta_charge = 0.9;          // one-way charge efficiency, (0,1]
    double eta_discharge = 0.9;       // one-way discharge efficiency, (0,1]
    double marginal_cost = 10.0;      // c, $/MWh applied to discharged energy
    double period_hours = 1.0 / 12.0; // market period length in hours

    // P-bar: maximum charge or discharge energy per period, MWh.
    double energy_per_period() const { return power_mw * period_hours; }

    double duration_hours() const { return energy_mwh / power_mw; }

    void validate() const;
};

// One period's decisions. charge/discharge are grid-side MWh moved this
// period; soc_end is the resulting state of charge.
struct Dispatch {
    double charge_mwh = 0.0;
    double discharge_mwh = 0.0;
    double soc_end_mwh = 0.0;
};

// The price information visible when dispatching one period: the current
// real-time price plus the operating day's 24 day-ahead hourly prices.
struct PriceSignal {
    double rtp = 0.0;                  // $/MWh
    std::array<double, 24> dap_day{};  // $/MWh per hour of the operating day
    std::int64_t timestamp = 0;        // epoch seconds, period start
};

// Absolute tolerance used for feasibility comparisons on MWh quantities.
inline constexpr double kSocTol = 1e-9;

// SoC evolution: e_prev - p/eta_discharge + b*eta_charge. No clamping; the
// caller checks bounds.
double step_soc(const StorageParams& params, double soc_prev, double charge_mwh,
                double discharge_mwh);

// True iff the dispatch lies in the feasibility set from soc_prev: power and
// SoC bounds hold, the SoC evolution matches, and discharge is zero whenever
// the price is negative.
bool feasible(const StorageParams& params, double soc_prev, const Dispatch& d,
              double price);

}  // namespace arb
