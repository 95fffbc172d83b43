#pragma once

#include <string>
#include <vector>

#include "arb/controller.hpp"

namespace arb {

// Profit accounting for one backtest run. Annualized figures scale the run
// totals to a 8760-hour year so runs of different lengths compare directly.
struct MetricsReport {
    std::string label;
    double profit = 0.0;          // $ earned over the run
    double discharged_mwh = 0.0;  // energy sold over the run
    int num_periods = 0;
    double period_hours = 0.0;
    double hindsight_profit = 0.0;  // same-window perfect-knowledge profit
    bool has_hindsight = false;

    double hours() const { return num_periods * period_hours; }
    double annualized_profit() const;
    double annualized_discharge_mwh() const;
    bool has_profit_per_mwh() const { return discharged_mwh > 0.0; }
    double profit_per_mwh() const;  // $ per MWh discharged
    bool has_ratio() const { return has_hindsight && hindsight_profit != 0.0; }
    double ratio() const;  // profit relative to the hindsight run
};

MetricsReport compute_metrics(const std::string& label, const ControlState& state,
                              int num_periods, double period_hours);

void save_report(const MetricsReport& report, const std::string& path);
MetricsReport load_report(const std::string& path);

// Fixed-width table over several reports. Duplicate labels keep the last
// occurrence and warn on stderr.
std::string format_comparison(const std::vector<MetricsReport>& reports);

}  // namespace arb
