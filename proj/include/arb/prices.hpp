#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "arb/errors.hpp"
#include "arb/storage.hpp"

namespace arb {

// Column mapping and filtering for delimited price files. Dates are
// inclusive "YYYY-MM-DD" bounds on the operating day; empty means unbounded.
struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string price_column = "price";
    std::string date_from;
    std::string date_to;
    double period_hours = 1.0 / 12.0;
};

// Real-time prices on a uniform period grid plus the hourly day-ahead prices
// of every operating day the grid touches. Timestamps are naive local market
// time in epoch seconds.
struct PriceSeries {
    std::int64_t start_epoch_sec = 0;
    double period_hours = 1.0 / 12.0;
    std::vector<double> rtp;                       // $/MWh per period
    std::vector<std::array<double, 24>> dap_days;  // $/MWh per hour per day
    std::vector<std::int32_t> day_of_period;       // period -> index into dap_days
    std::vector<std::int8_t> hour_of_period;       // period -> 0..23
    std::string zone = "SYNTH";

    int num_periods() const { return static_cast<int>(rtp.size()); }
    std::int64_t period_seconds() const;
    std::int64_t timestamp(int t) const { return start_epoch_sec + t * period_seconds(); }
    const std::array<double, 24>& dap_for(int t) const {
        const std::int32_t d = day_of_period[static_cast<size_t>(t)];
        if (d < 0) throw InputError("series has no day-ahead prices");
        return dap_days[static_cast<size_t>(d)];
    }
    double dap_at(int t) const { return dap_for(t)[hour_of_period[t]]; }
    PriceSignal signal(int t) const;

    // Contiguous sub-series of `count` periods starting at period `from`.
    PriceSeries slice(int from, int count) const;
};

// Loads and aligns a 5-minute (or other uniform) RTP file with an hourly DAP
// file. Single missing RTP periods are carry-forward filled with a warning on
// stderr; gaps over one hour, duplicate or out-of-order timestamps, and
// missing DAP days are errors.
PriceSeries load_prices(const std::string& rtp_path, const std::string& dap_path,
                        const CsvSchema& schema);

void save_prices(const PriceSeries& series, const std::string& rtp_path,
                 const std::string& dap_path, const CsvSchema& schema);

// Synthetic price generator: a two-harmonic daily shape with a per-day
// day-ahead scale, bounded uniform noise, price spikes, and occasional
// negative prices. Identical seed and profile give identical series.
struct SynthProfile {
    double base_level = 42.0;        // $/MWh
    double daily_amplitude = 26.0;   // $/MWh swing of the daily shape
    double noise_std = 4.0;          // bounded uniform noise, std-equivalent
    double spike_prob = 0.012;       // per-period probability
    double spike_magnitude = 160.0;  // $/MWh added on spikes
    double negative_prob = 0.004;    // per-period probability
    double negative_magnitude = 25.0;
    double dap_noise_std = 1.5;
};

PriceSeries synth_prices(std::uint64_t seed, int days, double period_hours,
                         const SynthProfile& profile = {},
                         const std::string& zone = "SYNTH");

// Naive civil-time helpers shared by ingestion and reporting.
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);
std::string format_timestamp(std::int64_t epoch_sec);

}  // namespace arb
