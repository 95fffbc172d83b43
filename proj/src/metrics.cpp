#include "arb/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "arb/errors.hpp"

namespace arb {

namespace {
constexpr double kHoursPerYear = 8760.0;
}

double MetricsReport::annualized_profit() const {
    if (hours() <= 0.0) throw NumericError("metrics: run covers zero hours");
    return profit * kHoursPerYear / hours();
}

double MetricsReport::annualized_discharge_mwh() const {
    if (hours() <= 0.0) throw NumericError("metrics: run covers zero hours");
    return discharged_mwh * kHoursPerYear / hours();
}

double MetricsReport::profit_per_mwh() const {
    if (!has_profit_per_mwh()) throw NumericError("metrics: nothing discharged");
    return profit / discharged_mwh;
}

double MetricsReport::ratio() const {
    if (!has_ratio()) throw NumericError("metrics: no hindsight baseline");
    return profit / hindsight_profit;
}

MetricsReport compute_metrics(const std::string& label, const ControlState& state,
                              int num_periods, double period_hours) {
    if (num_periods < 1 || period_hours <= 0.0)
        throw InputError("metrics: run length must be positive");
    MetricsReport r;
    r.label = label;
    r.profit = state.profit;
    r.discharged_mwh = state.discharged_mwh;
    r.num_periods = num_periods;
    r.period_hours = period_hours;
    return r;
}

void save_report(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "ARBMET1\nlabel %s\nprofit %.17g\ndischarged_mwh %.17g\nnum_periods %d\n"
                  "period_hours %.17g\nhas_hindsight %d\nhindsight_profit %.17g\n",
                  report.label.empty() ? "-" : report.label.c_str(), report.profit,
                  report.discharged_mwh, report.num_periods, report.period_hours,
                  report.has_hindsight ? 1 : 0, report.hindsight_profit);
    out << buf;
    if (!out) throw InputError("write failed: " + path);
}

MetricsReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open: " + path);
    std::string magic;
    if (!(in >> magic) || magic != "ARBMET1")
        throw InputError("report file: bad magic in " + path);
    MetricsReport r;
    std::string tag;
    int flag = 0;
    if (!(in >> tag >> r.label) || tag != "label")
        throw InputError("report file: bad label line");
    if (r.label == "-") r.label.clear();
    auto read_num = [&](const char* want, auto& dst) {
        if (!(in >> tag >> dst) || tag != want)
            throw InputError(std::string("report file: bad ") + want + " line");
    };
    read_num("profit", r.profit);
    read_num("discharged_mwh", r.discharged_mwh);
    read_num("num_periods", r.num_periods);
    read_num("period_hours", r.period_hours);
    read_num("has_hindsight", flag);
    read_num("hindsight_profit", r.hindsight_profit);
    r.has_hindsight = flag == 1;
    if (r.num_periods < 1 || r.period_hours <= 0.0)
        throw InputError("report file: non-positive run length");
    return r;
}

std::string format_comparison(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw InputError("format_comparison: no reports");
    // Later duplicates replace earlier ones, preserving first-seen order.
    std::vector<MetricsReport> rows;
    for (const auto& r : reports) {
        bool replaced = false;
        for (auto& row : rows)
            if (row.label == r.label) {
                std::cerr << "warning: duplicate report label '" << r.label
                          << "', keeping the later one\n";
                row = r;
                replaced = true;
                break;
            }
        if (!replaced) rows.push_back(r);
    }

    std::string table;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-20s %14s %14s %12s %10s\n", "label", "profit_$",
                  "profit_$/yr", "$/MWh", "ratio_%");
    table += buf;
    for (const auto& r : rows) {
        char per_mwh[32], ratio[32];
        if (r.has_profit_per_mwh())
            std::snprintf(per_mwh, sizeof per_mwh, "%12.2f", r.profit_per_mwh());
        else
            std::snprintf(per_mwh, sizeof per_mwh, "%12s", "-");
        if (r.has_ratio())
            std::snprintf(ratio, sizeof ratio, "%10.2f", 100.0 * r.ratio());
        else
            std::snprintf(ratio, sizeof ratio, "%10s", "-");
        std::snprintf(buf, sizeof buf, "%-20s %14.2f %14.2f %s %s\n", r.label.c_str(), r.profit,
                      r.annualized_profit(), per_mwh, ratio);
        table += buf;
    }
    return table;
}

}  // namespace arb
