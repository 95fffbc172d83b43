#include "arb/value_curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace arb {

MarginalValueCurve MarginalValueCurve::constant(double value, double capacity, int segments) {
    if (segments < 1) throw ConfigError("curve needs at least one segment");
    if (!(capacity > 0.0)) throw ConfigError("curve capacity must be > 0");
    MarginalValueCurve c;
    c.capacity_mwh = capacity;
    c.segment_values.assign(static_cast<size_t>(segments), value);
    return c;
}

// Containing-segment index for a SoC value, ties toward lower SoC: soc in
// (i*w, (i+1)*w] maps to i, soc == 0 maps to 0.
static int segment_index_tie_low(double soc, double width, int k) {
    int idx = static_cast<int>(std::ceil(soc / width)) - 1;
    return std::clamp(idx, 0, k - 1);
}

double MarginalValueCurve::eval_marginal(double soc) const {
    const double slack = kSocTol * std::max(1.0, capacity_mwh);
    if (soc < -slack || soc > capacity_mwh + slack)
        throw InputError("eval_marginal: SoC outside [0, capacity]");
    soc = std::clamp(soc, 0.0, capacity_mwh);
    return segment_values[segment_index_tie_low(soc, segment_width(), num_segments())];
}

double MarginalValueCurve::integrate(double from, double to) const {
    const double slack = kSocTol * std::max(1.0, capacity_mwh);
    if (from < -slack || from > capacity_mwh + slack || to < -slack || to > capacity_mwh + slack)
        throw InputError("integrate: endpoint outside [0, capacity]");
    from = std::clamp(from, 0.0, capacity_mwh);
    to = std::clamp(to, 0.0, capacity_mwh);
    const double sign = to >= from ? 1.0 : -1.0;
    const double lo = std::min(from, to), hi = std::max(from, to);
    const double w = segment_width();
    const int k = num_segments();
    int i0 = std::clamp(static_cast<int>(std::floor(lo / w)), 0, k - 1);
    int i1 = std::clamp(static_cast<int>(std::floor(hi / w)), 0, k - 1);
    double total = 0.0;
    for (int i = i0; i <= i1; ++i) {
        const double a = std::max(lo, i * w);
        const double b = std::min(hi, (i + 1) * w);
        if (b > a) total += segment_values[i] * (b - a);
    }
    return sign * total;
}

MarginalValueCurve MarginalValueCurve::downsample(int target_segments) const {
    if (target_segments <= 0) throw ConfigError("downsample: target segment count must be > 0");
    if (target_segments > num_segments())
        throw ConfigError("downsample: target segment count exceeds source");
    MarginalValueCurve out;
    out.capacity_mwh = capacity_mwh;
    out.segment_values.resize(static_cast<size_t>(target_segments));
    const int k = num_segments();
    const double w_src = capacity_mwh / k;
    const double w_dst = capacity_mwh / target_segments;
    for (int j = 0; j < target_segments; ++j) {
        const double lo = j * w_dst, hi = (j + 1) * w_dst;
        int i0 = std::clamp(static_cast<int>(std::floor(lo / w_src)), 0, k - 1);
        int i1 = std::clamp(static_cast<int>(std::ceil(hi / w_src)) - 1, 0, k - 1);
        double acc = 0.0;
        for (int i = i0; i <= i1; ++i) {
            const double a = std::max(lo, i * w_src);
            const double b = std::min(hi, (i + 1) * w_src);
            if (b > a) acc += segment_values[i] * (b - a);
        }
        out.segment_values[j] = acc / w_dst;
    }
    return out;
}

bool MarginalValueCurve::non_increasing(double tol) const {
    for (size_t i = 1; i < segment_values.size(); ++i)
        if (segment_values[i] > segment_values[i - 1] + tol) return false;
    return true;
}

namespace {

void write_double_text(std::string& buf, double v) {
    char tmp[32];
    std::snprintf(tmp, sizeof tmp, "%.17g", v);
    buf += tmp;
}

}  // namespace

void save_value_series(const ValueFunctionSeries& series, const std::string& path) {
    if (series.curves.empty()) throw InputError("save_value_series: empty series");
    const int k = series.num_segments();
    const int t = series.horizon();
    for (const auto& c : series.curves)
        if (c.num_segments() != k) throw InputError("save_value_series: segment counts differ");
    const bool text = path.size() >= 4 && path.compare(path.size() - 4, 4, ".txt") == 0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open for writing: " + path);
    std::string header = "ARBVF1 ";
    header += text ? "text" : "bin";
    header += '\n';
    char line[320];
    std::snprintf(line, sizeof line, "E %.17g K %d T %d dt %.17g P %.17g etac %.17g etad %.17g c %.17g\n",
                  series.curves.front().capacity_mwh, k, t, series.params.period_hours,
                  series.params.power_mw, series.params.eta_charge, series.params.eta_discharge,
                  series.params.marginal_cost);
    header += line;
    out << header;
    if (text) {
        std::string buf;
        for (const auto& c : series.curves) {
            buf.clear();
            for (int i = 0; i < k; ++i) {
                if (i) buf += ' ';
                write_double_text(buf, c.segment_values[i]);
            }
            buf += '\n';
            out << buf;
        }
    } else {
        for (const auto& c : series.curves)
            out.write(reinterpret_cast<const char*>(c.segment_values.data()),
                      static_cast<std::streamsize>(sizeof(double) * c.segment_values.size()));
    }
    if (!out) throw InputError("write failed: " + path);
}

ValueFunctionSeries load_value_series(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open: " + path);
    std::string magic, mode;
    in >> magic >> mode;
    if (magic != "ARBVF1" || (mode != "text" && mode != "bin"))
        throw InputError("not a value-series file: " + path);
    std::string key;
    double capacity = 0, dt = 0;
    int k = 0, t = -1;
    in >> key >> capacity;
    if (key != "E") throw InputError("value-series header: expected E");
    in >> key >> k;
    if (key != "K") throw InputError("value-series header: expected K");
    in >> key >> t;
    if (key != "T") throw InputError("value-series header: expected T");
    in >> key >> dt;
    if (key != "dt") throw InputError("value-series header: expected dt");
    double power = 0, etac = 0, etad = 0, cost = 0;
    in >> key >> power;
    if (key != "P") throw InputError("value-series header: expected P");
    in >> key >> etac;
    if (key != "etac") throw InputError("value-series header: expected etac");
    in >> key >> etad;
    if (key != "etad") throw InputError("value-series header: expected etad");
    in >> key >> cost;
    if (key != "c") throw InputError("value-series header: expected c");
    if (k < 1 || t < 0 || !(capacity > 0.0) || !(dt > 0.0))
        throw InputError("value-series header: bad dimensions");
    in.ignore(2, '\n');

    ValueFunctionSeries series;
    series.params.energy_mwh = capacity;
    series.params.period_hours = dt;
    series.params.power_mw = power;
    series.params.eta_charge = etac;
    series.params.eta_discharge = etad;
    series.params.marginal_cost = cost;
    series.curves.resize(static_cast<size_t>(t) + 1);
    for (auto& c : series.curves) {
        c.capacity_mwh = capacity;
        c.segment_values.resize(static_cast<size_t>(k));
        if (mode == "text") {
            for (int i = 0; i < k; ++i)
                if (!(in >> c.segment_values[i]))
                    throw InputError("value-series: truncated text payload in " + path);
        } else {
            in.read(reinterpret_cast<char*>(c.segment_values.data()),
                    static_cast<std::streamsize>(sizeof(double) * c.segment_values.size()));
            if (in.gcount() != static_cast<std::streamsize>(sizeof(double) * c.segment_values.size()))
                throw InputError("value-series: truncated binary payload in " + path);
        }
    }
    return series;
}

}  // namespace arb
