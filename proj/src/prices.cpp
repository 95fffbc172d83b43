#include "arb/prices.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace arb {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    year = static_cast<int>(y + (month <= 2));
}

std::string format_timestamp(std::int64_t epoch_sec) {
    std::int64_t days = epoch_sec / 86400;
    std::int64_t rem = epoch_sec % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::int64_t PriceSeries::period_seconds() const {
    return static_cast<std::int64_t>(std::llround(period_hours * 3600.0));
}

PriceSignal PriceSeries::signal(int t) const {
    PriceSignal s;
    s.rtp = rtp[t];
    s.dap_day = dap_for(t);
    s.timestamp = timestamp(t);
    return s;
}

PriceSeries PriceSeries::slice(int from, int count) const {
    if (from < 0 || count < 0 || from + count > num_periods())
        throw InputError("slice: range outside series");
    PriceSeries out;
    out.start_epoch_sec = timestamp(from);
    out.period_hours = period_hours;
    out.zone = zone;
    out.rtp.assign(rtp.begin() + from, rtp.begin() + from + count);
    out.hour_of_period.assign(hour_of_period.begin() + from, hour_of_period.begin() + from + count);
    // Re-index the day table to the days actually used.
    std::map<std::int32_t, std::int32_t> remap;
    out.day_of_period.reserve(count);
    for (int i = from; i < from + count; ++i) {
        if (day_of_period[i] < 0) {  // series without day-ahead prices
            out.day_of_period.push_back(-1);
            continue;
        }
        auto [it, fresh] = remap.emplace(day_of_period[i], static_cast<std::int32_t>(out.dap_days.size()));
        if (fresh) out.dap_days.push_back(dap_days[day_of_period[i]]);
        out.day_of_period.push_back(it->second);
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '"')) f.erase(f.begin());
        while (!f.empty() && (f.back() == ' ' || f.back() == '"')) f.pop_back();
    }
    return fields;
}

bool parse_timestamp(const std::string& text, std::int64_t& out) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s) >= 6 &&
        (sep == ' ' || sep == 'T')) {
        // seconds optional
    } else if (std::sscanf(text.c_str(), "%d/%d/%d %d:%d:%d", &mo, &d, &y, &h, &mi, &s) >= 5) {
        // NYISO-style MM/DD/YYYY
    } else {
        return false;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 ||
        s > 59)
        return false;
    out = days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
    return true;
}

bool parse_date(const std::string& text, std::int64_t& day_out) {
    int y = 0, mo = 0, d = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%d", &y, &mo, &d) != 3) return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return false;
    day_out = days_from_civil(y, mo, d);
    return true;
}

struct RawRows {
    std::vector<std::int64_t> ts;
    std::vector<double> price;
};

RawRows read_price_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty file: " + path);
    const auto header = split_csv_line(line);
    int ts_col = -1, price_col = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == schema.timestamp_column) ts_col = static_cast<int>(i);
        if (header[i] == schema.price_column) price_col = static_cast<int>(i);
    }
    if (ts_col < 0)
        throw InputError(path + ": timestamp column '" + schema.timestamp_column + "' not found");
    if (price_col < 0)
        throw InputError(path + ": price column '" + schema.price_column + "' not found");

    RawRows rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) <= std::max(ts_col, price_col))
            throw InputError(path + ":" + std::to_string(line_no) + ": too few columns");
        std::int64_t ts;
        if (!parse_timestamp(fields[ts_col], ts))
            throw InputError(path + ":" + std::to_string(line_no) + ": unparseable timestamp '" +
                             fields[ts_col] + "'");
        char* end = nullptr;
        const double v = std::strtod(fields[price_col].c_str(), &end);
        if (end == fields[price_col].c_str() || !std::isfinite(v))
            throw InputError(path + ":" + std::to_string(line_no) + ": unparseable price '" +
                             fields[price_col] + "'");
        rows.ts.push_back(ts);
        rows.price.push_back(v);
    }
    if (rows.ts.empty()) throw InputError("no data rows in " + path);
    return rows;
}

std::string date_of(std::int64_t epoch_sec) {
    int y, m, d;
    civil_from_days(epoch_sec >= 0 ? epoch_sec / 86400 : (epoch_sec - 86399) / 86400, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return buf;
}

}  // namespace

PriceSeries load_prices(const std::string& rtp_path, const std::string& dap_path,
                        const CsvSchema& schema) {
    if (!(schema.period_hours > 0.0)) throw ConfigError("schema: period length must be > 0");
    const std::int64_t dt = static_cast<std::int64_t>(std::llround(schema.period_hours * 3600.0));
    if (dt <= 0) throw ConfigError("schema: period length too small");

    std::int64_t from_sec = INT64_MIN, to_sec = INT64_MAX;
    if (!schema.date_from.empty()) {
        std::int64_t day;
        if (!parse_date(schema.date_from, day)) throw ConfigError("bad date_from: " + schema.date_from);
        from_sec = day * 86400;
    }
    if (!schema.date_to.empty()) {
        std::int64_t day;
        if (!parse_date(schema.date_to, day)) throw ConfigError("bad date_to: " + schema.date_to);
        to_sec = (day + 1) * 86400;  // inclusive end date
    }

    RawRows rtp = read_price_csv(rtp_path, schema);

    PriceSeries series;
    series.period_hours = schema.period_hours;
    std::int64_t prev_ts = 0;
    bool first = true;
    for (size_t i = 0; i < rtp.ts.size(); ++i) {
        const std::int64_t ts = rtp.ts[i];
        if (ts < from_sec || ts >= to_sec) continue;
        if (first) {
            series.start_epoch_sec = ts;
            series.rtp.push_back(rtp.price[i]);
            prev_ts = ts;
            first = false;
            continue;
        }
        if (ts <= prev_ts)
            throw InputError(rtp_path + ": duplicate or out-of-order timestamp " +
                             format_timestamp(ts));
        const std::int64_t gap = ts - prev_ts;
        if (gap % dt != 0)
            throw InputError(rtp_path + ": timestamp " + format_timestamp(ts) +
                             " is off the period grid");
        const std::int64_t missing = gap / dt - 1;
        if (missing > 0) {
            if (gap > 3600 + dt)
                throw InputError(rtp_path + ": gap longer than one hour before " +
                                 format_timestamp(ts));
            std::cerr << "warning: " << rtp_path << ": filled " << missing
                      << " missing period(s) before " << format_timestamp(ts)
                      << " by carry-forward\n";
            for (std::int64_t g = 0; g < missing; ++g) series.rtp.push_back(series.rtp.back());
        }
        series.rtp.push_back(rtp.price[i]);
        prev_ts = ts;
    }
    if (series.rtp.empty()) throw InputError(rtp_path + ": no rows in requested date range");

    const int n = series.num_periods();
    series.day_of_period.resize(n);
    series.hour_of_period.resize(n);
    if (dap_path.empty()) {  // day-ahead prices are optional
        for (int t = 0; t < n; ++t) {
            series.day_of_period[t] = -1;
            series.hour_of_period[t] =
                static_cast<std::int8_t>(series.timestamp(t) % 86400 / 3600);
        }
        return series;
    }

    // Hourly day-ahead rows grouped by operating day.
    RawRows dap = read_price_csv(dap_path, schema);
    std::map<std::int64_t, std::array<double, 24>> days;
    std::map<std::int64_t, int> seen;
    for (size_t i = 0; i < dap.ts.size(); ++i) {
        const std::int64_t day = dap.ts[i] / 86400;
        const int hour = static_cast<int>(dap.ts[i] % 86400) / 3600;
        if (dap.ts[i] % 3600 != 0)
            throw InputError(dap_path + ": day-ahead timestamp " + format_timestamp(dap.ts[i]) +
                             " is not on the hour");
        auto& arr = days[day];
        if (seen[day] & (1 << hour))
            throw InputError(dap_path + ": duplicate day-ahead hour " + format_timestamp(dap.ts[i]));
        seen[day] |= 1 << hour;
        arr[hour] = dap.price[i];
    }

    std::map<std::int64_t, std::int32_t> day_index;
    for (int t = 0; t < n; ++t) {
        const std::int64_t ts = series.timestamp(t);
        const std::int64_t day = ts / 86400;
        auto [it, fresh] = day_index.emplace(day, static_cast<std::int32_t>(series.dap_days.size()));
        if (fresh) {
            auto found = days.find(day);
            if (found == days.end() || seen[day] != (1 << 24) - 1)
                throw InputError(dap_path + ": missing or incomplete day-ahead prices for " +
                                 date_of(ts));
            series.dap_days.push_back(found->second);
        }
        series.day_of_period[t] = it->second;
        series.hour_of_period[t] = static_cast<std::int8_t>(ts % 86400 / 3600);
    }
    return series;
}

void save_prices(const PriceSeries& series, const std::string& rtp_path,
                 const std::string& dap_path, const CsvSchema& schema) {
    std::ofstream rtp(rtp_path);
    if (!rtp) throw InputError("cannot open for writing: " + rtp_path);
    rtp << schema.timestamp_column << ',' << schema.price_column << '\n';
    char buf[64];
    for (int t = 0; t < series.num_periods(); ++t) {
        std::snprintf(buf, sizeof buf, "%.17g", series.rtp[t]);
        rtp << format_timestamp(series.timestamp(t)) << ',' << buf << '\n';
    }
    if (!rtp) throw InputError("write failed: " + rtp_path);

    std::ofstream dap(dap_path);
    if (!dap) throw InputError("cannot open for writing: " + dap_path);
    dap << schema.timestamp_column << ',' << schema.price_column << '\n';
    // Emit each operating day once, in period order.
    std::vector<char> written(series.dap_days.size(), 0);
    for (int t = 0; t < series.num_periods(); ++t) {
        const std::int32_t d = series.day_of_period[t];
        if (d < 0 || written[d]) continue;
        written[d] = 1;
        const std::int64_t day_start = series.timestamp(t) / 86400 * 86400;
        for (int h = 0; h < 24; ++h) {
            std::snprintf(buf, sizeof buf, "%.17g", series.dap_days[d][h]);
            dap << format_timestamp(day_start + h * 3600) << ',' << buf << '\n';
        }
    }
    if (!dap) throw InputError("write failed: " + dap_path);
}

namespace {

double next_u01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Two-peaked daily price shape in [-1, 1], hour in [0, 24).
double daily_shape(double hour) {
    const double x = hour / 24.0 * 2.0 * 3.14159265358979323846;
    return 0.72 * std::sin(x - 2.3) + 0.28 * std::sin(2.0 * x - 1.1);
}

}  // namespace

PriceSeries synth_prices(std::uint64_t seed, int days, double period_hours,
                         const SynthProfile& profile, const std::string& zone) {
    if (days < 1) throw ConfigError("synth_prices: days must be >= 1");
    if (!(period_hours > 0.0) || period_hours > 24.0)
        throw ConfigError("synth_prices: bad period length");
    const int per_day = static_cast<int>(std::llround(24.0 / period_hours));
    if (per_day < 1 || std::abs(per_day * period_hours - 24.0) > 1e-9)
        throw ConfigError("synth_prices: period length must divide 24h");

    std::mt19937_64 rng(seed);
    PriceSeries series;
    series.period_hours = period_hours;
    series.zone = zone;
    series.start_epoch_sec = days_from_civil(2021, 1, 1) * 86400;
    series.rtp.reserve(static_cast<size_t>(days) * per_day);

    const double noise_half = profile.noise_std * 1.7320508075688772;      // uniform, same std
    const double dap_half = profile.dap_noise_std * 1.7320508075688772;

    for (int d = 0; d < days; ++d) {
        const double day_scale = 0.75 + 0.6 * next_u01(rng);  // known day-ahead
        std::array<double, 24> dap{};
        for (int h = 0; h < 24; ++h) {
            const double u = next_u01(rng);
            dap[h] = profile.base_level +
                     profile.daily_amplitude * day_scale * daily_shape(h + 0.5) +
                     dap_half * (2.0 * u - 1.0);
        }
        series.dap_days.push_back(dap);
        for (int i = 0; i < per_day; ++i) {
            const double hour = (i + 0.5) * period_hours;
            const double shape = daily_shape(hour);
            const double u_noise = next_u01(rng);
            const double u_spike = next_u01(rng);
            const double u_neg = next_u01(rng);
            const double u_mag = next_u01(rng);
            double price = profile.base_level + profile.daily_amplitude * day_scale * shape +
                           noise_half * (2.0 * u_noise - 1.0);
            if (u_spike < profile.spike_prob * (1.0 + std::max(0.0, shape)))
                price += profile.spike_magnitude * (0.5 + u_mag);
            else if (u_neg < profile.negative_prob * (1.0 + std::max(0.0, -shape)))
                price = -profile.negative_magnitude * (0.2 + u_mag);
            series.rtp.push_back(price);
            series.day_of_period.push_back(d);
            series.hour_of_period.push_back(static_cast<std::int8_t>(hour));
        }
    }
    return series;
}

}  // namespace arb
