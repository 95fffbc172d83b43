#include "arb/storage.hpp"

#include <cmath>
#include <string>

namespace arb {

void StorageParams::validate() const {
    auto bad = [](const std::string& msg) { throw ConfigError("storage params: " + msg); };
    if (!(power_mw > 0.0) || !std::isfinite(power_mw)) bad("power rating must be > 0");
    if (!(energy_mwh > 0.0) || !std::isfinite(energy_mwh)) bad("energy capacity must be > 0");
    if (!(eta_charge > 0.0 && eta_charge <= 1.0)) bad("charge efficiency must be in (0,1]");
    if (!(eta_discharge > 0.0 && eta_discharge <= 1.0)) bad("discharge efficiency must be in (0,1]");
    if (!(marginal_cost >= 0.0) || !std::isfinite(marginal_cost)) bad("marginal cost must be >= 0");
    if (!(period_hours > 0.0) || !std::isfinite(period_hours)) bad("period length must be > 0");
    if (!(energy_per_period() > 0.0)) bad("per-period energy cap must be > 0");
}

double step_soc(const StorageParams& params, double soc_prev, double charge_mwh,
                double discharge_mwh) {
    return soc_prev - discharge_mwh / params.eta_discharge + charge_mwh * params.eta_charge;
}

bool feasible(const StorageParams& params, double soc_prev, const Dispatch& d,
              double price) {
    const double cap = params.energy_per_period();
    if (d.charge_mwh < -kSocTol || d.charge_mwh > cap + kSocTol) return false;
    if (d.discharge_mwh < -kSocTol || d.discharge_mwh > cap + kSocTol) return false;
    if (price < 0.0 && d.discharge_mwh > kSocTol) return false;
    const double soc = step_soc(params, soc_prev, d.charge_mwh, d.discharge_mwh);
    if (std::abs(soc - d.soc_end_mwh) > kSocTol) return false;
    if (d.soc_end_mwh < -kSocTol || d.soc_end_mwh > params.energy_mwh + kSocTol) return false;
    return true;
}

}  // namespace arb
