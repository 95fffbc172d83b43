#include "arb/storage.hpp"

#include "doctest.h"

using arb::Dispatch;
using arb::StorageParams;

namespace {

StorageParams small_asset() {
    StorageParams p;
    p.power_mw = 0.0417;
    p.period_hours = 1.0;
    p.energy_mwh = 1.0;
    p.eta_charge = 0.9;
    p.eta_discharge = 0.9;
    p.marginal_cost = 10.0;
    return p;
}

}  // namespace

TEST_CASE("storage params validate accepts defaults and rejects bad fields") {
    StorageParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.energy_per_period() == doctest::Approx(0.5 / 12.0));
    CHECK(p.duration_hours() == doctest::Approx(2.0));

    auto expect_reject = [](StorageParams bad) {
        CHECK_THROWS_AS(bad.validate(), arb::ConfigError);
    };
    StorageParams q = p;
    q.power_mw = 0.0;
    expect_reject(q);
    q = p;
    q.energy_mwh = -1.0;
    expect_reject(q);
    q = p;
    q.eta_charge = 0.0;
    expect_reject(q);
    q = p;
    q.eta_charge = 1.2;
    expect_reject(q);
    q = p;
    q.eta_discharge = -0.1;
    expect_reject(q);
    q = p;
    q.marginal_cost = -1.0;
    expect_reject(q);
    q = p;
    q.period_hours = 0.0;
    expect_reject(q);
}

TEST_CASE("step_soc follows the SoC evolution rule") {
    StorageParams unit;
    unit.eta_charge = unit.eta_discharge = 1.0;
    CHECK(arb::step_soc(unit, 0.5, 0.1, 0.0) == doctest::Approx(0.6));

    StorageParams ninety;
    ninety.eta_charge = ninety.eta_discharge = 0.9;
    CHECK(arb::step_soc(ninety, 0.5, 0.0, 0.09) == doctest::Approx(0.4));
    CHECK(arb::step_soc(ninety, 0.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("feasible enforces power, SoC, evolution, and negative-price rules") {
    const StorageParams p = small_asset();

    Dispatch idle{0.0, 0.0, 0.5};
    CHECK(arb::feasible(p, 0.5, idle, 20.0));

    Dispatch sell{0.0, 0.0417, 0.5 - 0.0417 / 0.9};
    CHECK_FALSE(arb::feasible(p, 0.5, sell, -5.0));  // discharge banned below zero
    CHECK(arb::feasible(p, 0.5, sell, 5.0));

    Dispatch buy{0.0417, 0.0, 0.5 + 0.0417 * 0.9};
    CHECK(arb::feasible(p, 0.5, buy, -5.0));  // charging at negative prices is fine

    Dispatch too_big{0.05, 0.0, 0.5 + 0.05 * 0.9};
    CHECK_FALSE(arb::feasible(p, 0.5, too_big, 20.0));

    Dispatch wrong_end{0.0, 0.0417, 0.5};  // end SoC does not match the evolution
    CHECK_FALSE(arb::feasible(p, 0.5, wrong_end, 20.0));

    Dispatch overfull{0.0417, 0.0, 1.0 + 0.0417 * 0.9};
    CHECK_FALSE(arb::feasible(p, 1.0, overfull, 20.0));

    // Shrinking an action toward idle keeps feasibility.
    Dispatch half_sell{0.0, 0.02, 0.5 - 0.02 / 0.9};
    CHECK(arb::feasible(p, 0.5, half_sell, 5.0));
}
