#pragma once

#include <cstddef>
#include <vector>

#include "asian/analytics.hpp"
#include "asian/core.hpp"
#include "asian/full_pde.hpp"
#include "asian/pde_engine.hpp"

namespace asian {

struct HybridConfig {
    std::size_t ns = 800;
    std::size_t nt = 400;
    double equidistance_tolerance = 1e-9;
    /// Price non-equidistant schedules anyway, on an equidistant clock with the
    /// same first fixing, last fixing and count.
    bool force_equidistant = false;

    void validate() const {
        if (ns < 8 || nt < 8) throw ConfigError("hybrid node counts must be >= 8");
    }
};

/// Fixing clock handed to Curran's formula, measured from the first fixing.
inline std::vector<double> hybrid_fixing_clock(const Scenario& sc, const HybridConfig& cfg) {
    const auto& fx = sc.monitoring.fixings;
    const std::size_t n = fx.size();
    std::vector<double> clock(n);
    if (is_equidistant(fx, cfg.equidistance_tolerance)) {
        for (std::size_t i = 0; i < n; ++i) clock[i] = fx[i] - fx.front();
        return clock;
    }
    if (!cfg.force_equidistant)
        throw OutOfContractError("scenario '" + sc.label + "' has non-equidistant fixings; the Curran-based solver "
                                 "only accepts equidistant schedules");
    const double step = (fx.back() - fx.front()) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) clock[i] = static_cast<double>(i) * step;
    return clock;
}

/// Strike used in the terminal condition: K plus the strike shift of every
/// dividend paid after the first fixing.
inline double hybrid_effective_strike(const Scenario& sc) {
    const auto& fx = sc.monitoring.fixings;
    double strike = sc.option.strike;
    for (const auto& d : sc.dividends.payments) {
        if (d.amount <= 0.0 || d.time <= fx.front() + time_tolerance) continue;
        StrikeShiftInputs in{d.amount, d.time, fx, first_affected_fixing(fx, d.time), sc.market.rate,
                             sc.market.yield};
        strike += strike_shift(in, fx.size());
    }
    return strike;
}

/// Black-Scholes PDE from the first fixing back to today with Curran's
/// approximation (strike-shifted for later dividends) as terminal condition.
/// Dividends up to and including the first fixing are exact jump conditions.
inline PdeResult solve_hybrid(const Scenario& sc, const HybridConfig& cfg) {
    sc.validate();
    cfg.validate();
    const auto clock = hybrid_fixing_clock(sc, cfg);
    const double t1 = sc.monitoring.fixings.front();
    const double strike = hybrid_effective_strike(sc);
    const UniformGrid stock = space_grid_for(sc, cfg.ns);

    CurranInputs terminal{0.0, strike, clock, sc.market.rate, sc.market.yield, sc.market.vol,
                          sc.option.maturity - t1, cfg.equidistance_tolerance};
    ValueSlice slice(stock.size());
    for (std::size_t i = 0; i < stock.size(); ++i) {
        terminal.spot = stock[i];
        slice[i] = curran_price(terminal, sc.option.kind);
    }

    DividendSchedule early;
    for (const auto& d : sc.dividends.payments)
        if (d.amount > 0.0 && d.time <= t1 + time_tolerance) early.payments.push_back(d);
    const EventTimeline timeline = build_timeline({}, early);
    auto times = timeline.times();
    const TimeSegments seg = segment_time(times, t1, cfg.nt);

    // A dividend on t1 itself is paid before the first fixing observes the spot.
    if (!times.empty() && seg.bounds.back() == times.back())
        slice = apply_dividend_jump(slice, stock, *timeline.events.back().dividend);
    auto values = march_collapsed(std::move(slice), stock, sc.market, seg, timeline, seg.size());
    const double price = interpolate(stock, values, sc.market.spot);
    return {price, ValueCurve{stock, std::move(values)}};
}

}  // namespace asian
