#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "asian/errors.hpp"

namespace asian {

/// Absolute tolerance used when comparing event times given in year fractions.
inline constexpr double time_tolerance = 1e-12;

inline bool same_time(double a, double b) { return std::abs(a - b) <= time_tolerance; }

enum class OptionKind { call, put };

inline const char* to_string(OptionKind kind) { return kind == OptionKind::call ? "call" : "put"; }

struct MarketParams {
    double spot = 100.0;
    double rate = 0.0;   ///< continuously compounded interest rate r
    double yield = 0.0;  ///< continuous dividend (convenience) yield
    double vol = 0.0;    ///< annualized volatility

    /// Cost of carry r - yield.
    double carry() const { return rate - yield; }

    void validate() const {
        if (!(vol >= 0.0) || !std::isfinite(vol)) throw ConfigError("volatility must be finite and >= 0");
        if (!(spot >= 0.0) || !std::isfinite(spot)) throw ConfigError("spot must be finite and >= 0");
        if (!std::isfinite(rate) || !std::isfinite(yield)) throw ConfigError("rate and yield must be finite");
    }
};

struct OptionSpec {
    double strike = 100.0;
    double maturity = 1.0;
    OptionKind kind = OptionKind::call;

    void validate() const {
        if (!(strike > 0.0) || !std::isfinite(strike)) throw ConfigError("strike must be > 0");
        if (!(maturity > 0.0) || !std::isfinite(maturity)) throw ConfigError("maturity must be > 0");
    }
};

struct MonitoringSchedule {
    std::vector<double> fixings;

    std::size_t size() const { return fixings.size(); }

    void validate(double maturity) const {
        if (fixings.empty()) throw ConfigError("at least one fixing is required");
        for (std::size_t i = 0; i < fixings.size(); ++i) {
            const double t = fixings[i];
            if (!(t > 0.0) || t > maturity + time_tolerance)
                throw ConfigError("fixing times must lie in (0, T]");
            if (i > 0 && !(t > fixings[i - 1] + time_tolerance))
                throw ConfigError("fixing times must be strictly increasing");
        }
    }
};

struct Dividend {
    double time = 0.0;
    double amount = 0.0;
};

struct DividendSchedule {
    std::vector<Dividend> payments;

    bool empty() const { return payments.empty(); }

    void validate(double maturity) const {
        for (std::size_t i = 0; i < payments.size(); ++i) {
            const auto& d = payments[i];
            if (!(d.amount >= 0.0) || !std::isfinite(d.amount)) throw ConfigError("dividend amounts must be >= 0");
            if (!(d.time > 0.0) || d.time > maturity + time_tolerance)
                throw ConfigError("dividend times must lie in (0, T]");
            if (i > 0 && !(d.time > payments[i - 1].time + time_tolerance))
                throw ConfigError("dividend times must be strictly increasing");
        }
    }

    /// The same schedule without zero-amount payments; a zero dividend is not an event.
    DividendSchedule nonzero() const {
        DividendSchedule out;
        std::copy_if(payments.begin(), payments.end(), std::back_inserter(out.payments),
                     [](const Dividend& d) { return d.amount > 0.0; });
        return out;
    }
};

struct Scenario {
    MarketParams market;
    OptionSpec option;
    MonitoringSchedule monitoring;
    DividendSchedule dividends;
    std::string label;

    void validate() const {
        market.validate();
        option.validate();
        monitoring.validate(option.maturity);
        dividends.validate(option.maturity);
    }
};

/// Events sharing one instant. In forward time the dividend is paid before the
/// fixing observes the spot.
struct TimelineEvent {
    double time = 0.0;
    std::optional<double> dividend;   ///< amount
    std::optional<std::size_t> fixing;  ///< 1-based fixing ordinal
};

struct EventTimeline {
    std::vector<TimelineEvent> events;

    std::size_t size() const { return events.size(); }
    std::vector<double> times() const {
        std::vector<double> t;
        t.reserve(events.size());
        for (const auto& e : events) t.push_back(e.time);
        return t;
    }
};

/// Merges fixings and dividends into one time-ordered list, fusing coincident
/// times into a single event.
inline EventTimeline build_timeline(const MonitoringSchedule& monitoring, const DividendSchedule& dividends) {
    EventTimeline out;
    const auto& fx = monitoring.fixings;
    const auto& dv = dividends.payments;
    std::size_t i = 0, j = 0;
    while (i < fx.size() || j < dv.size()) {
        TimelineEvent ev;
        if (j < dv.size() && (i == fx.size() || dv[j].time < fx[i] - time_tolerance)) {
            ev.time = dv[j].time;
            ev.dividend = dv[j].amount;
            ++j;
        } else if (i < fx.size() && (j == dv.size() || fx[i] < dv[j].time - time_tolerance)) {
            ev.time = fx[i];
            ev.fixing = i + 1;
            ++i;
        } else {
            ev.time = fx[i];
            ev.dividend = dv[j].amount;
            ev.fixing = i + 1;
            ++i;
            ++j;
        }
        out.events.push_back(ev);
    }
    return out;
}

inline double payoff(OptionKind kind, double average, double strike) {
    return kind == OptionKind::call ? std::max(average - strike, 0.0) : std::max(strike - average, 0.0);
}

/// Running arithmetic average after the n-th fixing observes `spot`.
inline double update_running_average(double average, std::size_t ordinal, double spot) {
    const double n = static_cast<double>(ordinal);
    return ((n - 1.0) * average + spot) / n;
}

/// Risk-neutral E[S_t] when dividends shift the spot down by their full amount.
inline double expected_spot(const Scenario& sc, double t) {
    const double b = sc.market.carry();
    double f = sc.market.spot * std::exp(b * t);
    for (const auto& d : sc.dividends.payments)
        if (d.time <= t + time_tolerance) f -= d.amount * std::exp(b * (t - d.time));
    return f;
}

/// e^{-rT}(E[A_T] - K): call minus put under the pure-shift dividend model.
inline double discounted_forward_average_minus_strike(const Scenario& sc) {
    double sum = 0.0;
    for (double t : sc.monitoring.fixings) sum += expected_spot(sc, t);
    const double avg = sum / static_cast<double>(sc.monitoring.size());
    return std::exp(-sc.market.rate * sc.option.maturity) * (avg - sc.option.strike);
}

/// Discounted payoff of the deterministic path obtained with zero volatility,
/// with the spot floored at zero after each dividend.
inline double deterministic_price(const Scenario& sc, double spot) {
    const auto timeline = build_timeline(sc.monitoring, sc.dividends);
    const double b = sc.market.carry();
    double s = spot, t = 0.0, avg = 0.0;
    for (const auto& ev : timeline.events) {
        s *= std::exp(b * (ev.time - t));
        t = ev.time;
        if (ev.dividend) s = std::max(s - *ev.dividend, 0.0);
        if (ev.fixing) avg = update_running_average(avg, *ev.fixing, s);
    }
    return std::exp(-sc.market.rate * sc.option.maturity) * payoff(sc.option.kind, avg, sc.option.strike);
}

inline double deterministic_price(const Scenario& sc) { return deterministic_price(sc, sc.market.spot); }

/// True when consecutive gaps differ from the mean gap by at most rel_tol times it.
inline bool is_equidistant(const std::vector<double>& times, double rel_tol) {
    if (times.size() < 3) return true;
    const double step = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs((times[i] - times[i - 1]) - step) > rel_tol * step) return false;
    return true;
}

}  // namespace asian
