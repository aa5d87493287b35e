#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "asian/core.hpp"
#include "asian/errors.hpp"

namespace asian {

/// Standard normal CDF.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// European Black-Scholes price with continuous yield; the payoff at tau = 0.
inline double bs_price(double spot, double strike, double tau, double rate, double yield, double vol,
                       OptionKind kind) {
    if (tau <= 0.0) return payoff(kind, spot, strike);
    const double df = std::exp(-rate * tau);
    const double fwd = spot * std::exp((rate - yield) * tau);
    const double sd = vol * std::sqrt(tau);
    if (sd <= 0.0 || spot <= 0.0) return df * payoff(kind, fwd, strike);
    const double d1 = (std::log(fwd / strike) + 0.5 * sd * sd) / sd;
    const double d2 = d1 - sd;
    if (kind == OptionKind::call) return df * (fwd * norm_cdf(d1) - strike * norm_cdf(d2));
    return df * (strike * norm_cdf(-d2) - fwd * norm_cdf(-d1));
}

/// Discretely monitored geometric-average option on a stock with a continuous
/// yield only. ln G is normal with mean m and variance v.
inline double geometric_asian_price(double spot, double strike, std::span<const double> fixings, double rate,
                                    double yield, double vol, double maturity, OptionKind kind) {
    const std::size_t n = fixings.size();
    if (n == 0) throw ConfigError("geometric Asian needs at least one fixing");
    const double df = std::exp(-rate * maturity);
    double mean_t = 0.0;
    for (double t : fixings) mean_t += t;
    mean_t /= static_cast<double>(n);
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += fixings[i];  // diagonal
        for (std::size_t j = i + 1; j < n; ++j) cov += 2.0 * std::min(fixings[i], fixings[j]);
    }
    const double v = vol * vol * cov / static_cast<double>(n * n);
    if (spot <= 0.0) return df * payoff(kind, 0.0, strike);
    const double m = std::log(spot) + (rate - yield - 0.5 * vol * vol) * mean_t;
    if (v <= 0.0) return df * payoff(kind, std::exp(m), strike);
    const double sd = std::sqrt(v);
    const double d1 = (m - std::log(strike) + v) / sd;
    const double d2 = d1 - sd;
    const double fwd = std::exp(m + 0.5 * v);
    if (kind == OptionKind::call) return df * (fwd * norm_cdf(d1) - strike * norm_cdf(d2));
    return df * (strike * norm_cdf(-d2) - fwd * norm_cdf(-d1));
}

struct CurranInputs {
    double spot = 100.0;
    double strike = 100.0;
    std::vector<double> fixings;  ///< measured from the valuation time, equidistant
    double rate = 0.0;
    double yield = 0.0;
    double vol = 0.0;
    double horizon = 1.0;  ///< discounting horizon (time to maturity)
    double equidistance_tolerance = 1e-9;

    void validate() const {
        if (fixings.empty()) throw ConfigError("Curran approximation needs at least one fixing");
        if (fixings.front() < 0.0) throw ConfigError("fixing times must be >= 0");
        for (std::size_t i = 1; i < fixings.size(); ++i)
            if (!(fixings[i] > fixings[i - 1])) throw ConfigError("fixing times must be strictly increasing");
        if (!(strike > 0.0)) throw ConfigError("strike must be > 0");
        if (!is_equidistant(fixings, equidistance_tolerance))
            throw OutOfContractError("Curran approximation requires equidistant fixings");
    }
};

/// Curran's approximation of a discrete arithmetic Asian option, conditioning
/// on the geometric average, in the formulation given by Haug.
inline double curran_price(const CurranInputs& in, OptionKind kind) {
    in.validate();
    const std::size_t n = in.fixings.size();
    const double nd = static_cast<double>(n);
    const double df = std::exp(-in.rate * in.horizon);
    const double b = in.rate - in.yield;
    const double strike = in.strike;

    double forward_avg = 0.0;
    for (double t : in.fixings) forward_avg += in.spot * std::exp(b * t);
    forward_avg /= nd;
    const double parity = df * (forward_avg - strike);  // call - put
    if (in.spot <= 0.0) return kind == OptionKind::call ? 0.0 : -parity;

    const double t1 = in.fixings.front();
    const double dt = n > 1 ? (in.fixings.back() - t1) / (nd - 1.0) : 0.0;
    const double s2 = in.vol * in.vol;
    const double drift = b - 0.5 * s2;
    const double ln_s = std::log(in.spot);

    const double mu = ln_s + drift * (t1 + 0.5 * (nd - 1.0) * dt);
    const double var_x = s2 * (t1 + dt * (nd - 1.0) * (2.0 * nd - 1.0) / (6.0 * nd));

    double call = 0.0;
    if (var_x <= 0.0) {
        call = df * std::max(forward_avg - strike, 0.0);
    } else {
        const double sd_x = std::sqrt(var_x);
        std::vector<double> mu_i(n), var_i(n), cov_i(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double i = static_cast<double>(k + 1);
            const double ti = t1 + (i - 1.0) * dt;
            mu_i[k] = ln_s + drift * ti;
            var_i[k] = s2 * ti;
            cov_i[k] = s2 * (t1 + dt * ((i - 1.0) - i * (i - 1.0) / (2.0 * nd)));
        }
        // Threshold for G at which E[A | G] is approximately the strike.
        double cond = 0.0;
        const double ln_k = std::log(strike);
        for (std::size_t k = 0; k < n; ++k)
            cond += std::exp(mu_i[k] + cov_i[k] * (ln_k - mu) / var_x +
                             0.5 * (var_i[k] - cov_i[k] * cov_i[k] / var_x));
        const double k_hat = 2.0 * strike - cond / nd;
        if (k_hat <= 0.0) {
            call = parity;
        } else {
            const double z = (mu - std::log(k_hat)) / sd_x;
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                sum += std::exp(mu_i[k] + 0.5 * var_i[k]) * norm_cdf(z + cov_i[k] / sd_x);
            call = df * (sum / nd - strike * norm_cdf(z));
        }
    }
    // Far out of the money the conditioning breaks down (the threshold turns
    // negative and the parity branch is taken). Keep the no-arbitrage bound.
    call = std::max({call, parity, 0.0});
    return kind == OptionKind::call ? call : call - parity;
}

struct StrikeShiftInputs {
    double amount = 0.0;          ///< dividend D
    double time = 0.0;            ///< dividend date t_D
    std::vector<double> fixings;  ///< all N fixing times
    std::size_t first_affected = 1;  ///< 1-based index of the first fixing at or after t_D
    double rate = 0.0;
    double yield = 0.0;
};

/// Index (1-based) of the first fixing not before `time`; a fixing on the
/// dividend date sees the post-dividend spot. Returns N + 1 when none.
inline std::size_t first_affected_fixing(std::span<const double> fixings, double time) {
    for (std::size_t i = 0; i < fixings.size(); ++i)
        if (fixings[i] >= time - time_tolerance) return i + 1;
    return fixings.size() + 1;
}

/// K_shift = (D/N) sum_{i >= n_aff} exp((r - q)(t_i - t_D)).
inline double strike_shift(const StrikeShiftInputs& in, std::size_t n) {
    if (n != in.fixings.size()) throw ConfigError("fixing count does not match the schedule");
    if (in.first_affected < 1) throw ConfigError("first affected fixing index is 1-based");
    double sum = 0.0;
    for (std::size_t i = in.first_affected; i <= n; ++i)
        sum += std::exp((in.rate - in.yield) * (in.fixings[i - 1] - in.time));
    return in.amount / static_cast<double>(n) * sum;
}

}  // namespace asian
