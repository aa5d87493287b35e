#pragma once

// Independent reference computations used by the unit tests and the
// acceptance checks. None of these call into the library kernels they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> m, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
        if (m[p][c] == 0.0) throw std::runtime_error("singular matrix");
        std::swap(m[p], m[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= m[i][k] * x[k];
        x[i] = s / m[i][i];
    }
    return x;
}

/// Lagrange form evaluated term by term.
inline double lagrange(std::span<const double> x, std::span<const double> y, double q) {
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        double l = 1.0;
        for (std::size_t k = 0; k < x.size(); ++k)
            if (k != j) l *= (q - x[k]) / (x[j] - x[k]);
        sum += y[j] * l;
    }
    return sum;
}

template <class Fn>
double simpson(Fn g, double a, double b, std::size_t intervals) {
    const double h = (b - a) / static_cast<double>(intervals);
    double sum = g(a) + g(b);
    for (std::size_t i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(a + h * static_cast<double>(i));
    return sum * h / 3.0;
}

/// Discounted E[payoff(S_T)] for lognormal S_T by composite Simpson in z on
/// [-12, 12], split at `kink` so that each piece is smooth.
template <class Payoff>
double lognormal_expectation(double spot, double tau, double rate, double yield, double vol, Payoff f, double kink,
                             std::size_t intervals = 20000) {
    const double sd = vol * std::sqrt(tau), mu = (rate - yield - 0.5 * vol * vol) * tau;
    const auto g = [&](double z) {
        return f(spot * std::exp(mu + sd * z)) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    };
    const double zk = std::clamp((std::log(kink / spot) - mu) / sd, -12.0, 12.0);
    return std::exp(-rate * tau) * (simpson(g, -12.0, zk, intervals) + simpson(g, zk, 12.0, intervals));
}

inline double bs_call(double spot, double strike, double tau, double rate, double yield, double vol) {
    return lognormal_expectation(
        spot, tau, rate, yield, vol, [&](double s) { return std::max(s - strike, 0.0); }, strike);
}

inline double bs_put(double spot, double strike, double tau, double rate, double yield, double vol) {
    return lognormal_expectation(
        spot, tau, rate, yield, vol, [&](double s) { return std::max(strike - s, 0.0); }, strike);
}

/// Star discrepancy of a one-dimensional point set.
inline double star_discrepancy(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double k = static_cast<double>(i);
        d = std::max({d, (k + 1.0) / n - x[i], x[i] - k / n});
    }
    return d;
}

/// Sobol' points for indices 0..7, dimensions 1..6, from an independent
/// reference implementation (unscrambled, 32 bits).
inline const std::vector<std::vector<double>>& sobol_prefix() {
    static const std::vector<std::vector<double>> p{
        {0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
        {0.5, 0.5, 0.5, 0.5, 0.5, 0.5},
        {0.75, 0.25, 0.25, 0.25, 0.75, 0.75},
        {0.25, 0.75, 0.75, 0.75, 0.25, 0.25},
        {0.375, 0.375, 0.625, 0.875, 0.375, 0.125},
        {0.875, 0.875, 0.125, 0.375, 0.875, 0.625},
        {0.625, 0.125, 0.875, 0.625, 0.625, 0.875},
        {0.125, 0.625, 0.375, 0.125, 0.125, 0.375},
    };
    return p;
}

struct SobolSample {
    std::size_t index;
    std::size_t dimension;  ///< 0-based coordinate
    double value;
};

/// Scattered coordinates of the same reference sequence at 1024 dimensions.
inline const std::vector<SobolSample>& sobol_samples() {
    static const std::vector<SobolSample> s{
        {37, 0, 0.921875},        {37, 1, 0.640625},        {37, 2, 0.578125},        {37, 5, 0.296875},
        {37, 9, 0.171875},        {37, 63, 0.828125},       {37, 511, 0.046875},      {37, 1023, 0.734375},
        {1000, 0, 0.2197265625},  {1000, 1, 0.0966796875},  {1000, 2, 0.5185546875},  {1000, 5, 0.9072265625},
        {1000, 9, 0.0693359375},  {1000, 63, 0.4462890625}, {1000, 511, 0.3955078125}, {1000, 1023, 0.7138671875},
        {1023, 0, 0.0009765625},  {1023, 1, 0.7529296875},  {1023, 2, 0.6123046875},  {1023, 5, 0.4384765625},
        {1023, 9, 0.8505859375},  {1023, 63, 0.0400390625}, {1023, 511, 0.6142578125}, {1023, 1023, 0.9951171875},
    };
    return s;
}

}  // namespace oracle
