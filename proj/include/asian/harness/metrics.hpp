#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "asian/errors.hpp"
#include "asian/full_pde.hpp"
#include "asian/monte_carlo.hpp"

namespace asian::harness {

inline constexpr std::size_t lattice_points = 161;

/// Evaluation points spanning [0.6K, 1.4K].
inline std::vector<double> evaluation_lattice(double strike) {
    std::vector<double> x(lattice_points);
    for (std::size_t i = 0; i < lattice_points; ++i)
        x[i] = strike * (0.6 + 0.8 * static_cast<double>(i) / static_cast<double>(lattice_points - 1));
    return x;
}

inline std::vector<double> on_lattice(const ValueCurve& curve, double strike) {
    std::vector<double> v;
    v.reserve(lattice_points);
    for (double s : evaluation_lattice(strike)) v.push_back(curve.at(s));
    return v;
}

/// max |v - ref| / ref over paired lattice values.
inline double max_rel_error(std::span<const double> values, std::span<const double> reference) {
    if (values.size() != reference.size()) throw ConfigError("curves are sampled on different lattices");
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (reference[i] == 0.0) throw ConfigError("reference value is zero on the evaluation interval");
        worst = std::max(worst, std::abs(values[i] - reference[i]) / std::abs(reference[i]));
    }
    return worst;
}

inline double max_rel_error(const ValueCurve& curve, const ValueCurve& reference, double strike) {
    return max_rel_error(on_lattice(curve, strike), on_lattice(reference, strike));
}

inline std::vector<double> richardson(std::span<const double> coarse, std::span<const double> fine) {
    std::vector<double> out(coarse.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    return out;
}

struct VarianceSample {
    double rel_std_dev = 0.0;
    double mean = 0.0;       ///< average of the outer estimates
    double seconds = 0.0;    ///< wall time per outer estimate
};

/// Seed of outer sample i.
inline std::uint64_t outer_seed(std::uint64_t seed, std::size_t i) { return counter_hash(seed, 0x6f75746572ULL, i); }

/// (1/V_ref) sqrt(sum_i (V_i - V_ref)^2 / (R_outer - 1)) over R_outer independent
/// estimates. RQMC estimates use `inner_replicates` shifts of paths/inner points.
inline VarianceSample rel_std_dev(const Scenario& sc, McMethod method, std::size_t paths, std::size_t outer,
                                  std::uint64_t seed, double reference, std::size_t inner_replicates = 1,
                                  const EstimatorOptions& opt = {}) {
    if (outer < 2) throw ConfigError("at least two outer samples are required");
    if (!std::isfinite(reference) || reference == 0.0) throw ConfigError("a nonzero reference value is required");
    const auto start = std::chrono::steady_clock::now();
    double sq = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < outer; ++i) {
        const auto s = outer_seed(seed, i);
        const double v = is_rqmc(method)
                             ? estimate_rqmc(sc, method == McMethod::rqmc_cv, paths, inner_replicates, s, opt).value
                             : estimate(sc, method, paths, 1, s, opt).value;
        sq += (v - reference) * (v - reference);
        sum += v;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    VarianceSample out;
    out.rel_std_dev = std::sqrt(sq / static_cast<double>(outer - 1)) / std::abs(reference);
    out.mean = sum / static_cast<double>(outer);
    out.seconds = secs / static_cast<double>(outer);
    return out;
}

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t used = 0;  ///< leading rows entering the fit
};

/// Least-squares line through (log x, log y).
inline SlopeFit fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("slope fit needs positive values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw ConfigError("slope fit needs distinct resolutions");
    SlopeFit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    f.used = x.size();
    return f;
}

/// Rows kept before the approximation floor: the first row whose error fell by
/// less than 25% against its predecessor, and everything after it, is dropped.
inline std::size_t knee_cutoff(std::span<const double> errors) {
    for (std::size_t i = 1; i < errors.size(); ++i)
        if (errors[i] > 0.75 * errors[i - 1]) return i;
    return errors.size();
}

}  // namespace asian::harness
