#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asian/analytics.hpp"
#include "asian/core.hpp"
#include "asian/parallel.hpp"
#include "asian/sobol.hpp"

namespace asian {

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

/// Exact risk-neutral GBM step from t0 to t1 driven by the standard normal z.
inline double gbm_step(double spot, double t0, double t1, double z, const MarketParams& market) {
    const double dt = t1 - t0;
    const double s2 = market.vol * market.vol;
    return spot * std::exp((market.carry() - 0.5 * s2) * dt + market.vol * std::sqrt(dt) * z);
}

inline constexpr double box_muller_floor = 1e-16;

/// Basic (trigonometric) Box-Muller transform.
inline std::pair<double, double> box_muller(double u1, double u2) {
    const double r = std::sqrt(-2.0 * std::log(std::max(u1, box_muller_floor)));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

/// Component-wise frac(x + s).
inline void random_shift(std::span<double> point, std::span<const double> shift) {
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double y = point[i] + shift[i];
        point[i] = y >= 1.0 ? y - 1.0 : y;
    }
}

inline std::vector<double> random_shift(std::vector<double> point, std::span<const double> shift) {
    random_shift(std::span<double>(point), shift);
    return point;
}

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based 64-bit value keyed by (seed, stream, counter).
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

/// Uniform on [0, 1) with 53 random bits.
inline double to_unit_interval(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1p-53; }

// ---------------------------------------------------------------------------
// Normal sources
// ---------------------------------------------------------------------------

/// Produces exactly `dimension` standard normals per path. Uniform coordinates
/// (2k, 2k+1) pass through Box-Muller to give the normals of steps 2k, 2k+1; for
/// odd dimension the last pair's second normal is discarded.
class NormalSource {
public:
    enum class Kind { pseudo_random, sobol, shifted_sobol };

    static NormalSource pseudo_random(std::size_t dimension, std::uint64_t seed) {
        NormalSource s(Kind::pseudo_random, dimension);
        s.engine_.seed(mix64(seed));
        return s;
    }

    /// Unshifted Sobol'; the origin (index 0) is skipped.
    static NormalSource sobol(std::size_t dimension) {
        NormalSource s(Kind::sobol, dimension);
        s.init_sobol(1);
        return s;
    }

    /// Sobol' with a mod-1 random shift; all indices from 0 are used.
    static NormalSource shifted_sobol(std::size_t dimension, std::vector<double> shift) {
        NormalSource s(Kind::shifted_sobol, dimension);
        if (shift.size() != s.padded_) throw ConfigError("shift vector has the wrong dimension");
        for (double x : shift)
            if (!(x >= 0.0 && x < 1.0)) throw ConfigError("shift components must lie in [0, 1)");
        s.shift_ = std::move(shift);
        s.init_sobol(0);
        return s;
    }

    /// Shift vector for replicate `replicate` derived from `seed`.
    static std::vector<double> derive_shift(std::size_t dimension, std::uint64_t seed, std::uint64_t replicate) {
        std::vector<double> shift(padded_dimension(dimension));
        for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = to_unit_interval(counter_hash(seed, replicate, i));
        return shift;
    }

    static std::size_t padded_dimension(std::size_t d) { return d + (d % 2); }

    Kind kind() const { return kind_; }
    std::size_t dimension() const { return dim_; }

    void next(std::span<double> normals) {
        if (normals.size() != dim_) throw ConfigError("normal draw has the wrong dimension");
        if (kind_ == Kind::pseudo_random) {
            for (auto& u : uniform_) u = 1.0 - to_unit_interval(engine_());
        } else {
            cursor_->next(uniform_);
            if (kind_ == Kind::shifted_sobol) random_shift(std::span<double>(uniform_), shift_);
        }
        for (std::size_t k = 0; k < padded_; k += 2) {
            const auto [z1, z2] = box_muller(uniform_[k], uniform_[k + 1]);
            normals[k] = z1;
            if (k + 1 < dim_) normals[k + 1] = z2;
        }
    }

private:
    NormalSource(Kind kind, std::size_t dimension)
        : kind_(kind), dim_(dimension), padded_(padded_dimension(dimension)), uniform_(padded_) {
        if (dimension == 0) throw ConfigError("normal source dimension must be >= 1");
    }

    void init_sobol(std::uint64_t start) {
        generator_ = std::make_shared<SobolGenerator>(padded_);
        cursor_ = std::make_shared<SobolGenerator::Cursor>(*generator_, start);
    }

    Kind kind_;
    std::size_t dim_, padded_;
    std::vector<double> uniform_;
    std::mt19937_64 engine_;
    std::shared_ptr<SobolGenerator> generator_;
    std::shared_ptr<SobolGenerator::Cursor> cursor_;
    std::vector<double> shift_;
};

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

/// Discounted payoffs of one pair of trajectories driven by the same normals.
struct PathOutcome {
    double target = 0.0;   ///< arithmetic-average payoff on the dividend-paying path
    double control = 0.0;  ///< geometric-average payoff on the dividend-free path
};

enum class PayoffTarget {
    arithmetic,
    /// Test hook: the geometric payoff, but taken on the dividend-paying path.
    geometric,
};

/// Precomputed stepping data for a scenario: one step per distinct event time.
class PathModel {
public:
    explicit PathModel(const Scenario& sc, PayoffTarget target = PayoffTarget::arithmetic)
        : kind_(sc.option.kind), strike_(sc.option.strike), target_(target) {
        sc.validate();
        const auto timeline = build_timeline(sc.monitoring, sc.dividends.nonzero());
        const double s2 = sc.market.vol * sc.market.vol;
        double t = 0.0;
        for (const auto& ev : timeline.events) {
            const double dt = ev.time - t;
            drift_.push_back((sc.market.carry() - 0.5 * s2) * dt);
            diffusion_.push_back(sc.market.vol * std::sqrt(dt));
            dividend_.push_back(ev.dividend.value_or(0.0));
            fixing_.push_back(ev.fixing.value_or(0));
            t = ev.time;
        }
        log_spot_ = std::log(sc.market.spot);
        discount_ = std::exp(-sc.market.rate * sc.option.maturity);
        n_fix_ = static_cast<double>(sc.monitoring.size());
    }

    std::size_t dimension() const { return drift_.size(); }

    PathOutcome simulate(std::span<const double> z) const {
        if (z.size() != dimension()) throw ConfigError("normal vector does not match the number of steps");
        double ls_div = log_spot_, ls_free = log_spot_;
        double avg = 0.0, geo_div = 0.0, geo_free = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double inc = drift_[k] + diffusion_[k] * z[k];
            ls_div += inc;
            ls_free += inc;
            if (dividend_[k] > 0.0) {
                const double s = std::exp(ls_div) - dividend_[k];
                ls_div = s > 0.0 ? std::log(s) : -INFINITY;
            }
            if (fixing_[k] != 0) {
                avg = update_running_average(avg, fixing_[k], std::exp(ls_div));
                geo_div += ls_div;
                geo_free += ls_free;
            }
        }
        const double geo = std::exp(geo_free / n_fix_);
        PathOutcome out;
        out.control = discount_ * payoff(kind_, geo, strike_);
        out.target = target_ == PayoffTarget::arithmetic ? discount_ * payoff(kind_, avg, strike_)
                                                         : discount_ * payoff(kind_, std::exp(geo_div / n_fix_), strike_);
        return out;
    }

private:
    OptionKind kind_;
    double strike_;
    PayoffTarget target_;
    std::vector<double> drift_, diffusion_, dividend_;
    std::vector<std::size_t> fixing_;
    double log_spot_ = 0.0, discount_ = 1.0, n_fix_ = 1.0;
};

inline PathOutcome simulate_path(const Scenario& sc, std::span<const double> normals) {
    return PathModel(sc).simulate(normals);
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

enum class McMethod { mc, mc_av_cv, rqmc, rqmc_cv };

inline const char* to_string(McMethod m) {
    switch (m) {
    case McMethod::mc: return "mc";
    case McMethod::mc_av_cv: return "mc-av-cv";
    case McMethod::rqmc: return "rqmc";
    case McMethod::rqmc_cv: return "rqmc-cv";
    }
    return "?";
}

inline bool is_rqmc(McMethod m) { return m == McMethod::rqmc || m == McMethod::rqmc_cv; }
inline bool uses_control(McMethod m) { return m == McMethod::mc_av_cv || m == McMethod::rqmc_cv; }

struct EstimatorResult {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t paths = 0;
    std::size_t replicates = 0;
    McMethod method = McMethod::mc;
    std::vector<double> replicate_means;  ///< RQMC only
};

/// Running mean and sum of squared deviations (Welford), mergeable in a fixed order.
struct RunningStats {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    void merge(const RunningStats& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(count + o.count);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.count) / n;
        m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
        count += o.count;
    }

    /// Sample variance with Bessel's correction.
    double variance() const { return count > 1 ? std::max(m2, 0.0) / static_cast<double>(count - 1) : 0.0; }
};

struct EstimatorOptions {
    unsigned threads = 1;  ///< 0 = hardware concurrency
    PayoffTarget target = PayoffTarget::arithmetic;
    std::size_t block_size = 4096;  ///< plain MC work unit, in samples
};

/// E[C] for the control: geometric-average option on the dividend-free stock.
inline double control_expectation(const Scenario& sc) {
    return geometric_asian_price(sc.market.spot, sc.option.strike, sc.monitoring.fixings, sc.market.rate,
                                 sc.market.yield, sc.market.vol, sc.option.maturity, sc.option.kind);
}

namespace detail {

/// Y = X - (C - E[C]), grouped so that X == C gives E[C] exactly.
inline double controlled(const PathOutcome& o, double control_mean) { return (o.target - o.control) + control_mean; }

/// Mean of one RQMC replicate: `points` shifted Sobol' points.
inline double rqmc_replicate(const PathModel& model, std::size_t points, std::uint64_t seed, std::uint64_t replicate,
                             bool control, double control_mean) {
    const std::size_t d = model.dimension();
    auto source = NormalSource::shifted_sobol(d, NormalSource::derive_shift(d, seed, replicate));
    std::vector<double> z(d);
    RunningStats st;
    for (std::size_t p = 0; p < points; ++p) {
        source.next(z);
        const auto o = model.simulate(z);
        st.add(control ? controlled(o, control_mean) : o.target);
    }
    return st.mean;
}

/// Pseudo-random samples for block `block`: plain payoffs, or antithetic pair
/// averages of control-corrected payoffs.
inline RunningStats mc_block(const PathModel& model, std::size_t samples, std::uint64_t seed, std::uint64_t block,
                             bool antithetic_control, double control_mean) {
    const std::size_t d = model.dimension();
    auto source = NormalSource::pseudo_random(d, counter_hash(seed, 0x6d63, block));
    std::vector<double> z(d), minus(d);
    RunningStats st;
    for (std::size_t p = 0; p < samples; ++p) {
        source.next(z);
        const auto o = model.simulate(z);
        if (!antithetic_control) {
            st.add(o.target);
            continue;
        }
        for (std::size_t k = 0; k < d; ++k) minus[k] = -z[k];
        const auto m = model.simulate(minus);
        st.add(0.5 * (controlled(o, control_mean) + controlled(m, control_mean)));
    }
    return st;
}

}  // namespace detail

/// RQMC with R >= 1 replicates (R = 1 gives no standard error). Exposed for
/// studies that resample the estimator themselves.
inline EstimatorResult estimate_rqmc(const Scenario& sc, bool control, std::size_t paths, std::size_t replicates,
                                     std::uint64_t seed, const EstimatorOptions& opt = {}) {
    if (replicates < 1 || paths < replicates || paths % replicates != 0)
        throw ConfigError("RQMC needs a path count divisible by the replicate count");
    const PathModel model(sc, opt.target);
    const double cm = control ? control_expectation(sc) : 0.0;
    const std::size_t per = paths / replicates;
    std::vector<double> means(replicates);
    parallel_for(replicates, opt.threads,
                 [&](std::size_t r) { means[r] = detail::rqmc_replicate(model, per, seed, r, control, cm); });
    RunningStats st;
    for (double m : means) st.add(m);
    EstimatorResult res;
    res.value = st.mean;
    res.std_error = std::sqrt(st.variance() / static_cast<double>(replicates));
    res.paths = paths;
    res.replicates = replicates;
    res.method = control ? McMethod::rqmc_cv : McMethod::rqmc;
    res.replicate_means = std::move(means);
    return res;
}

/// Monte Carlo estimate of the discounted option value at the scenario spot.
/// Deterministic in (seed, method, paths, replicates); thread count does not
/// change the result.
inline EstimatorResult estimate(const Scenario& sc, McMethod method, std::size_t paths, std::size_t replicates,
                                std::uint64_t seed, const EstimatorOptions& opt = {}) {
    if (paths < 2) throw ConfigError("at least two paths are required");
    if (is_rqmc(method)) {
        if (replicates < 2) throw ConfigError("RQMC needs at least two replicates");
        return estimate_rqmc(sc, method == McMethod::rqmc_cv, paths, replicates, seed, opt);
    }
    const bool av = method == McMethod::mc_av_cv;
    if (av && paths % 2 != 0) throw ConfigError("antithetic sampling needs an even path count");
    if (opt.block_size == 0) throw ConfigError("block size must be positive");
    const PathModel model(sc, opt.target);
    const double cm = av ? control_expectation(sc) : 0.0;
    const std::size_t samples = av ? paths / 2 : paths;
    const std::size_t blocks = (samples + opt.block_size - 1) / opt.block_size;
    std::vector<RunningStats> parts(blocks);
    parallel_for(blocks, opt.threads, [&](std::size_t b) {
        const std::size_t n = std::min(opt.block_size, samples - b * opt.block_size);
        parts[b] = detail::mc_block(model, n, seed, b, av, cm);
    });
    RunningStats st;
    for (const auto& p : parts) st.merge(p);
    EstimatorResult res;
    res.value = st.mean;
    res.std_error = std::sqrt(st.variance() / static_cast<double>(st.count));
    res.paths = paths;
    res.replicates = 1;
    res.method = method;
    return res;
}

}  // namespace asian
