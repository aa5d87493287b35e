#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "asian/core.hpp"
#include "asian/parallel.hpp"
#include "asian/pde_engine.hpp"

namespace asian {

/// Solution V(S) at one time on a space grid.
struct ValueCurve {
    UniformGrid grid;
    ValueSlice values;

    double at(double s) const { return interpolate(grid, values, s); }
};

struct PdeResult {
    double price = 0.0;  ///< value at the scenario spot
    ValueCurve curve;    ///< V(S, A = 0, t = 0)
};

/// Values on the (S, A) grid at one time. Each A level is stored contiguously.
class ValueSurface {
public:
    ValueSurface(std::size_t stock_nodes, std::size_t average_nodes, double fill = 0.0)
        : ns_(stock_nodes), na_(average_nodes), data_(stock_nodes * average_nodes, fill) {}

    std::size_t stock_size() const { return ns_; }
    std::size_t average_size() const { return na_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * ns_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * ns_ + i]; }

    std::span<double> level(std::size_t j) { return {data_.data() + j * ns_, ns_}; }
    std::span<const double> level(std::size_t j) const { return {data_.data() + j * ns_, ns_}; }

    /// Pointer to V(S_i, A_0); successive A levels are stock_size() apart.
    const double* row(std::size_t i) const { return data_.data() + i; }

private:
    std::size_t ns_, na_;
    std::vector<double> data_;
};

enum class NodeRatio { tail, tail_dividend, full_lifespan };

struct FullPdeConfig {
    std::size_t ns = 400;
    std::size_t na = 200;
    std::size_t nt = 100;
    unsigned threads = 1;  ///< 0 = hardware concurrency
    /// Evaluate the payoff through a fixing at maturity exactly instead of
    /// interpolating the kink along A.
    bool absorb_terminal_fixing = false;

    /// Stock:average:time node ratios 4:2:1, 10:6:3 and 10:3:3 scaled so that
    /// the stock dimension gets `stock_nodes`.
    static FullPdeConfig with_ratio(NodeRatio ratio, std::size_t stock_nodes) {
        const auto scale = [&](double r) { return static_cast<std::size_t>(std::round(stock_nodes * r)); };
        switch (ratio) {
        case NodeRatio::tail: return {stock_nodes, scale(0.5), scale(0.25)};
        case NodeRatio::tail_dividend: return {stock_nodes, scale(0.6), scale(0.3)};
        case NodeRatio::full_lifespan: return {stock_nodes, scale(0.3), scale(0.3)};
        }
        return {};
    }

    void validate() const {
        if (ns < 8 || na < 8 || nt < 8) throw ConfigError("full PDE node counts must all be >= 8");
    }
};

/// Upper end of the S domain: max(S0, K) exp(|r - q| T + 6 sigma sqrt(T)),
/// never below 2 max(S0, K).
inline double stock_domain_upper(const Scenario& sc) {
    const double base = std::max(sc.market.spot, sc.option.strike);
    const double t = sc.option.maturity;
    const double width = std::abs(sc.market.carry()) * t + 6.0 * sc.market.vol * std::sqrt(t);
    return base * std::max(std::exp(width), 2.0);
}

/// S grid with the spot on a node (the strike when the spot is zero).
inline UniformGrid space_grid_for(const Scenario& sc, std::size_t nodes) {
    const double anchor = sc.market.spot > 0.0 ? sc.market.spot : sc.option.strike;
    return UniformGrid::anchored(anchor, stock_domain_upper(sc), nodes);
}

/// A grid over the same range as the S grid, with the strike on a node.
inline UniformGrid average_grid_for(const Scenario& sc, const UniformGrid& space, std::size_t nodes) {
    return UniformGrid::anchored(sc.option.strike, space.upper(), nodes);
}

/// Interval boundaries 0 = b_0 < b_1 < ... (event times, then T if no event
/// falls on it) and the step count allotted to each interval.
struct TimeSegments {
    std::vector<double> bounds;
    std::vector<std::size_t> steps;

    std::size_t size() const { return steps.size(); }
    StepPlan plan(std::size_t k) const { return {bounds[k], bounds[k + 1], steps[k], true}; }
};

inline TimeSegments segment_time(const std::vector<double>& event_times, double maturity, std::size_t total_steps) {
    TimeSegments seg;
    seg.bounds.push_back(0.0);
    for (double t : event_times) seg.bounds.push_back(t);
    if (event_times.empty() || event_times.back() < maturity - time_tolerance) seg.bounds.push_back(maturity);
    std::vector<double> lengths;
    for (std::size_t k = 0; k + 1 < seg.bounds.size(); ++k) lengths.push_back(seg.bounds[k + 1] - seg.bounds[k]);
    seg.steps = allocate_steps(lengths, total_steps);
    return seg;
}

// ---------------------------------------------------------------------------
// Jump conditions
// ---------------------------------------------------------------------------

/// Value just before the n-th fixing: V(S, A, t-) = V(S, ((n-1)A + S)/n, t+),
/// read along the A axis by four-point interpolation.
inline ValueSurface apply_fixing_jump(const ValueSurface& after, std::size_t ordinal, const UniformGrid& stock,
                                      const UniformGrid& average) {
    if (ordinal < 1) throw ConfigError("fixing ordinal must be >= 1");
    const std::size_t ns = after.stock_size(), na = after.average_size();
    ValueSurface before(ns, na);
    const std::size_t stride = ns;
    for (std::size_t j = 0; j < na; ++j)
        for (std::size_t i = 0; i < ns; ++i) {
            const double a_new = update_running_average(average[j], ordinal, stock[i]);
            before(i, j) = interpolate(average, after.row(i), stride, a_new);
        }
    return before;
}

/// new(S) = old(S + offset) along the S axis, extrapolating from the outermost
/// cubic beyond the grid.
inline ValueSlice read_shifted(std::span<const double> slice, const UniformGrid& stock, double offset) {
    ValueSlice out(slice.size());
    for (std::size_t i = 0; i < slice.size(); ++i) out[i] = interpolate(stock, slice, stock[i] + offset);
    return out;
}

/// Value just before a dividend D: the spot drops to max(S - D, 0), so
/// V(S, t-) = V(max(S - D, 0), t+).
inline ValueSlice apply_dividend_jump(std::span<const double> after, const UniformGrid& stock, double amount) {
    if (!(amount >= 0.0)) throw ConfigError("dividend amount must be >= 0");
    ValueSlice out(after.size());
    for (std::size_t i = 0; i < after.size(); ++i)
        out[i] = interpolate(stock, after, std::max(stock[i] - amount, 0.0));
    return out;
}

inline ValueSurface apply_dividend_jump(const ValueSurface& after, const UniformGrid& stock, double amount) {
    ValueSurface before(after.stock_size(), after.average_size());
    for (std::size_t j = 0; j < after.average_size(); ++j) {
        const auto col = apply_dividend_jump(after.level(j), stock, amount);
        std::copy(col.begin(), col.end(), before.level(j).begin());
    }
    return before;
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

namespace detail {

inline void check_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) throw NumericalError("non-finite value in PDE solution");
}

}  // namespace detail

/// Marches a single A-independent slice over the segments [0, bounds[upto]],
/// applying the dividend jumps found at interior bounds.
inline ValueSlice march_collapsed(ValueSlice slice, const UniformGrid& stock, const MarketParams& market,
                                  const TimeSegments& seg, const EventTimeline& timeline, std::size_t upto) {
    std::vector<double> scratch(stock.size());
    for (std::size_t k = upto; k-- > 0;) {
        SliceMarcher(stock, market, seg.plan(k)).advance(slice, scratch);
        if (k > 0) {
            const auto& ev = timeline.events[k - 1];
            if (ev.fixing) throw ConfigError("fixing encountered after the surface collapsed");
            if (ev.dividend) slice = apply_dividend_jump(slice, stock, *ev.dividend);
        }
    }
    detail::check_finite(slice);
    return slice;
}

/// Backward induction over (S, A) with fixing and dividend jump conditions.
/// Before the first fixing only the A = 0 level is carried.
inline PdeResult solve_full_pde(const Scenario& sc, const FullPdeConfig& cfg) {
    sc.validate();
    cfg.validate();
    const UniformGrid stock = space_grid_for(sc, cfg.ns);
    const UniformGrid average = average_grid_for(sc, stock, cfg.na);
    const EventTimeline timeline = build_timeline(sc.monitoring, sc.dividends.nonzero());
    const TimeSegments seg = segment_time(timeline.times(), sc.option.maturity, cfg.nt);
    const std::size_t ns = stock.size(), na = average.size();
    const auto kind = sc.option.kind;
    const double strike = sc.option.strike;

    const auto& last = timeline.events.back();
    const bool event_at_maturity = seg.bounds.back() == last.time;
    // The payoff is known in closed form, so a fixing at maturity may read it
    // exactly instead of interpolating along A. This is always done when that
    // fixing is the only one: the read is then at A = S and independent of the A grid.
    const bool absorbed =
        event_at_maturity && last.fixing.has_value() && (cfg.absorb_terminal_fixing || *last.fixing == 1);

    // After the first fixing every A level holds the same values; keep one.
    const auto collapse = [&](const ValueSurface& surface, const TimelineEvent& ev, std::size_t upto) {
        ValueSlice slice(surface.level(0).begin(), surface.level(0).end());
        if (ev.dividend) slice = apply_dividend_jump(slice, stock, *ev.dividend);
        auto values = march_collapsed(std::move(slice), stock, sc.market, seg, timeline, upto);
        const double price = interpolate(stock, values, sc.market.spot);
        return PdeResult{price, ValueCurve{stock, std::move(values)}};
    };

    ValueSurface surface(ns, na);
    for (std::size_t j = 0; j < na; ++j)
        for (std::size_t i = 0; i < ns; ++i)
            surface(i, j) = absorbed ? payoff(kind, update_running_average(average[j], *last.fixing, stock[i]), strike)
                                     : payoff(kind, average[j], strike);
    if (event_at_maturity) {
        if (last.fixing && !absorbed) surface = apply_fixing_jump(surface, *last.fixing, stock, average);
        if (last.fixing == 1u) return collapse(surface, last, seg.size());
        if (last.dividend) surface = apply_dividend_jump(surface, stock, *last.dividend);
    }

    for (std::size_t k = seg.size(); k-- > 0;) {
        const SliceMarcher marcher(stock, sc.market, seg.plan(k));
        parallel_for(na, cfg.threads, [&](std::size_t j) {
            std::vector<double> scratch(ns);
            marcher.advance(surface.level(j), scratch);
        });
        if (k == 0) break;
        const auto& ev = timeline.events[k - 1];
        if (ev.fixing) {
            surface = apply_fixing_jump(surface, *ev.fixing, stock, average);
            if (*ev.fixing == 1) return collapse(surface, ev, k);
        }
        if (ev.dividend) surface = apply_dividend_jump(surface, stock, *ev.dividend);
    }
    throw ConfigError("monitoring schedule has no first fixing");
}

}  // namespace asian
