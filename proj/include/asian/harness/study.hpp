#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "asian/errors.hpp"
#include "asian/harness/csv.hpp"
#include "asian/harness/metrics.hpp"
#include "asian/harness/reference.hpp"
#include "asian/harness/solvers.hpp"

namespace asian::harness {

enum class Dimension { s, a, t, paths };

inline const char* to_string(Dimension d) {
    switch (d) {
    case Dimension::s: return "s";
    case Dimension::a: return "a";
    case Dimension::t: return "t";
    case Dimension::paths: return "paths";
    }
    return "?";
}

inline Dimension parse_dimension(const std::string& s) {
    if (s == "s") return Dimension::s;
    if (s == "a") return Dimension::a;
    if (s == "t") return Dimension::t;
    if (s == "paths") return Dimension::paths;
    throw ConfigError("unknown dimension '" + s + "' (expected s, a, t or paths)");
}

struct ConvergeOptions {
    std::size_t fixed = 1200;  ///< node count of the dimensions not under study
    std::uint64_t seed = 1;
    std::size_t outer = 100;           ///< Monte Carlo outer samples
    std::size_t inner_replicates = 1;  ///< RQMC shifts per outer sample
    unsigned threads = 1;
    /// Drop rows past the approximation floor from the fit; on by default for curran-fd.
    std::optional<bool> knee;
};

struct ConvergenceStudy {
    std::vector<StudyRow> rows;
    SlopeFit fit;
};

namespace detail {

inline FullPdeConfig with_dimension(FullPdeConfig c, Dimension d, std::size_t n) {
    switch (d) {
    case Dimension::s: c.ns = n; break;
    case Dimension::a: c.na = n; break;
    case Dimension::t: c.nt = n; break;
    case Dimension::paths: throw ConfigError("paths is not a finite-difference dimension");
    }
    return c;
}

inline StudyRow fd_row(const Scenario& sc, SolverKind solver, std::size_t ns, std::optional<std::size_t> na,
                       std::size_t nt) {
    StudyRow r;
    r.scenario = sc.label;
    r.solver = to_string(solver);
    r.ns = ns;
    r.na = na;
    r.nt = nt;
    r.error_kind = ErrorKind::max_rel_interval;
    return r;
}

}  // namespace detail

/// Error against resolution in one dimension with the others held fixed, and
/// the least-squares slope of log error on log resolution.
///
/// full-pde is measured against a Richardson extrapolation in the studied
/// dimension alone (at twice and four times the largest resolution), so only
/// that dimension's error is seen. curran-fd is measured against the reference
/// record, so its approximation floor shows. Monte Carlo rows carry the
/// relative standard deviation around the reference value.
inline ConvergenceStudy converge(const Scenario& sc, SolverKind solver, Dimension dim,
                                 const std::vector<std::size_t>& resolutions, const ReferenceRecord* record,
                                 const ConvergeOptions& opt = {}) {
    if (resolutions.size() < 3) throw ConfigError("a convergence study needs at least three resolutions");
    if (!std::is_sorted(resolutions.begin(), resolutions.end()))
        throw ConfigError("resolutions must be increasing");
    ConvergenceStudy study;
    const double strike = sc.option.strike;

    if (solver == SolverKind::full_pde) {
        if (dim == Dimension::paths) throw ConfigError("full-pde has no paths dimension");
        FullPdeConfig base{opt.fixed, opt.fixed, opt.fixed, opt.threads};
        const std::size_t top = resolutions.back();
        const auto c = solve_full_pde(sc, detail::with_dimension(base, dim, 2 * top));
        const auto f = solve_full_pde(sc, detail::with_dimension(base, dim, 4 * top));
        const auto ref = richardson(on_lattice(c.curve, strike), on_lattice(f.curve, strike));
        for (std::size_t n : resolutions) {
            const auto cfg = detail::with_dimension(base, dim, n);
            const auto t0 = std::chrono::steady_clock::now();
            const auto r = solve_full_pde(sc, cfg);
            auto row = detail::fd_row(sc, solver, cfg.ns, cfg.na, cfg.nt);
            row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            row.value = r.price;
            row.error = max_rel_error(on_lattice(r.curve, strike), ref);
            study.rows.push_back(row);
        }
    } else if (solver == SolverKind::curran_fd) {
        if (dim != Dimension::s && dim != Dimension::t) throw ConfigError("curran-fd studies dimension s or t");
        if (!record) throw ConfigError("curran-fd convergence needs a reference record");
        for (std::size_t n : resolutions) {
            Resolution res;
            res.ns = dim == Dimension::s ? n : opt.fixed;
            res.nt = dim == Dimension::t ? n : opt.fixed;
            res.threads = opt.threads;
            const auto p = price(sc, solver, res);
            auto row = detail::fd_row(sc, solver, res.ns, std::nullopt, res.nt);
            row.wall_seconds = p.seconds;
            row.value = p.value;
            row.error = max_rel_error(on_lattice(*p.curve, strike), record->curve);
            study.rows.push_back(row);
        }
    } else {
        if (dim != Dimension::paths) throw ConfigError("Monte Carlo studies the paths dimension");
        if (!record) throw ConfigError("Monte Carlo convergence needs a reference record");
        const auto method = to_method(solver);
        EstimatorOptions eo;
        eo.threads = opt.threads;
        for (std::size_t n : resolutions) {
            const std::size_t inner = is_rqmc(method) ? opt.inner_replicates : 1;
            const auto v = rel_std_dev(sc, method, n, opt.outer, opt.seed, record->value, inner, eo);
            StudyRow row;
            row.scenario = sc.label;
            row.solver = to_string(solver);
            row.paths = n;
            row.replicates = inner;
            row.seed = opt.seed;
            row.value = v.mean;
            row.error = v.rel_std_dev;
            row.error_kind = ErrorKind::rel_std_dev;
            row.wall_seconds = v.seconds;
            study.rows.push_back(row);
        }
    }

    std::vector<double> x, y;
    for (const auto& r : study.rows) {
        x.push_back(static_cast<double>(dim == Dimension::paths ? *r.paths
                                        : dim == Dimension::s   ? *r.ns
                                        : dim == Dimension::a   ? *r.na
                                                                : *r.nt));
        y.push_back(r.error);
    }
    std::size_t used = x.size();
    if (opt.knee.value_or(solver == SolverKind::curran_fd)) used = std::max<std::size_t>(knee_cutoff(y), 2);
    study.fit = fit_slope(std::span(x).first(used), std::span(y).first(used));
    return study;
}

// ---------------------------------------------------------------------------
// Performance curves
// ---------------------------------------------------------------------------

struct PerformanceOptions {
    FullPdeConfig start{50, 26, 26};
    std::size_t max_nodes = 6400;
    unsigned threads = 1;
};

/// Full-PDE error-versus-time curve. From a coarse grid, the dimension with the
/// largest estimated error is doubled until the summed estimate meets each
/// target in turn. A dimension's error is estimated as a third of the change
/// when its node count is halved. Rows report the estimate and the wall time
/// of the solve at the chosen grid.
inline std::vector<StudyRow> performance_curve(const Scenario& sc, std::vector<double> targets,
                                               const PerformanceOptions& opt = {}) {
    std::sort(targets.begin(), targets.end(), std::greater<>());
    struct Solved {
        std::vector<double> curve;
        double value;
        double seconds;
    };
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Solved> cache;
    const auto solve = [&](const FullPdeConfig& c) -> const Solved& {
        const auto key = std::make_tuple(c.ns, c.na, c.nt);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const auto t0 = std::chrono::steady_clock::now();
        auto r = solve_full_pde(sc, c);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return cache.emplace(key, Solved{on_lattice(r.curve, sc.option.strike), r.price, secs}).first->second;
    };
    const auto halve = [](std::size_t n) { return (n + 1) / 2; };
    const auto dims = {Dimension::s, Dimension::a, Dimension::t};

    FullPdeConfig cfg = opt.start;
    cfg.threads = opt.threads;
    std::vector<StudyRow> rows;
    for (double target : targets) {
        for (;;) {
            const auto& here = solve(cfg);
            double total = 0.0, worst = -1.0;
            Dimension pick = Dimension::s;
            for (auto d : dims) {
                const std::size_t n = d == Dimension::s ? cfg.ns : d == Dimension::a ? cfg.na : cfg.nt;
                const auto& coarse = solve(detail::with_dimension(cfg, d, halve(n)));
                const double e = max_rel_error(coarse.curve, here.curve) / 3.0;
                total += e;
                if (e > worst) {
                    worst = e;
                    pick = d;
                }
            }
            if (total <= target) {
                auto row = detail::fd_row(sc, SolverKind::full_pde, cfg.ns, cfg.na, cfg.nt);
                row.value = here.value;
                row.error = total;
                row.wall_seconds = here.seconds;
                rows.push_back(row);
                break;
            }
            const std::size_t n = pick == Dimension::s ? cfg.ns : pick == Dimension::a ? cfg.na : cfg.nt;
            if (2 * n - 1 > opt.max_nodes)
                throw ConfigError("error target " + std::to_string(target) + " not reached within " +
                                  std::to_string(opt.max_nodes) + " nodes");
            cfg = detail::with_dimension(cfg, pick, pick == Dimension::t ? 2 * n : 2 * n - 1);
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Side-by-side comparison
// ---------------------------------------------------------------------------

/// Every solver at the given resolution, with the absolute difference to the
/// reference value at the spot. curran-fd is skipped on non-equidistant
/// schedules unless forced; the reason is returned in `skipped`.
struct Comparison {
    std::vector<StudyRow> rows;
    std::vector<std::string> skipped;
};

inline Comparison compare(const Scenario& sc, const ReferenceRecord& record, const Resolution& res = {}) {
    Comparison out;
    for (auto s : {SolverKind::full_pde, SolverKind::curran_fd, SolverKind::mc, SolverKind::mc_av_cv, SolverKind::rqmc,
                   SolverKind::rqmc_cv}) {
        PriceOutcome p;
        try {
            p = price(sc, s, res);
        } catch (const OutOfContractError& e) {
            out.skipped.push_back(std::string(to_string(s)) + ": " + e.what());
            continue;
        }
        StudyRow row;
        row.scenario = sc.label;
        row.solver = to_string(s);
        if (is_monte_carlo(s)) {
            row.paths = res.paths;
            row.replicates = is_rqmc(to_method(s)) ? res.replicates : 1;
            row.seed = res.seed;
        } else {
            row.ns = res.ns;
            if (s == SolverKind::full_pde) row.na = res.na;
            row.nt = res.nt;
        }
        row.value = p.value;
        row.error = std::abs(p.value - record.value);
        row.error_kind = ErrorKind::abs_diff;
        row.wall_seconds = p.seconds;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace asian::harness
