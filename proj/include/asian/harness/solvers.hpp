#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "asian/curran_hybrid.hpp"
#include "asian/errors.hpp"
#include "asian/full_pde.hpp"
#include "asian/monte_carlo.hpp"

namespace asian::harness {

enum class SolverKind { full_pde, curran_fd, mc, mc_av_cv, rqmc, rqmc_cv };

inline const char* to_string(SolverKind s) {
    switch (s) {
    case SolverKind::full_pde: return "full-pde";
    case SolverKind::curran_fd: return "curran-fd";
    case SolverKind::mc: return "mc";
    case SolverKind::mc_av_cv: return "mc-av-cv";
    case SolverKind::rqmc: return "rqmc";
    case SolverKind::rqmc_cv: return "rqmc-cv";
    }
    return "?";
}

inline SolverKind parse_solver(const std::string& s) {
    for (auto k : {SolverKind::full_pde, SolverKind::curran_fd, SolverKind::mc, SolverKind::mc_av_cv, SolverKind::rqmc,
                   SolverKind::rqmc_cv})
        if (s == to_string(k)) return k;
    throw ConfigError("unknown solver '" + s + "'");
}

inline bool is_monte_carlo(SolverKind s) { return s != SolverKind::full_pde && s != SolverKind::curran_fd; }

inline McMethod to_method(SolverKind s) {
    switch (s) {
    case SolverKind::mc: return McMethod::mc;
    case SolverKind::mc_av_cv: return McMethod::mc_av_cv;
    case SolverKind::rqmc: return McMethod::rqmc;
    case SolverKind::rqmc_cv: return McMethod::rqmc_cv;
    default: throw ConfigError(std::string(to_string(s)) + " is not a Monte Carlo method");
    }
}

/// Resolution knobs for any solver; fields a solver does not use are ignored.
struct Resolution {
    std::size_t ns = 800;
    std::size_t na = 400;
    std::size_t nt = 400;
    std::size_t paths = std::size_t{1} << 16;
    std::size_t replicates = 32;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool force_equidistant = false;
};

struct PriceOutcome {
    double value = 0.0;
    std::optional<double> std_error;  ///< Monte Carlo only
    std::optional<ValueCurve> curve;  ///< finite differences only
    double seconds = 0.0;
};

inline PriceOutcome price(const Scenario& sc, SolverKind solver, const Resolution& res) {
    const auto start = std::chrono::steady_clock::now();
    PriceOutcome out;
    if (solver == SolverKind::full_pde) {
        FullPdeConfig cfg{res.ns, res.na, res.nt, res.threads};
        auto r = solve_full_pde(sc, cfg);
        out.value = r.price;
        out.curve = std::move(r.curve);
    } else if (solver == SolverKind::curran_fd) {
        HybridConfig cfg;
        cfg.ns = res.ns;
        cfg.nt = res.nt;
        cfg.force_equidistant = res.force_equidistant;
        auto r = solve_hybrid(sc, cfg);
        out.value = r.price;
        out.curve = std::move(r.curve);
    } else {
        EstimatorOptions opt;
        opt.threads = res.threads;
        const auto method = to_method(solver);
        const auto r = estimate(sc, method, res.paths, is_rqmc(method) ? res.replicates : 1, res.seed, opt);
        out.value = r.value;
        out.std_error = r.std_error;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace asian::harness
