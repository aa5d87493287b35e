#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asian/errors.hpp"
#include "asian/full_pde.hpp"
#include "asian/harness/metrics.hpp"
#include "asian/harness/scenario_io.hpp"
#include "asian/monte_carlo.hpp"

namespace asian::harness {

struct ReferenceConfig {
    FullPdeConfig base{800, 400, 400};
    std::size_t rqmc_paths = std::size_t{1} << 18;
    std::size_t rqmc_replicates = 32;
    std::uint64_t seed = 20240917;
    double std_errors = 3.0;
    double rel_tolerance = 5e-4;
    unsigned threads = 1;
};

/// The doubled grid used for extrapolation: halved spacing in every dimension.
inline FullPdeConfig refined(const FullPdeConfig& c) {
    FullPdeConfig f = c;
    f.ns = 2 * c.ns - 1;
    f.na = 2 * c.na - 1;
    f.nt = 2 * c.nt;
    return f;
}

struct ReferenceRecord {
    std::string hash;
    std::string label;
    double strike = 0.0;
    double value = 0.0;           ///< V_ref at the scenario spot
    std::vector<double> curve;    ///< V_ref on the evaluation lattice
    std::string method;
    FullPdeConfig coarse, fine;
    double rqmc_value = 0.0;
    double rqmc_std_error = 0.0;
    std::size_t rqmc_paths = 0, rqmc_replicates = 0;
    std::uint64_t seed = 0;
};

/// Richardson extrapolation of two full-PDE solutions, cross-checked by RQMC
/// with control variates.
inline ReferenceRecord compute_reference(const Scenario& sc, const ReferenceConfig& cfg = {}) {
    sc.validate();
    ReferenceRecord rec;
    rec.hash = scenario_hash(sc);
    rec.label = sc.label;
    rec.strike = sc.option.strike;
    rec.coarse = cfg.base;
    rec.coarse.threads = cfg.threads;
    rec.fine = refined(rec.coarse);

    if (sc.market.vol == 0.0) {
        rec.method = "deterministic";
        rec.value = deterministic_price(sc);
        for (double s : evaluation_lattice(sc.option.strike)) rec.curve.push_back(deterministic_price(sc, s));
    } else {
        rec.method = "full-pde-richardson";
        const auto c = solve_full_pde(sc, rec.coarse);
        const auto f = solve_full_pde(sc, rec.fine);
        rec.value = (4.0 * f.price - c.price) / 3.0;
        rec.curve = richardson(on_lattice(c.curve, rec.strike), on_lattice(f.curve, rec.strike));
    }

    EstimatorOptions opt;
    opt.threads = cfg.threads;
    const auto mc = estimate(sc, McMethod::rqmc_cv, cfg.rqmc_paths, cfg.rqmc_replicates, cfg.seed, opt);
    rec.rqmc_value = mc.value;
    rec.rqmc_std_error = mc.std_error;
    rec.rqmc_paths = cfg.rqmc_paths;
    rec.rqmc_replicates = cfg.rqmc_replicates;
    rec.seed = cfg.seed;

    const double diff = std::abs(mc.value - rec.value);
    const double tol = cfg.std_errors * mc.std_error + cfg.rel_tolerance * std::abs(rec.value) + 1e-12;
    if (!(diff <= tol))
        throw CorroborationError("reference for '" + sc.label + "' not corroborated: PDE " + std::to_string(rec.value) +
                                 ", RQMC " + std::to_string(mc.value) + " +- " + std::to_string(mc.std_error));
    return rec;
}

inline nlohmann::json to_json(const ReferenceRecord& r) {
    const auto grid = [](const FullPdeConfig& c) { return nlohmann::json{{"ns", c.ns}, {"na", c.na}, {"nt", c.nt}}; };
    return {{"hash", r.hash},
            {"label", r.label},
            {"strike", r.strike},
            {"value", r.value},
            {"curve", r.curve},
            {"method", r.method},
            {"coarse", grid(r.coarse)},
            {"fine", grid(r.fine)},
            {"rqmc", {{"value", r.rqmc_value}, {"std_error", r.rqmc_std_error}, {"paths", r.rqmc_paths},
                      {"replicates", r.rqmc_replicates}, {"seed", r.seed}}}};
}

inline ReferenceRecord record_from_json(const nlohmann::json& j) {
    try {
        ReferenceRecord r;
        const auto grid = [](const nlohmann::json& g) {
            return FullPdeConfig{g.at("ns").get<std::size_t>(), g.at("na").get<std::size_t>(),
                                 g.at("nt").get<std::size_t>()};
        };
        r.hash = j.at("hash").get<std::string>();
        r.label = j.at("label").get<std::string>();
        r.strike = j.at("strike").get<double>();
        r.value = j.at("value").get<double>();
        r.curve = j.at("curve").get<std::vector<double>>();
        r.method = j.at("method").get<std::string>();
        r.coarse = grid(j.at("coarse"));
        r.fine = grid(j.at("fine"));
        const auto& m = j.at("rqmc");
        r.rqmc_value = m.at("value").get<double>();
        r.rqmc_std_error = m.at("std_error").get<double>();
        r.rqmc_paths = m.at("paths").get<std::size_t>();
        r.rqmc_replicates = m.at("replicates").get<std::size_t>();
        r.seed = m.at("seed").get<std::uint64_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed reference record: ") + e.what());
    }
}

/// One JSON document per scenario hash. Records are written once; `force`
/// replaces an existing record.
class ReferenceCache {
public:
    explicit ReferenceCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::filesystem::path path_for(const std::string& hash) const { return dir_ / (hash + ".json"); }

    std::optional<ReferenceRecord> load(const Scenario& sc) const {
        const auto p = path_for(scenario_hash(sc));
        if (!std::filesystem::exists(p)) return std::nullopt;
        std::ifstream in(p);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("cannot parse " + p.string() + ": " + e.what());
        }
        return record_from_json(j);
    }

    void store(const ReferenceRecord& r, bool force = false) const {
        std::filesystem::create_directories(dir_);
        const auto p = path_for(r.hash);
        if (std::filesystem::exists(p) && !force) throw ConfigError("reference " + p.string() + " already exists");
        const auto tmp = p.string() + ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw ConfigError("cannot write " + tmp);
            out << to_json(r).dump(2) << '\n';
        }
        std::filesystem::rename(tmp, p);
    }

    /// Cached record, computed and stored on a miss (or always with `force`).
    ReferenceRecord obtain(const Scenario& sc, const ReferenceConfig& cfg = {}, bool force = false) const {
        if (!force)
            if (auto r = load(sc)) return *r;
        auto r = compute_reference(sc, cfg);
        store(r, force);
        return r;
    }

private:
    std::filesystem::path dir_;
};

}  // namespace asian::harness
