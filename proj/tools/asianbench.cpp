// asianbench: price, convergence, variance, reference and comparison runs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asian/asian.hpp"

using namespace asian;
using namespace asian::harness;

namespace {

enum Exit { ok = 0, config_error = 2, numerical_error = 3, corroboration_error = 4 };

std::vector<std::size_t> parse_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size()) throw ConfigError("bad resolution '" + item + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

void emit(const std::vector<StudyRow>& rows, const std::string& out) {
    if (out.empty() || out == "-") {
        write_csv(std::cout, rows);
        return;
    }
    CsvAppender(out).append(rows);
}

struct Common {
    std::string scenario;
    std::string cache_dir = "refcache";
    unsigned threads = 1;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--scenario", c.scenario, "catalog label or scenario JSON file")->required();
    app->add_option("--cache-dir", c.cache_dir, "reference cache directory");
    app->add_option("--threads", c.threads, "worker threads (0 = all cores)");
}

ReferenceRecord reference(const Scenario& sc, const Common& c, bool force = false) {
    ReferenceConfig cfg;
    cfg.threads = c.threads;
    return ReferenceCache(c.cache_dir).obtain(sc, cfg, force);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete arithmetic Asian option pricing and benchmark harness"};
    app.require_subcommand(1);

    // price
    Common pc;
    std::string solver = "full-pde";
    Resolution res;
    std::string kind;
    auto* price_cmd = app.add_subcommand("price", "price one scenario with one solver");
    add_common(price_cmd, pc);
    price_cmd->add_option("--solver", solver, "full-pde|curran-fd|mc|mc-av-cv|rqmc|rqmc-cv");
    price_cmd->add_option("--ns", res.ns, "stock nodes");
    price_cmd->add_option("--na", res.na, "average nodes");
    price_cmd->add_option("--nt", res.nt, "time steps");
    price_cmd->add_option("--paths", res.paths, "Monte Carlo paths");
    price_cmd->add_option("--replicates", res.replicates, "RQMC random shifts");
    price_cmd->add_option("--seed", res.seed, "Monte Carlo seed");
    price_cmd->add_option("--kind", kind, "override the option kind (call|put)");
    price_cmd->add_flag("--force-equidistant", res.force_equidistant,
                        "let curran-fd price non-equidistant schedules on an equidistant clock");

    // converge
    Common cc;
    std::string c_solver = "full-pde", dimension = "s", resolutions, c_out;
    ConvergeOptions copt;
    auto* conv_cmd = app.add_subcommand("converge", "error against resolution in one dimension");
    add_common(conv_cmd, cc);
    conv_cmd->add_option("--solver", c_solver, "solver tag");
    conv_cmd->add_option("--dimension", dimension, "s|a|t|paths");
    conv_cmd->add_option("--resolutions", resolutions, "comma separated, increasing")->required();
    conv_cmd->add_option("--fixed", copt.fixed, "node count of the other dimensions");
    conv_cmd->add_option("--outer", copt.outer, "Monte Carlo outer samples");
    conv_cmd->add_option("--inner", copt.inner_replicates, "RQMC shifts per outer sample");
    conv_cmd->add_option("--seed", copt.seed, "Monte Carlo seed");
    conv_cmd->add_option("--out", c_out, "CSV file to append to (default stdout)");

    // variance
    Common vc;
    std::string method = "rqmc-cv", v_out;
    std::size_t v_paths = std::size_t{1} << 14, outer = 100, inner = 1;
    std::uint64_t v_seed = 1;
    auto* var_cmd = app.add_subcommand("variance", "relative standard deviation of a Monte Carlo method");
    add_common(var_cmd, vc);
    var_cmd->add_option("--method", method, "mc|mc-av-cv|rqmc|rqmc-cv");
    var_cmd->add_option("--paths", v_paths, "paths per estimate");
    var_cmd->add_option("--outer", outer, "number of independent estimates");
    var_cmd->add_option("--inner", inner, "RQMC shifts per estimate");
    var_cmd->add_option("--seed", v_seed, "seed");
    var_cmd->add_option("--out", v_out, "CSV file to append to (default stdout)");

    // reference
    Common rc;
    bool force = false;
    auto* ref_cmd = app.add_subcommand("reference", "compute or load the reference value");
    add_common(ref_cmd, rc);
    ref_cmd->add_flag("--force", force, "recompute and overwrite the cached record");

    // compare
    Common mc;
    std::string m_out;
    Resolution m_res;
    auto* cmp_cmd = app.add_subcommand("compare", "every solver against the reference");
    add_common(cmp_cmd, mc);
    cmp_cmd->add_option("--out", m_out, "CSV file to append to (default stdout)");
    cmp_cmd->add_option("--seed", m_res.seed, "Monte Carlo seed");
    cmp_cmd->add_flag("--force-equidistant", m_res.force_equidistant, "include curran-fd on non-equidistant schedules");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*price_cmd) {
            auto sc = resolve_scenario(pc.scenario);
            if (!kind.empty()) sc.option.kind = parse_kind(kind);
            res.threads = pc.threads;
            const auto s = parse_solver(solver);
            const auto p = price(sc, s, res);
            std::printf("scenario=%s solver=%s value=%.10f", sc.label.c_str(), to_string(s), p.value);
            if (p.std_error) std::printf(" std_error=%.3e", *p.std_error);
            std::printf(" seconds=%.3f\n", p.seconds);
        } else if (*conv_cmd) {
            const auto sc = resolve_scenario(cc.scenario);
            const auto s = parse_solver(c_solver);
            copt.threads = cc.threads;
            std::optional<ReferenceRecord> rec;
            if (s != SolverKind::full_pde) rec = reference(sc, cc);
            const auto st = converge(sc, s, parse_dimension(dimension), parse_list(resolutions), rec ? &*rec : nullptr,
                                     copt);
            emit(st.rows, c_out);
            std::fprintf(stderr, "slope %.4f over %zu rows\n", st.fit.slope, st.fit.used);
        } else if (*var_cmd) {
            const auto sc = resolve_scenario(vc.scenario);
            const auto s = parse_solver(method);
            const auto m = to_method(s);
            const auto rec = reference(sc, vc);
            EstimatorOptions eo;
            eo.threads = vc.threads;
            const std::size_t in = is_rqmc(m) ? inner : 1;
            const auto v = rel_std_dev(sc, m, v_paths, outer, v_seed, rec.value, in, eo);
            StudyRow row;
            row.scenario = sc.label;
            row.solver = to_string(s);
            row.paths = v_paths;
            row.replicates = in;
            row.seed = v_seed;
            row.value = v.mean;
            row.error = v.rel_std_dev;
            row.error_kind = ErrorKind::rel_std_dev;
            row.wall_seconds = v.seconds;
            emit({row}, v_out);
        } else if (*ref_cmd) {
            const auto sc = resolve_scenario(rc.scenario);
            const auto r = reference(sc, rc, force);
            std::printf("scenario=%s hash=%s value=%.10f method=%s rqmc=%.10f rqmc_std_error=%.3e\n", r.label.c_str(),
                        r.hash.c_str(), r.value, r.method.c_str(), r.rqmc_value, r.rqmc_std_error);
        } else if (*cmp_cmd) {
            const auto sc = resolve_scenario(mc.scenario);
            const auto rec = reference(sc, mc);
            m_res.threads = mc.threads;
            const auto cmp = compare(sc, rec, m_res);
            for (const auto& s : cmp.skipped) std::fprintf(stderr, "out of contract, skipped %s\n", s.c_str());
            emit(cmp.rows, m_out);
        }
    } catch (const CorroborationError& e) {
        std::fprintf(stderr, "corroboration failure: %s\n", e.what());
        return corroboration_error;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return numerical_error;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return config_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return config_error;
    }
    return ok;
}
