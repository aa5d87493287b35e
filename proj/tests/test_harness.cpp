#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "asian/asian.hpp"

using namespace asian;
using namespace asian::harness;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("asian_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST(Catalog, TwelveValidScenarios) {
    const auto all = catalog();
    ASSERT_EQ(all.size(), 12u);
    std::set<std::string> labels;
    for (const auto& sc : all) {
        EXPECT_NO_THROW(sc.validate());
        EXPECT_EQ(sc.monitoring.size(), 10u);
        EXPECT_EQ(sc.market.spot, 100.0);
        labels.insert(sc.label);
    }
    EXPECT_EQ(labels.size(), 12u);
    EXPECT_THROW(catalog_scenario("tail-early"), ConfigError);
    EXPECT_THROW(catalog_scenario("mid-none-eq"), ConfigError);
}

TEST(Catalog, TailEarlyEq) {
    const auto sc = catalog_scenario("tail-early-eq");
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(sc.monitoring.fixings[i], 1.0 - (9 - i) / 365.0, 1e-15);
    ASSERT_EQ(sc.dividends.payments.size(), 4u);
    const std::vector<double> amounts{2.1, 1.9, 2.051, 1.949};
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_LT(sc.dividends.payments[k].time, sc.monitoring.fixings.front());
        EXPECT_EQ(sc.dividends.payments[k].amount, amounts[k]);
    }
}

TEST(Catalog, FullNoneEq) {
    const auto sc = catalog_scenario("full-none-eq");
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(sc.monitoring.fixings[i], 0.1 * (i + 1), 1e-15);
    EXPECT_TRUE(sc.dividends.empty());
}

TEST(Catalog, LateDividendsFallInsideMonitoring) {
    for (const char* l : {"tail-late-eq", "tail-late-neq", "full-late-eq", "full-late-neq"}) {
        const auto sc = catalog_scenario(l);
        for (const auto& d : sc.dividends.payments) {
            EXPECT_GT(d.time, sc.monitoring.fixings.front()) << l;
            EXPECT_LT(d.time, sc.monitoring.fixings.back()) << l;
        }
    }
    EXPECT_FALSE(is_equidistant(catalog_scenario("tail-none-neq").monitoring.fixings, 1e-9));
}

TEST(Lattice, CoversStrikeInterval) {
    const auto x = evaluation_lattice(100.0);
    ASSERT_EQ(x.size(), 161u);
    EXPECT_DOUBLE_EQ(x.front(), 60.0);
    EXPECT_DOUBLE_EQ(x.back(), 140.0);
    EXPECT_DOUBLE_EQ(x[80], 100.0);
}

TEST(MaxRelError, Basics) {
    const std::vector<double> ref{1.0, 2.0, 4.0};
    EXPECT_EQ(max_rel_error(ref, ref), 0.0);
    const std::vector<double> scaled{1.01, 2.02, 4.04};
    EXPECT_NEAR(max_rel_error(scaled, ref), 0.01, 1e-12);
    const std::vector<double> zero{1.0, 0.0, 1.0};
    EXPECT_THROW(max_rel_error(ref, zero), ConfigError);
}

TEST(MaxRelError, Curves) {
    const UniformGrid g(1.0, 300);
    ValueSlice v(g.size()), w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        v[i] = 1.0 + 0.01 * g[i] * g[i];
        w[i] = 1.01 * v[i];
    }
    const ValueCurve a{g, v}, b{g, w};
    EXPECT_EQ(max_rel_error(a, a, 100.0), 0.0);
    EXPECT_NEAR(max_rel_error(b, a, 100.0), 0.01, 1e-12);
}

TEST(MaxRelError, DecreasesWithRefinement) {
    const auto sc = catalog_scenario("tail-early-eq");
    const auto ref = on_lattice(solve_full_pde(sc, {1200, 600, 300}).curve, 100.0);
    double prev = 1e300;
    for (std::size_t ns : {100u, 200u, 400u}) {
        const double e = max_rel_error(on_lattice(solve_full_pde(sc, {ns, 600, 300}).curve, 100.0), ref);
        EXPECT_LT(e, prev) << ns;
        prev = e;
    }
}

TEST(Richardson, RemovesSecondOrderTerm) {
    const std::vector<double> coarse{1.0 + 4e-2}, fine{1.0 + 1e-2};
    EXPECT_NEAR(richardson(coarse, fine)[0], 1.0, 1e-15);
}

TEST(Csv, RoundTrip) {
    StudyRow a;
    a.scenario = "tail-early-eq";
    a.solver = "full-pde";
    a.ns = 800;
    a.na = 400;
    a.nt = 400;
    a.value = 12.878309123456789;
    a.error = 1.234e-5;
    a.wall_seconds = 0.1 + 0.2;
    StudyRow b;
    b.scenario = "odd, \"label\"";
    b.solver = "rqmc-cv";
    b.paths = 65536;
    b.replicates = 32;
    b.seed = 18446744073709551615ULL;
    b.value = -0.0;
    b.error = 3.0e-300;
    b.error_kind = ErrorKind::rel_std_dev;
    std::stringstream ss;
    write_csv(ss, {a, b});
    const std::string text = ss.str();
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "scenario,solver,ns,na,nt,paths,replicates,seed,value,error,error_kind,wall_seconds");
    const auto rows = read_csv(ss);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], a);
    EXPECT_EQ(rows[1], b);
}

TEST(Csv, RejectsWrongHeader) {
    std::stringstream ss("scenario,solver\nx,y\n");
    EXPECT_THROW(read_csv(ss), ConfigError);
}

TEST(Csv, AppenderWritesHeaderOnce) {
    const auto dir = scratch_dir("csv");
    std::filesystem::create_directories(dir);
    const auto path = dir / "rows.csv";
    StudyRow r;
    r.scenario = "s";
    r.solver = "mc";
    r.paths = 1024;
    { CsvAppender(path).append(r); }
    { CsvAppender(path).append(std::vector<StudyRow>{r, r}); }
    std::ifstream in(path);
    const auto rows = read_csv(in);
    EXPECT_EQ(rows.size(), 3u);
    std::filesystem::remove_all(dir);
}

TEST(ScenarioIo, JsonRoundTripAndHash) {
    for (const auto& sc : catalog()) {
        const auto back = scenario_from_json(to_json(sc));
        EXPECT_EQ(to_json(back), to_json(sc));
        EXPECT_EQ(scenario_hash(back), scenario_hash(sc));
        EXPECT_EQ(scenario_hash(sc).size(), 16u);
    }
    EXPECT_NE(scenario_hash(catalog_scenario("tail-early-eq")), scenario_hash(catalog_scenario("tail-late-eq")));
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(ScenarioIo, DefaultsAndErrors) {
    const auto sc = scenario_from_json(nlohmann::json::parse(R"({
        "spot": 100, "rate": 0.05, "vol": 0.4,
        "strike": 100, "maturity": 1,
        "fixings": [0.5, 1.0]
    })"));
    EXPECT_EQ(sc.label, "custom");
    EXPECT_EQ(sc.market.yield, 0.0);
    EXPECT_EQ(sc.option.kind, OptionKind::call);
    EXPECT_THROW(scenario_from_json(nlohmann::json::parse(R"({"spot": 100})")), ConfigError);
    EXPECT_THROW(scenario_from_json(nlohmann::json::parse(R"({
        "spot": 100, "rate": 0.05, "vol": 0.4,
        "strike": 100, "maturity": 1, "kind": "straddle",
        "fixings": [1.0]
    })")),
                 ConfigError);
    EXPECT_THROW(resolve_scenario("/no/such/file.json"), ConfigError);
    EXPECT_EQ(resolve_scenario("single-fixing").monitoring.size(), 1u);
}

TEST(ScenarioIo, FileRoundTrip) {
    const auto dir = scratch_dir("scenario");
    std::filesystem::create_directories(dir);
    const auto sc = catalog_scenario("full-late-neq");
    {
        std::ofstream out(dir / "s.json");
        out << to_json(sc).dump(2);
    }
    EXPECT_EQ(scenario_hash(resolve_scenario((dir / "s.json").string())), scenario_hash(sc));
    std::filesystem::remove_all(dir);
}

TEST(Slope, FitAndKnee) {
    const std::vector<double> x{100, 200, 400, 800};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
    const auto f = fit_slope(x, y);
    EXPECT_NEAR(f.slope, -2.0, 1e-12);
    EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-10);
    EXPECT_EQ(f.used, 4u);

    const std::vector<double> floor{1e-2, 2.5e-3, 7e-4, 6e-4, 6e-4};
    EXPECT_EQ(knee_cutoff(floor), 3u);
    EXPECT_EQ(knee_cutoff(y), 4u);
    EXPECT_THROW(fit_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), ConfigError);
}

TEST(RelStdDev, ZeroVolatilityIsZero) {
    auto sc = catalog_scenario("tail-none-eq");
    sc.market.vol = 0.0;
    const double ref = deterministic_price(sc);
    for (auto m : {McMethod::mc, McMethod::mc_av_cv, McMethod::rqmc, McMethod::rqmc_cv})
        EXPECT_LT(rel_std_dev(sc, m, 256, 5, 1, ref).rel_std_dev, 1e-12) << to_string(m);
    EXPECT_THROW(rel_std_dev(sc, McMethod::mc, 256, 1, 1, ref), ConfigError);
    EXPECT_THROW(rel_std_dev(sc, McMethod::mc, 256, 5, 1, 0.0), ConfigError);
}

TEST(RelStdDev, PlainMcShrinksWithPaths) {
    const auto sc = catalog_scenario("tail-early-eq");
    const double ref = 12.8779;
    const double a = rel_std_dev(sc, McMethod::mc, 4096, 100, 7, ref).rel_std_dev;
    const double b = rel_std_dev(sc, McMethod::mc, 8192, 100, 7, ref).rel_std_dev;
    EXPECT_GE(a / b, 1.2);
    EXPECT_LE(a / b, 1.7);
}

TEST(Reference, ZeroVolatilityIsDeterministic) {
    auto sc = catalog_scenario("tail-early-eq");
    sc.market.vol = 0.0;
    const auto r = compute_reference(sc);
    EXPECT_EQ(r.value, deterministic_price(sc));
    EXPECT_EQ(r.method, "deterministic");
    EXPECT_EQ(r.curve.size(), lattice_points);
}

TEST(Reference, SingleFixingIsBlackScholes) {
    const auto sc = single_fixing_scenario();
    const auto r = compute_reference(sc);
    const double bs = bs_price(100, 100, 1, 0.05, 0.02, 0.4, OptionKind::call);
    EXPECT_NEAR(r.value, bs, 5e-4 * bs);
    EXPECT_EQ(r.method, "full-pde-richardson");
}

TEST(Reference, CacheStoreLoadForce) {
    const auto dir = scratch_dir("cache");
    ReferenceCache cache(dir);
    auto sc = catalog_scenario("tail-none-eq");
    sc.market.vol = 0.0;
    EXPECT_FALSE(cache.load(sc));
    const auto r = cache.obtain(sc);
    ASSERT_TRUE(std::filesystem::exists(cache.path_for(r.hash)));
    const auto back = cache.load(sc);
    ASSERT_TRUE(back);
    EXPECT_EQ(back->value, r.value);
    EXPECT_EQ(back->curve, r.curve);
    EXPECT_EQ(back->hash, r.hash);
    EXPECT_THROW(cache.store(r), ConfigError);
    EXPECT_NO_THROW(cache.store(r, true));
    std::filesystem::remove_all(dir);
}

TEST(Solvers, NamesRoundTrip) {
    for (auto s : {SolverKind::full_pde, SolverKind::curran_fd, SolverKind::mc, SolverKind::mc_av_cv, SolverKind::rqmc,
                   SolverKind::rqmc_cv})
        EXPECT_EQ(parse_solver(to_string(s)), s);
    EXPECT_THROW(parse_solver("pde"), ConfigError);
    EXPECT_EQ(parse_dimension("paths"), Dimension::paths);
    EXPECT_THROW(parse_dimension("x"), ConfigError);
    EXPECT_EQ(parse_error_kind("abs-diff"), ErrorKind::abs_diff);
}

TEST(Solvers, PriceDispatch) {
    const auto sc = catalog_scenario("tail-none-eq");
    Resolution res;
    res.ns = 200;
    res.na = 100;
    res.nt = 50;
    res.paths = 4096;
    res.replicates = 8;
    const auto pde = price(sc, SolverKind::full_pde, res);
    EXPECT_TRUE(pde.curve);
    EXPECT_FALSE(pde.std_error);
    const auto mc = price(sc, SolverKind::rqmc_cv, res);
    EXPECT_TRUE(mc.std_error);
    EXPECT_NEAR(pde.value, mc.value, 1e-2 * mc.value);
}

TEST(Study, ConvergeNeedsThreeResolutions) {
    const auto sc = catalog_scenario("tail-none-eq");
    EXPECT_THROW(converge(sc, SolverKind::full_pde, Dimension::s, {100, 200}, nullptr), ConfigError);
    EXPECT_THROW(converge(sc, SolverKind::full_pde, Dimension::s, {200, 100, 400}, nullptr), ConfigError);
    EXPECT_THROW(converge(sc, SolverKind::mc, Dimension::paths, {256, 512, 1024}, nullptr), ConfigError);
}

TEST(Study, RowsAreReproducible) {
    const auto sc = catalog_scenario("tail-none-eq");
    ReferenceRecord rec;
    rec.value = 12.0;
    ConvergeOptions opt;
    opt.outer = 10;
    const auto a = converge(sc, SolverKind::mc, Dimension::paths, {256, 512, 1024}, &rec, opt);
    const auto b = converge(sc, SolverKind::mc, Dimension::paths, {256, 512, 1024}, &rec, opt);
    ASSERT_EQ(a.rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(a.rows[i].value, b.rows[i].value);
        EXPECT_EQ(a.rows[i].error, b.rows[i].error);
        EXPECT_EQ(a.rows[i].error_kind, ErrorKind::rel_std_dev);
    }
}

TEST(Study, CompareSkipsOutOfContract) {
    auto sc = catalog_scenario("tail-none-neq");
    sc.market.vol = 0.0;
    const auto rec = compute_reference(sc);
    Resolution res;
    res.ns = 100;
    res.na = 50;
    res.nt = 30;
    res.paths = 1024;
    res.replicates = 4;
    const auto cmp = compare(sc, rec, res);
    EXPECT_EQ(cmp.rows.size(), 5u);
    ASSERT_EQ(cmp.skipped.size(), 1u);
    EXPECT_NE(cmp.skipped[0].find("curran-fd"), std::string::npos);
    for (const auto& r : cmp.rows) EXPECT_EQ(r.error_kind, ErrorKind::abs_diff);
}
