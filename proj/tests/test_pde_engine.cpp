#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "asian/analytics.hpp"
#include "asian/pde_engine.hpp"
#include "oracles.hpp"

using namespace asian;

TEST(Tridiagonal, Identity) {
    const auto x = solve_tridiagonal({{0, 0}, {1, 1, 1}, {0, 0}, {3, -1, 4}});
    EXPECT_EQ(x, (std::vector<double>{3, -1, 4}));
}

TEST(Tridiagonal, TwoByTwo) {
    const auto x = solve_tridiagonal({{1}, {2, 2}, {1}, {3, 3}});
    EXPECT_NEAR(x[0], 1.0, 1e-15);
    EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(Tridiagonal, ThreeByThreeAgainstDense) {
    const auto x = solve_tridiagonal({{1, 1}, {4, 4, 4}, {1, 1}, {6, 6, 6}});
    const auto ref = oracle::dense_solve({{4, 1, 0}, {1, 4, 1}, {0, 1, 4}}, {6, 6, 6});
    const std::vector<double> exact{9.0 / 7.0, 6.0 / 7.0, 9.0 / 7.0};
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(x[i], ref[i], 1e-12);
        EXPECT_NEAR(x[i], exact[i], 1e-12);
    }
}

TEST(Tridiagonal, RandomDominantSystems) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {1u, 2u, 5u, 64u, 512u}) {
        TridiagonalSystem s;
        s.diagonal.resize(n);
        s.lower.resize(n - 1);
        s.upper.resize(n - 1);
        s.rhs.resize(n);
        std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i + 1 < n; ++i) {
            s.lower[i] = u(rng);
            s.upper[i] = u(rng);
            dense[i + 1][i] = s.lower[i];
            dense[i][i + 1] = s.upper[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            s.diagonal[i] = 2.5 + u(rng);
            dense[i][i] = s.diagonal[i];
            s.rhs[i] = 10.0 * u(rng);
        }
        const auto x = solve_tridiagonal(s);
        const auto ref = oracle::dense_solve(dense, s.rhs);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], ref[i], 1e-9 * std::max(1.0, std::abs(ref[i])));
    }
}

TEST(Tridiagonal, SingularPivotThrows) {
    EXPECT_THROW(solve_tridiagonal({{1}, {0, 1}, {1}, {1, 1}}), NumericalError);
    EXPECT_THROW(solve_tridiagonal({{1}, {1, 1}, {1}, {1, 1}}), NumericalError);
}

TEST(Tridiagonal, InconsistentLengthsThrow) {
    EXPECT_THROW(solve_tridiagonal({{1, 1}, {1, 1}, {1}, {1, 1}}), ConfigError);
    EXPECT_THROW(solve_tridiagonal({{1}, {1, 1}, {1}, {1}}), ConfigError);
}

TEST(Barycentric, ExactOnCubic) {
    const std::array<double, 4> x{0, 1, 2, 3};
    const std::array<double, 4> y{0, 1, 8, 27};
    EXPECT_NEAR(barycentric4(x, y, 1.5), 3.375, 1e-12);
}

TEST(Barycentric, Constant) {
    const std::array<double, 4> x{0.1, 0.4, 0.9, 1.7};
    const std::array<double, 4> y{2.5, 2.5, 2.5, 2.5};
    for (double q : {-3.0, 0.1, 0.5, 1.0, 5.0}) EXPECT_NEAR(barycentric4(x, y, q), 2.5, 1e-12);
}

TEST(Barycentric, QuarticAgainstLagrange) {
    const std::array<double, 4> x{0, 1, 2, 3};
    const std::array<double, 4> y{0, 1, 16, 81};
    EXPECT_NEAR(barycentric4(x, y, 1.5), oracle::lagrange(x, y, 1.5), 1e-12);
    // The cubic through x^4 at 0..3 is x^4 - x(x-1)(x-2)(x-3).
    EXPECT_NEAR(barycentric4(x, y, 1.5), 4.5, 1e-12);
}

TEST(Barycentric, NodeHitReturnsValue) {
    const std::array<double, 4> x{0, 1, 2, 3};
    const std::array<double, 4> y{5, -1, 7, 2};
    for (int j = 0; j < 4; ++j) EXPECT_EQ(barycentric4(x, y, x[j]), y[j]);
}

TEST(Barycentric, RandomCubics) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const double c0 = u(rng), c1 = u(rng), c2 = u(rng), c3 = u(rng);
        const auto p = [&](double t) { return c0 + t * (c1 + t * (c2 + t * c3)); };
        const double x0 = u(rng);
        const std::array<double, 4> x{x0, x0 + 0.5, x0 + 1.0, x0 + 1.5};
        const std::array<double, 4> y{p(x[0]), p(x[1]), p(x[2]), p(x[3])};
        const double q = x0 - 0.5 + 2.5 * (u(rng) + 2.0) / 4.0;
        const double want = p(q);
        EXPECT_NEAR(barycentric4(x, y, q), want, 1e-10 * std::max(1.0, std::abs(want)));
    }
}

TEST(Stencil, CenteredAndClamped) {
    const UniformGrid g(1.0, 11);
    EXPECT_EQ(select_stencil(g, 4.3), (std::array<std::size_t, 4>{3, 4, 5, 6}));
    EXPECT_EQ(select_stencil(g, 0.1), (std::array<std::size_t, 4>{0, 1, 2, 3}));
    EXPECT_EQ(select_stencil(g, 10.7), (std::array<std::size_t, 4>{7, 8, 9, 10}));
    EXPECT_EQ(select_stencil(g, -1.0), (std::array<std::size_t, 4>{0, 1, 2, 3}));
}

TEST(Grid, AnchoredPutsAnchorOnNode) {
    const auto g = UniformGrid::anchored(100.0, 1234.5, 801);
    EXPECT_EQ(g[0], 0.0);
    EXPECT_EQ(g.size(), 801u);
    const double m = std::round(100.0 / g.spacing());
    EXPECT_NEAR(g[static_cast<std::size_t>(m)], 100.0, 1e-10);
    EXPECT_THROW(UniformGrid(1.0, 7), ConfigError);
}

namespace {

const MarketParams market{100.0, 0.05, 0.02, 0.4};

}  // namespace

TEST(March, ZeroStaysZero) {
    const UniformGrid g(1.0, 200);
    const auto v = march(ValueSlice(200, 0.0), g, market, {0.0, 1.0, 50, true});
    for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(March, CashDiscounts) {
    MarketParams m = market;
    m.yield = 0.0;
    const UniformGrid g(1.0, 200);
    const double c = 3.0;
    // The implicit-Euler start is first order in time, so the step count matters.
    const auto v = march(ValueSlice(200, c), g, m, {0.25, 1.0, 400, true});
    for (double x : v) EXPECT_NEAR(x, c * std::exp(-m.rate * 0.75), 1e-8 * c);
    const auto w = march(ValueSlice(200, c), g, m, {0.25, 1.0, 40, false});
    for (double x : w) EXPECT_NEAR(x, c * std::exp(-m.rate * 0.75), 1e-8 * c);
}

TEST(March, EuropeanCallMatchesClosedForm) {
    const UniformGrid g = UniformGrid::anchored(100.0, 100.0 * std::exp(0.03 + 2.4), 800);
    ValueSlice v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::max(g[i] - 100.0, 0.0);
    v = march(std::move(v), g, market, {0.0, 1.0, 400, true});
    const double bs = bs_price(100.0, 100.0, 1.0, 0.05, 0.02, 0.4, OptionKind::call);
    EXPECT_NEAR(interpolate(g, v, 100.0), bs, 2e-4 * bs);
}

TEST(March, Linear) {
    const UniformGrid g(0.5, 300);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ValueSlice a(g.size()), b(g.size()), mix(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        a[i] = std::max(g[i] - 70.0, 0.0) + u(rng);
        b[i] = std::max(90.0 - g[i], 0.0) * u(rng);
        mix[i] = 2.0 * a[i] - 0.5 * b[i];
    }
    const StepPlan plan{0.0, 0.5, 30, true};
    const auto ma = march(a, g, market, plan), mb = march(b, g, market, plan), mm = march(mix, g, market, plan);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double want = 2.0 * ma[i] - 0.5 * mb[i];
        EXPECT_NEAR(mm[i], want, 1e-10 * std::max(1.0, std::abs(want)));
    }
}

TEST(March, SecondOrderInSpaceAndTime) {
    // Smooth data: start from the closed form at t_b = 0.5 and march to 0.
    const double upper = 400.0;
    const auto max_err = [&](std::size_t cells, std::size_t steps) {
        const UniformGrid g(upper / static_cast<double>(cells), cells + 1);
        ValueSlice v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = bs_price(g[i], 100.0, 0.5, 0.05, 0.02, 0.4, OptionKind::call);
        v = march(std::move(v), g, market, {0.0, 0.5, steps, false});
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g[i] >= 60.0 && g[i] <= 160.0)
                worst = std::max(worst, std::abs(v[i] - bs_price(g[i], 100.0, 1.0, 0.05, 0.02, 0.4, OptionKind::call)));
        return worst;
    };
    const double coarse = max_err(400, 50), fine = max_err(800, 100);
    EXPECT_GE(coarse / fine, 3.2);
    EXPECT_LE(coarse / fine, 4.8);
}

TEST(March, RejectsBadPlans) {
    const UniformGrid g(1.0, 20);
    EXPECT_THROW(march(ValueSlice(20, 0.0), g, market, {1.0, 1.0, 4, true}), ConfigError);
    EXPECT_THROW(march(ValueSlice(20, 0.0), g, market, {0.0, 1.0, 0, true}), ConfigError);
    EXPECT_THROW(march(ValueSlice(19, 0.0), g, market, {0.0, 1.0, 4, true}), ConfigError);
}

TEST(Steps, ProportionalWithFloor) {
    const std::vector<double> lengths{0.9, 0.05, 0.05};
    const auto s = allocate_steps(lengths, 100);
    EXPECT_EQ(s, (std::vector<std::size_t>{90, 5, 5}));
    const std::vector<double> tiny{0.999, 0.001};
    EXPECT_EQ(allocate_steps(tiny, 100)[1], 4u);
}
