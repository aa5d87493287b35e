#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "asian/core.hpp"
#include "asian/errors.hpp"

namespace asian {

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

/// Uniform grid on [0, upper] with nodes i*h.
class UniformGrid {
public:
    static constexpr std::size_t min_nodes = 8;

    UniformGrid(double spacing, std::size_t nodes) : h_(spacing), nodes_(nodes) {
        if (nodes < min_nodes) throw ConfigError("grid needs at least " + std::to_string(min_nodes) + " nodes");
        if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("grid spacing must be positive");
        for (std::size_t i = 0; i < nodes; ++i) nodes_[i] = static_cast<double>(i) * h_;
    }

    /// `nodes` points covering roughly [0, upper] with `anchor` lying exactly on a node.
    static UniformGrid anchored(double anchor, double upper, std::size_t nodes) {
        if (nodes < min_nodes) throw ConfigError("grid needs at least " + std::to_string(min_nodes) + " nodes");
        if (!(anchor > 0.0) || !(upper > anchor)) throw ConfigError("grid anchor must lie inside (0, upper)");
        const double cells = static_cast<double>(nodes - 1);
        const double m = std::max(1.0, std::round(cells * anchor / upper));
        return UniformGrid(anchor / m, nodes);
    }

    double spacing() const { return h_; }
    std::size_t size() const { return nodes_.size(); }
    double upper() const { return nodes_.back(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    std::span<const double> nodes() const { return nodes_; }

private:
    double h_;
    std::vector<double> nodes_;
};

using ValueSlice = std::vector<double>;

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

/// First index of the four consecutive nodes used to interpolate at x: two
/// nodes on each side when possible, clamped to the outermost cubic near and
/// beyond the grid ends.
inline std::size_t stencil_start(const UniformGrid& grid, double x) {
    const std::size_t n = grid.size();
    const double cell = std::floor(x / grid.spacing());
    if (!(cell >= 1.0)) return 0;  // also catches NaN
    const double last = static_cast<double>(n - 4);
    return cell - 1.0 >= last ? n - 4 : static_cast<std::size_t>(cell) - 1;
}

inline std::array<std::size_t, 4> select_stencil(const UniformGrid& grid, double x) {
    const std::size_t s = stencil_start(grid, x);
    return {s, s + 1, s + 2, s + 3};
}

/// Cubic Lagrange interpolant through four points, evaluated in barycentric form.
inline double barycentric4(std::span<const double, 4> x, std::span<const double, 4> y, double q) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        const double d = q - x[j];
        if (d == 0.0) return y[j];
        double w = 1.0;
        for (std::size_t k = 0; k < 4; ++k)
            if (k != j) w *= x[j] - x[k];
        const double t = 1.0 / (w * d);
        num += t * y[j];
        den += t;
    }
    return num / den;
}

/// Reads `values` (aligned with `grid`, stride `stride`) at x.
inline double interpolate(const UniformGrid& grid, const double* values, std::size_t stride, double x) {
    const std::size_t s = stencil_start(grid, x);
    const std::array<double, 4> xs{grid[s], grid[s + 1], grid[s + 2], grid[s + 3]};
    const std::array<double, 4> ys{values[s * stride], values[(s + 1) * stride], values[(s + 2) * stride],
                                   values[(s + 3) * stride]};
    return barycentric4(xs, ys, x);
}

inline double interpolate(const UniformGrid& grid, std::span<const double> values, double x) {
    return interpolate(grid, values.data(), 1, x);
}

// ---------------------------------------------------------------------------
// Tridiagonal kernel
// ---------------------------------------------------------------------------

/// A x = rhs with A given by its three diagonals; lower[i] couples row i+1 to
/// column i, upper[i] couples row i to column i+1.
struct TridiagonalSystem {
    std::vector<double> lower;
    std::vector<double> diagonal;
    std::vector<double> upper;
    std::vector<double> rhs;
};

inline constexpr double singular_pivot = 1e-300;

/// LU factors of a tridiagonal matrix, reusable for many right-hand sides.
class TridiagonalFactor {
public:
    TridiagonalFactor() = default;

    TridiagonalFactor(std::span<const double> lower, std::span<const double> diagonal, std::span<const double> upper) {
        const std::size_t n = diagonal.size();
        if (n == 0) throw ConfigError("empty tridiagonal system");
        if (lower.size() + 1 != n || upper.size() + 1 != n)
            throw ConfigError("tridiagonal coefficient arrays have inconsistent lengths");
        lower_.assign(lower.begin(), lower.end());
        inv_pivot_.resize(n);
        upper_scaled_.resize(n > 0 ? n - 1 : 0);
        double pivot = diagonal[0];
        for (std::size_t i = 0;; ++i) {
            if (!(std::abs(pivot) >= singular_pivot)) throw NumericalError("singular pivot in tridiagonal solve");
            inv_pivot_[i] = 1.0 / pivot;
            if (i + 1 == n) break;
            upper_scaled_[i] = upper[i] * inv_pivot_[i];
            pivot = diagonal[i + 1] - lower[i] * upper_scaled_[i];
        }
    }

    std::size_t size() const { return inv_pivot_.size(); }

    /// Overwrites x (holding the right-hand side) with the solution.
    void solve_in_place(std::span<double> x) const {
        const std::size_t n = size();
        x[0] *= inv_pivot_[0];
        for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - lower_[i - 1] * x[i - 1]) * inv_pivot_[i];
        for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper_scaled_[i] * x[i + 1];
    }

private:
    std::vector<double> lower_;
    std::vector<double> inv_pivot_;
    std::vector<double> upper_scaled_;
};

inline std::vector<double> solve_tridiagonal(const TridiagonalSystem& system) {
    if (system.rhs.size() != system.diagonal.size()) throw ConfigError("rhs length does not match the system");
    TridiagonalFactor factor(system.lower, system.diagonal, system.upper);
    std::vector<double> x = system.rhs;
    factor.solve_in_place(x);
    return x;
}

// ---------------------------------------------------------------------------
// Black-Scholes operator and time marching
// ---------------------------------------------------------------------------

/// Backward march over [t_a, t_b]. With `rannacher` the first step is taken as
/// four implicit-Euler quarter steps.
struct StepPlan {
    double t_a = 0.0;
    double t_b = 0.0;
    std::size_t steps = 1;
    bool rannacher = true;

    void validate() const {
        if (!(t_a < t_b)) throw ConfigError("step plan needs t_a < t_b");
        if (steps < 1) throw ConfigError("step plan needs at least one step");
    }
};

/// Marches slices of V(S) backward in time under
///   V_t + 1/2 s^2 S^2 V_SS + (r - q) S V_S - r V = 0
/// on a uniform grid from S = 0. Row 0 carries V_t = r V; the last node is
/// tied to its neighbours by V_SS = 0.
class SliceMarcher {
public:
    SliceMarcher(const UniformGrid& grid, const MarketParams& market, const StepPlan& plan)
        : n_(grid.size()), plan_(plan), rate_(market.rate) {
        plan.validate();
        a_.resize(n_);
        b_.resize(n_);
        c_.resize(n_);
        const double s2 = market.vol * market.vol;
        const double mu = market.carry();
        // S_i / h = i on a grid starting at zero, so the coefficients do not depend on h.
        a_[0] = c_[0] = 0.0;
        b_[0] = -rate_;
        for (std::size_t i = 1; i + 1 < n_; ++i) {
            const double x = static_cast<double>(i);
            a_[i] = 0.5 * s2 * x * x - 0.5 * mu * x;
            b_[i] = -s2 * x * x - rate_;
            c_[i] = 0.5 * s2 * x * x + 0.5 * mu * x;
        }
        dt_ = (plan.t_b - plan.t_a) / static_cast<double>(plan.steps);
        if (plan.rannacher) euler_ = factor(1.0, 0.25 * dt_);
        if (!plan.rannacher || plan.steps > 1) cn_ = factor(0.5, dt_);
    }

    /// Marches one slice from t_b down to t_a in place. `scratch` must hold at
    /// least grid.size() values.
    void advance(std::span<double> v, std::span<double> scratch) const {
        std::size_t cn_steps = plan_.steps;
        if (plan_.rannacher) {
            for (int k = 0; k < 4; ++k) step(v, scratch, euler_, 1.0, 0.25 * dt_);
            --cn_steps;
        }
        for (std::size_t k = 0; k < cn_steps; ++k) step(v, scratch, cn_, 0.5, dt_);
    }

    std::size_t size() const { return n_; }

private:
    // Implicit operator (I - theta dt L) restricted to rows 0..n-2, with the last
    // node eliminated through V_{n-1} = 2 V_{n-2} - V_{n-3}.
    TridiagonalFactor factor(double theta, double dt) const {
        const std::size_t m = n_ - 1;
        std::vector<double> lower(m - 1), diag(m), upper(m - 1);
        for (std::size_t i = 0; i < m; ++i) {
            diag[i] = 1.0 - theta * dt * b_[i];
            if (i > 0) lower[i - 1] = -theta * dt * a_[i];
            if (i + 1 < m) upper[i] = -theta * dt * c_[i];
        }
        const std::size_t k = m - 1;
        diag[k] = 1.0 - theta * dt * (b_[k] + 2.0 * c_[k]);
        lower[k - 1] = -theta * dt * (a_[k] - c_[k]);
        return TridiagonalFactor(lower, diag, upper);
    }

    void step(std::span<double> v, std::span<double> rhs, const TridiagonalFactor& f, double theta,
              double dt) const {
        const std::size_t m = n_ - 1;
        const double e = (1.0 - theta) * dt;
        rhs[0] = v[0] + e * b_[0] * v[0];
        for (std::size_t i = 1; i < m; ++i)
            rhs[i] = v[i] + e * (a_[i] * v[i - 1] + b_[i] * v[i] + c_[i] * v[i + 1]);
        f.solve_in_place(rhs.first(m));
        for (std::size_t i = 0; i < m; ++i) v[i] = rhs[i];
        v[m] = 2.0 * v[m - 1] - v[m - 2];
    }

    std::size_t n_;
    StepPlan plan_;
    double rate_;
    double dt_ = 0.0;
    std::vector<double> a_, b_, c_;
    TridiagonalFactor euler_, cn_;
};

inline ValueSlice march(ValueSlice slice, const UniformGrid& grid, const MarketParams& market, const StepPlan& plan) {
    if (slice.size() != grid.size()) throw ConfigError("slice is not aligned with the grid");
    SliceMarcher marcher(grid, market, plan);
    std::vector<double> scratch(grid.size());
    marcher.advance(slice, scratch);
    for (double x : slice)
        if (!std::isfinite(x)) throw NumericalError("non-finite value after time march");
    return slice;
}

/// Splits `total` steps over intervals proportionally to their length, rounding
/// up, with at least `min_steps` per interval.
inline std::vector<std::size_t> allocate_steps(std::span<const double> lengths, std::size_t total,
                                               std::size_t min_steps = 4) {
    double span = 0.0;
    for (double l : lengths) span += l;
    std::vector<std::size_t> out;
    out.reserve(lengths.size());
    for (double l : lengths) {
        const double share = std::ceil(static_cast<double>(total) * l / span - 1e-9);
        out.push_back(std::max<std::size_t>(min_steps, static_cast<std::size_t>(std::max(share, 0.0))));
    }
    return out;
}

}  // namespace asian
