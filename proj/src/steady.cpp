#include "fblv/steady.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fblv/error.hpp"
#include "fblv/tridiagonal.hpp"

namespace fblv {
namespace {

constexpr int kMaxNewtonIterations = 100;

double residual_norm(const std::vector<double>& y, const std::vector<double>& f, double d,
                     double lambda, double inv_dx2, std::vector<double>& out)
{
    const std::size_t m = y.size() - 1;
    double norm = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
        out[j] = -d * (y[j + 1] - 2.0 * y[j] + y[j - 1]) * inv_dx2 - y[j] * (f[j] - lambda * y[j]);
        norm = std::max(norm, std::abs(out[j]));
    }
    return norm;
}

// Damped Newton for -d y'' = y (f - lambda y) with Dirichlet data at both
// ends. The step length halves until the max-norm residual decreases.
std::vector<double> newton_bvp(const std::vector<double>& f, double d, double lambda,
                               const HalfLineGrid& grid, double closure, double ramp_length)
{
    const int m = grid.m;
    const auto um = static_cast<std::size_t>(m);
    const double dx = grid.dx();
    const double inv_dx2 = 1.0 / (dx * dx);

    std::vector<double> y(um + 1);
    for (std::size_t j = 0; j <= um; ++j) {
        y[j] = closure * std::min(1.0, grid.x(static_cast<int>(j)) / ramp_length);
    }
    y[0] = 0.0;
    y[um] = closure;

    std::vector<double> res(um + 1, 0.0), trial_res(um + 1, 0.0), trial(um + 1);
    std::vector<double> lower(um - 1), diag(um - 1), upper(um - 1), rhs(um - 1), scratch(um - 1);

    // Roundoff floor of the discrete operator.
    const double floor = 1e-13 * std::max(1.0, d * inv_dx2);
    double norm = residual_norm(y, f, d, lambda, inv_dx2, res);

    for (int iter = 0; iter < kMaxNewtonIterations; ++iter) {
        if (norm <= floor) return y;
        for (std::size_t j = 1; j < um; ++j) {
            lower[j - 1] = -d * inv_dx2;
            upper[j - 1] = -d * inv_dx2;
            diag[j - 1] = 2.0 * d * inv_dx2 - f[j] + 2.0 * lambda * y[j];
            rhs[j - 1] = -res[j];
        }
        solve_tridiagonal(lower, diag, upper, rhs, scratch);

        double step = 1.0;
        bool accepted = false;
        while (step > 1e-10) {
            trial = y;
            for (std::size_t j = 1; j < um; ++j) trial[j] += step * rhs[j - 1];
            const double trial_norm = residual_norm(trial, f, d, lambda, inv_dx2, trial_res);
            if (trial_norm < norm) {
                y.swap(trial);
                res.swap(trial_res);
                norm = trial_norm;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No descent left; accept only if we already sit at the roundoff floor.
            if (norm <= 1e3 * floor) return y;
            break;
        }
    }
    if (norm <= 1e3 * floor) return y;
    char buf[160];
    std::snprintf(buf, sizeof buf, "Newton did not converge: residual %.3e after %d iterations",
                  norm, kMaxNewtonIterations);
    throw NumericError(buf);
}

void require_length(const HalfLineGrid& grid, double decay_length, const char* what)
{
    if (grid.L < 20.0 * decay_length) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s needs L >= 20 decay lengths (%.4g), got L = %.4g", what,
                      20.0 * decay_length, grid.L);
        throw PreconditionError(buf);
    }
}

}  // namespace

std::vector<double> HalfLineGrid::nodes() const
{
    std::vector<double> xs(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) xs[static_cast<std::size_t>(j)] = x(j);
    return xs;
}

void validate(const HalfLineGrid& g)
{
    if (!(g.L >= 20.0) || !std::isfinite(g.L)) throw PreconditionError("half-line grid needs L >= 20");
    if (g.m < 200) throw PreconditionError("half-line grid needs m >= 200");
}

std::vector<double> solve_logistic_halfline(double d, double alpha, const HalfLineGrid& grid)
{
    if (!(d > 0.0) || !(alpha > 0.0)) throw PreconditionError("logistic BVP needs d, alpha > 0");
    validate(grid);
    const double length = std::sqrt(d / alpha);
    require_length(grid, length, "logistic half-line solve");
    const std::vector<double> f(static_cast<std::size_t>(grid.m) + 1, alpha);
    return newton_bvp(f, d, alpha, grid, 1.0, length);
}

std::vector<double> solve_coupled_halfline(const std::vector<double>& f, double d, double lambda,
                                           const HalfLineGrid& grid)
{
    if (!(d > 0.0) || !(lambda > 0.0)) throw PreconditionError("half-line BVP needs d, lambda > 0");
    validate(grid);
    if (f.size() != static_cast<std::size_t>(grid.m) + 1) {
        throw PreconditionError("coefficient profile must be tabulated on the grid nodes");
    }
    const double f_min = *std::min_element(f.begin(), f.end());
    if (!(f_min > 0.0)) {
        throw PreconditionError("half-line BVP needs inf f > 0 (outside 0 < h, k < 1)");
    }
    const double far = f.back();
    const double length = std::sqrt(d / far);
    require_length(grid, length, "half-line solve");
    return newton_bvp(f, d, lambda, grid, far / lambda, length);
}

HalfLineGrid default_halfline_grid(const ModelParams& p)
{
    // Decay lengths of the four solves: sqrt(d / far-field rate).
    double longest = std::max(1.0, std::sqrt(p.D / p.r));
    double shortest = std::min(1.0, std::sqrt(p.D / p.r));
    if (p.h < 1.0) longest = std::max(longest, std::sqrt(p.D / (p.r * (1.0 - p.h))));
    if (p.k < 1.0) longest = std::max(longest, 1.0 / std::sqrt(1.0 - p.k));
    HalfLineGrid g;
    g.L = std::ceil(40.0 * longest);
    const double dx = 0.01 * shortest;
    g.m = std::max(200, static_cast<int>(std::ceil(g.L / dx)));
    return g;
}

SteadyProfiles build_barriers(const ModelParams& p, const HalfLineGrid& grid)
{
    validate(p);
    if (!(p.h < 1.0 && p.k < 1.0)) {
        throw PreconditionError("barriers need weak competition 0 < h, k < 1");
    }
    SteadyProfiles out;
    out.grid = grid;
    out.u_bar = solve_logistic_halfline(1.0, 1.0, grid);
    out.v_bar = solve_logistic_halfline(p.D, p.r, grid);

    const std::size_t n = out.u_bar.size();
    std::vector<double> f_v(n), f_u(n);
    for (std::size_t j = 0; j < n; ++j) {
        f_v[j] = p.r * (1.0 - p.h * out.u_bar[j]);
        f_u[j] = 1.0 - p.k * out.v_bar[j];
    }
    out.v_low = solve_coupled_halfline(f_v, p.D, p.r, grid);
    out.u_low = solve_coupled_halfline(f_u, 1.0, 1.0, grid);

    constexpr double tol = 1e-8;
    auto fail = [](const char* what, std::size_t j, double excess) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "barrier consistency: %s violated at node %zu by %.3e", what,
                      j, excess);
        throw NumericError(buf);
    };
    for (std::size_t j = 0; j < n; ++j) {
        if (out.u_low[j] > out.u_bar[j] + tol) fail("u_low <= u_bar", j, out.u_low[j] - out.u_bar[j]);
        if (out.v_low[j] > out.v_bar[j] + tol) fail("v_low <= v_bar", j, out.v_low[j] - out.v_bar[j]);
        out.cap_excess_u = std::max(out.cap_excess_u, out.u_low[j] - (1.0 - p.k));
        out.cap_excess_v = std::max(out.cap_excess_v, out.v_low[j] - (1.0 - p.h));
        if (out.u_low[j] < 0.0 || out.v_low[j] < 0.0) fail("nonnegativity", j, 0.0);
        if (j > 0) {
            if (out.u_bar[j] < out.u_bar[j - 1] - tol) fail("u_bar nondecreasing", j, 0.0);
            if (out.v_bar[j] < out.v_bar[j - 1] - tol) fail("v_bar nondecreasing", j, 0.0);
        }
    }
    return out;
}

double interpolate(const HalfLineGrid& grid, const std::vector<double>& y, double x)
{
    const double pos = std::clamp(x, 0.0, grid.L) / grid.dx();
    const auto j = std::min(static_cast<std::size_t>(pos), static_cast<std::size_t>(grid.m) - 1);
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * y[j] + w * y[j + 1];
}

SandwichReport check_sandwich(const RunRecord& record, const SteadyProfiles& barriers,
                              std::pair<double, double> window, double slack)
{
    if (!(slack >= 0.0)) throw PreconditionError("sandwich slack must be nonnegative");
    if (record.kind != ProblemKind::DFB) {
        throw PreconditionError("sandwich check applies to DFB runs");
    }
    const Snapshot& fin = record.final_snapshot();
    const auto [x_lo, x_hi] = window;
    if (!(x_lo >= 0.0) || !(x_hi > x_lo) || x_hi > fin.s) {
        throw PreconditionError("sandwich window must lie inside [0, s(t_max)]");
    }
    if (x_hi > barriers.grid.L) throw PreconditionError("sandwich window exceeds barrier grid");

    SandwichReport rep;
    rep.slack = slack;
    rep.max_lower_violation_u = rep.max_upper_violation_u = -INFINITY;
    rep.max_lower_violation_v = rep.max_upper_violation_v = -INFINITY;
    const int n = static_cast<int>(fin.U.size()) - 1;
    for (int i = 0; i <= n; ++i) {
        const double x = fin.s * i / n;
        if (x < x_lo || x > x_hi) continue;
        const auto ui = static_cast<std::size_t>(i);
        const auto& g = barriers.grid;
        rep.max_lower_violation_u = std::max(rep.max_lower_violation_u, interpolate(g, barriers.u_low, x) - fin.U[ui]);
        rep.max_upper_violation_u = std::max(rep.max_upper_violation_u, fin.U[ui] - interpolate(g, barriers.u_bar, x));
        rep.max_lower_violation_v = std::max(rep.max_lower_violation_v, interpolate(g, barriers.v_low, x) - fin.V[ui]);
        rep.max_upper_violation_v = std::max(rep.max_upper_violation_v, fin.V[ui] - interpolate(g, barriers.v_bar, x));
        ++rep.nodes_checked;
    }
    if (rep.nodes_checked == 0) throw PreconditionError("sandwich window contains no grid nodes");
    rep.pass = rep.max_lower_violation_u <= slack && rep.max_upper_violation_u <= slack &&
               rep.max_lower_violation_v <= slack && rep.max_upper_violation_v <= slack;
    return rep;
}

}  // namespace fblv
