#pragma once

#include <utility>
#include <vector>

#include "fblv/core.hpp"
#include "fblv/solver.hpp"

namespace fblv {

/// Uniform truncation of [0, infinity): x_j = j L / m, j = 0..m.
struct HalfLineGrid {
    double L = 40.0;
    int m = 4000;

    double dx() const { return L / m; }
    double x(int j) const { return L * j / m; }
    std::vector<double> nodes() const;
};

void validate(const HalfLineGrid& grid);

/// Solves -d y'' = alpha y (1 - y), y(0) = 0, closed by y(L) = 1.
/// Requires L >= 20 sqrt(d / alpha). Throws NumericError if damped Newton
/// does not converge in 100 iterations.
std::vector<double> solve_logistic_halfline(double d, double alpha, const HalfLineGrid& grid);

/// Solves -d u'' = u (f(x) - lambda u), u(0) = 0, closed by u(L) = f(L) / lambda.
/// `f` is tabulated on the grid nodes and must have a positive infimum.
std::vector<double> solve_coupled_halfline(const std::vector<double>& f, double d, double lambda,
                                           const HalfLineGrid& grid);

/// Upper (u_bar, v_bar) and lower (u_low, v_low) steady barriers for the
/// weakly competing Dirichlet problem.
struct SteadyProfiles {
    HalfLineGrid grid;
    std::vector<double> u_bar, v_bar, u_low, v_low;
    // max(u_low - (1-k)) and max(v_low - (1-h)), clipped at 0. Both vanish
    // when D = r; otherwise the lower profile of the faster species rises
    // above its coexistence cap before settling to it.
    double cap_excess_u = 0.0;
    double cap_excess_v = 0.0;
};

/// Grid long enough for every barrier solve of `params` (20 decay lengths
/// twice over) with spacing 0.01 in the shortest diffusion length.
HalfLineGrid default_halfline_grid(const ModelParams& params);

/// Requires 0 < h, k < 1. Verifies ordering, positivity and monotonicity
/// before returning and throws NumericError on an inconsistency beyond 1e-8.
/// Excess over the caps 1-k, 1-h is measured, not enforced.
SteadyProfiles build_barriers(const ModelParams& params, const HalfLineGrid& grid);

struct SandwichReport {
    double max_lower_violation_u = 0.0;  // max(u_low - U) over the window
    double max_upper_violation_u = 0.0;  // max(U - u_bar)
    double max_lower_violation_v = 0.0;
    double max_upper_violation_v = 0.0;
    double slack = 0.0;
    int nodes_checked = 0;
    bool pass = false;
};

/// Compares the final profiles of a DFB run against the barriers on
/// [x_lo, x_hi], at the run's own nodes with barriers interpolated there.
/// Passes when every violation is <= slack.
SandwichReport check_sandwich(const RunRecord& record, const SteadyProfiles& barriers,
                              std::pair<double, double> window, double slack);

/// Linear interpolation of a grid profile at x (clamped to [0, L]).
double interpolate(const HalfLineGrid& grid, const std::vector<double>& y, double x);

}  // namespace fblv
