#pragma once

#include <span>

namespace fblv {

/// Thomas algorithm for a tridiagonal system. `lower[0]` and
/// `upper[n-1]` are ignored. The solution overwrites `rhs`; `scratch`
/// must hold at least n values. No pivoting: callers supply diagonally
/// dominant matrices.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::span<double> scratch);

}  // namespace fblv
