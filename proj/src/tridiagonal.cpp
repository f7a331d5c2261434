#include "fblv/tridiagonal.hpp"

#include <cassert>

namespace fblv {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::span<double> scratch)
{
    const std::size_t n = diag.size();
    assert(lower.size() >= n && upper.size() >= n && rhs.size() >= n && scratch.size() >= n);
    if (n == 0) return;

    // Forward sweep
    double denom = diag[0];
    scratch[0] = n > 1 ? upper[0] / denom : 0.0;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * scratch[i - 1];
        scratch[i] = i + 1 < n ? upper[i] / denom : 0.0;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    // Back substitution
    for (std::size_t i = n - 1; i > 0; --i) {
        rhs[i - 1] -= scratch[i - 1] * rhs[i];
    }
}

}  // namespace fblv
