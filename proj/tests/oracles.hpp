#pragma once

// Reference computations written independently of the library.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

namespace oracle {

// One fully explicit step of the fixed-domain system on [0, s], mirror at
// x = 0 (no-flux), zero at x = s.
inline std::pair<std::vector<double>, std::vector<double>> explicit_fixed_step(
    const std::vector<double>& u, const std::vector<double>& v, double s, double dt, double k, double h,
    double r, double D)
{
    const std::size_t n = u.size() - 1;
    const double dx = s / static_cast<double>(n);
    std::vector<double> un(n + 1, 0.0), vn(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double ul = i == 0 ? u[1] : u[i - 1];
        const double vl = i == 0 ? v[1] : v[i - 1];
        const double lap_u = (u[i + 1] - 2.0 * u[i] + ul) / (dx * dx);
        const double lap_v = (v[i + 1] - 2.0 * v[i] + vl) / (dx * dx);
        un[i] = u[i] + dt * (lap_u + u[i] * (1.0 - u[i] - k * v[i]));
        vn[i] = v[i] + dt * (D * lap_v + r * v[i] * (1.0 - v[i] - h * u[i]));
    }
    return {un, vn};
}

// Half-line logistic profile -y'' = y(1 - y), y(0) = 0, y(inf) = 1.
// The first integral gives (y')^2 = (1 - y)^2 (2y + 1) / 3, so
//   x(y) = int_0^y sqrt(3) / ((1 - e) sqrt(2e + 1)) de.
inline double logistic_position(double y)
{
    static boost::math::quadrature::tanh_sinh<double> integrator;
    auto f = [](double e) { return std::sqrt(3.0) / ((1.0 - e) * std::sqrt(2.0 * e + 1.0)); };
    return y <= 0.0 ? 0.0 : integrator.integrate(f, 0.0, y);
}

// Inverse of logistic_position by bracketed root finding.
inline double logistic_profile(double x)
{
    if (x <= 0.0) return 0.0;
    auto g = [x](double y) { return logistic_position(y) - x; };
    double hi = 1.0 - 1e-15;
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(g, 0.0, hi, boost::math::tools::eps_tolerance<double>(50),
                                                           iters);
    return 0.5 * (a + b);
}

// Same profile in closed form (w = sqrt(2y + 1) integrates to a tanh law),
// used to cross-check the quadrature.
inline double logistic_profile_closed(double x)
{
    const double s3 = std::sqrt(3.0);
    const double A = 2.0 + s3;
    const double e = A * std::exp(x);
    const double w = s3 * (e - 1.0) / (e + 1.0);
    return (w * w - 1.0) / 2.0;
}

// Scalar logistic flow u' = u(1 - u), exact solution.
inline double logistic_flow(double u0, double t)
{
    return 1.0 / (1.0 + (1.0 / u0 - 1.0) * std::exp(-t));
}

// Single-species front-fixed stepper: implicit diffusion and upwind
// advection, explicit reaction, Stefan rule s' = -mu u_x, no-flux at 0.
struct OneSpecies {
    std::vector<double> U;
    double s;
    double mu;

    void step(double dt)
    {
        const std::size_t n = U.size() - 1;
        const double dxi = 1.0 / static_cast<double>(n);
        const double ux = (U[n - 2] - 4.0 * U[n - 1]) / (2.0 * dxi * s);
        const double sp = 0.0 - mu * ux;
        const double s_new = s + dt * sp;
        const double beta = dt / (s_new * s_new * dxi * dxi);
        std::vector<double> a(n), b(n), c(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double adv = dt * sp / s_new * static_cast<double>(i);
            d[i] = U[i] + dt * U[i] * (1.0 - U[i]);
            if (i == 0) {
                a[i] = 0.0;
                b[i] = 1.0 + 2.0 * beta;
                c[i] = -2.0 * beta;
            } else {
                a[i] = -beta;
                b[i] = 1.0 + 2.0 * beta + adv;
                c[i] = -(beta + adv);
            }
        }
        // Thomas, forward sweep then back substitution.
        for (std::size_t i = 1; i < n; ++i) {
            const double m = a[i] / b[i - 1];
            b[i] -= m * c[i - 1];
            d[i] -= m * d[i - 1];
        }
        U[n - 1] = d[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) U[i] = (d[i] - c[i] * U[i + 1]) / b[i];
        U[n] = 0.0;
        for (auto& y : U) {
            if (y < 0.0 && y >= -1e-12) y = 0.0;
        }
        s = s_new;
    }
};

}  // namespace oracle
