#include "fblv/odelimits.hpp"

#include <cmath>
#include <cstdio>

#include "fblv/error.hpp"

namespace fblv {

std::vector<OdeState> integrate_ode(const ModelParams& p, double u0, double v0, double t_max,
                                    const OdeOptions& options)
{
    if (!(u0 > 0.0) || !(v0 > 0.0)) throw PreconditionError("ODE initial data must be positive");
    if (!(t_max >= 0.0) || !(options.dt > 0.0) || options.sample_stride < 1) {
        throw PreconditionError("ODE needs t_max >= 0, dt > 0, sample_stride >= 1");
    }
    auto rhs = [&p](double u, double v) {
        return std::pair{u * (1.0 - u - p.k * v), p.r * v * (1.0 - v - p.h * u)};
    };

    const auto steps = static_cast<long long>(std::ceil(t_max / options.dt - 1e-9));
    std::vector<OdeState> out{{0.0, u0, v0}};
    double u = u0;
    double v = v0;
    for (long long n = 1; n <= steps; ++n) {
        const double t_prev = static_cast<double>(n - 1) * options.dt;
        const double t = n == steps ? t_max : static_cast<double>(n) * options.dt;
        const double dt = t - t_prev;
        const auto [k1u, k1v] = rhs(u, v);
        const auto [k2u, k2v] = rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v);
        const auto [k3u, k3v] = rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v);
        const auto [k4u, k4v] = rhs(u + dt * k3u, v + dt * k3v);
        u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (!std::isfinite(u) || !std::isfinite(v)) {
            throw NumericError("ODE state became non-finite at t=" + std::to_string(t));
        }
        if (n % options.sample_stride == 0 || n == steps) out.push_back({t, u, v});
    }
    return out;
}

double closed_form_v_low(double h, double k, int j)
{
    const double sigma = h * k;
    double sum = 0.0;
    double term = 1.0;
    for (int i = 0; i < j; ++i) {
        sum += term;
        term *= sigma;
    }
    return (1.0 - h) * sum;
}

IterationSeq iterate_bounds(double h, double k, int J)
{
    if (!(h > 0.0 && h < 1.0 && k >= 1.0) || !std::isfinite(k)) {
        throw PreconditionError("iteration needs 0 < h < 1 <= k");
    }
    if (J < 1) throw PreconditionError("iteration needs J >= 1");

    IterationSeq seq;
    seq.sigma = h * k;
    double u_bar = 1.0;
    double v_low = 1.0 - h;
    for (int j = 1;; ++j) {
        seq.u_bar.push_back(u_bar);
        seq.v_low.push_back(v_low);

        const double expected = closed_form_v_low(h, k, j);
        if (std::abs(v_low - expected) > 1e-12) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "recurrence v_low_%d = %.17g departs from closed form %.17g",
                          j, v_low, expected);
            throw NumericError(buf);
        }
        if (k * v_low >= 1.0) {
            seq.stopped_early = true;
            break;
        }
        if (j == J) break;
        u_bar = 1.0 - k * v_low;
        v_low = 1.0 - h * u_bar;
    }
    return seq;
}

}  // namespace fblv
