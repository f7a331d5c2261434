#include "fblv/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "fblv/error.hpp"

namespace fblv {
namespace {

using std::numbers::pi;

// Time-dependent factors of the barrier at one time level.
struct TimeLevel {
    double amp;         // K e^{-gamma t}
    double sigma;
    double sigma_dot;
};

TimeLevel time_level(const SupersolutionParams& p, double t)
{
    const double decay = std::exp(-p.gamma * t);
    return {p.K * decay, p.s0 * (1.0 + p.delta - 0.5 * p.delta * decay),
            0.5 * p.s0 * p.delta * p.gamma * decay};
}

// t -> infinity: amplitude and sigma' vanish, sigma reaches s0 (1 + delta).
TimeLevel limit_level(const SupersolutionParams& p)
{
    return {0.0, p.s0 * (1.0 + p.delta), 0.0};
}

std::vector<double> logspace(double lo, double hi, int n)
{
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    }
    return out;
}

// PDE margins at every interior sample. The t -> infinity level is checked
// after dividing by the vanishing amplitude, which keeps its sign visible.
std::pair<double, double> pde_margins(const SupersolutionParams& p, const ModelParams& params,
                                      const SupersolutionGrid& grid,
                                      const std::vector<double>& sin_y,
                                      const std::vector<double>& y_cos_y)
{
    double worst_u = std::numeric_limits<double>::infinity();
    double worst_v = worst_u;
    for (int i = 0; i <= grid.nt; ++i) {
        const TimeLevel lv = time_level(p, grid.t_check * i / grid.nt);
        const double k2 = (pi / lv.sigma) * (pi / lv.sigma);
        const double drift = lv.amp * pi * lv.sigma_dot / lv.sigma;
        for (std::size_t j = 0; j < sin_y.size(); ++j) {
            const double w = lv.amp * sin_y[j];
            const double w_t = -p.gamma * w - drift * y_cos_y[j];
            const double w_xx = -k2 * w;
            worst_u = std::min(worst_u, w_t - w_xx - w * (1.0 - w));
            worst_v = std::min(worst_v, w_t - params.D * w_xx - params.r * w * (1.0 - w));
        }
    }
    const TimeLevel lim = limit_level(p);
    const double k2 = (pi / lim.sigma) * (pi / lim.sigma);
    for (double sy : sin_y) {
        worst_u = std::min(worst_u, sy * (k2 - 1.0 - p.gamma));
        worst_v = std::min(worst_v, sy * (params.D * k2 - params.r - p.gamma));
    }
    return {worst_u, worst_v};
}

double initial_margin(const SupersolutionParams& p, const InitialData& init, int nx)
{
    double worst = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= nx; ++j) {
        const double x = p.s0 * j / nx;
        const double w = eval_barrier(p, 0.0, x).w;
        const auto [u0, v0] = init.at(x);
        worst = std::min({worst, w - u0, w - v0});
    }
    return worst;
}

struct YTable {
    std::vector<double> sin_y, y_cos_y;
};

YTable y_table(int nx)
{
    YTable tab;
    for (int j = 1; j <= nx; ++j) {
        const double y = static_cast<double>(j) / (nx + 1);
        tab.sin_y.push_back(std::sin(pi * y));
        tab.y_cos_y.push_back(y * std::cos(pi * y));
    }
    return tab;
}

SupersolutionReport verify_with_table(const SupersolutionParams& p, double mu,
                                      const ModelParams& params, const InitialData& init,
                                      const SupersolutionGrid& grid, const YTable& tab)
{
    SupersolutionReport rep;
    rep.grid = grid;
    const auto [pu, pv] = pde_margins(p, params, grid, tab.sin_y, tab.y_cos_y);
    rep.margins.pde_u = pu;
    rep.margins.pde_v = pv;
    rep.margins.initial = initial_margin(p, init, grid.nx);

    double front = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid.nt; ++i) {
        const TimeLevel lv = time_level(p, grid.t_check * i / grid.nt);
        const double w_x_front = lv.amp * pi / lv.sigma * std::cos(pi);
        front = std::min(front, lv.sigma_dot + mu * (1.0 + params.rho) * w_x_front);
    }
    rep.margins.front = front;
    rep.pass = pu >= 0.0 && pv >= 0.0 && rep.margins.initial >= 0.0 && front >= 0.0;
    return rep;
}

}  // namespace

BarrierValue eval_barrier(const SupersolutionParams& p, double t, double x)
{
    const TimeLevel lv = time_level(p, t);
    if (!(x >= 0.0) || x > lv.sigma) {
        throw PreconditionError("barrier evaluated outside [0, sigma(t)]");
    }
    // sin(pi * 1) is not exactly zero in floating point; pin the endpoint.
    const double w = x == lv.sigma ? 0.0 : lv.amp * std::sin(pi * x / lv.sigma);
    return {lv.sigma, w};
}

SupersolutionReport verify_supersolution(const SupersolutionParams& p, double mu,
                                         const ModelParams& params, const InitialData& init,
                                         const SupersolutionGrid& grid)
{
    if (grid.nt < 1 || grid.nx < 1 || !(grid.t_check > 0.0)) {
        throw PreconditionError("supersolution grid needs nt, nx >= 1 and t_check > 0");
    }
    return verify_with_table(p, mu, params, init, grid, y_table(grid.nx));
}

double max_front_mu(const SupersolutionParams& p, const ModelParams& params,
                    const SupersolutionGrid& grid)
{
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid.nt; ++i) {
        const TimeLevel lv = time_level(p, grid.t_check * i / grid.nt);
        const double pull = (1.0 + params.rho) * lv.amp * pi / lv.sigma;
        if (pull > 0.0) best = std::min(best, lv.sigma_dot / pull);
    }
    return best;
}

Mu0Result search_mu0(const ModelParams& params, ProblemKind kind, const InitialData& init,
                     const Mu0SearchSpec& spec)
{
    if (kind != ProblemKind::DFB) {
        throw PreconditionError("the explicit vanishing barrier covers DFB only");
    }
    validate(params);
    const double lam = lambda_threshold(params, kind);
    if (params.s0 >= lam) {
        throw NoResultError("no threshold exists: s0 >= lambda, every mu spreads");
    }

    const auto deltas = spec.deltas.empty() ? logspace(1e-3, 1.0, 13) : spec.deltas;
    const auto gammas = spec.gammas.empty() ? logspace(1e-3, 1.0, 13) : spec.gammas;
    const auto factors = spec.k_factors.empty()
                             ? std::vector<double>{1.0, 1.05, 1.1, 1.25, 1.5, 2.0, 3.0, 4.0}
                             : spec.k_factors;
    const double sup0 = std::max(init.sup_u(), init.sup_v());
    const YTable tab = y_table(spec.grid.nx);

    Mu0Result best;
    best.lambda = lam;
    for (double delta : deltas) {
        for (double gamma : gammas) {
            for (double factor : factors) {
                ++best.tuples_tried;
                const SupersolutionParams cand{delta, gamma, factor * sup0, params.s0};
                // Small margin keeps the front inequality clear of roundoff.
                const double mu = max_front_mu(cand, params, spec.grid) * (1.0 - 1e-9);
                if (!(mu > best.mu0)) continue;
                const auto rep = verify_with_table(cand, mu, params, init, spec.grid, tab);
                if (!rep.pass) continue;
                best.mu0 = mu;
                best.witness = cand;
                best.report = rep;
                best.front_bound = params.s0 * (1.0 + delta);
            }
        }
    }
    if (!(best.mu0 > 0.0)) {
        char buf[240];
        std::snprintf(buf, sizeof buf,
                      "no witness found on lattice delta in [%.3g, %.3g], gamma in [%.3g, %.3g], "
                      "K/sup in [%.3g, %.3g]",
                      deltas.front(), deltas.back(), gammas.front(), gammas.back(),
                      factors.front(), factors.back());
        throw NoResultError(buf);
    }
    return best;
}

}  // namespace fblv
