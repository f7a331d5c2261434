#pragma once

#include <utility>
#include <vector>

#include "fblv/core.hpp"

namespace fblv {

/// Shrinking-bump supersolution for the Dirichlet problem:
///   sigma(t) = s0 (1 + delta - (delta/2) e^{-gamma t})
///   w(t, x)  = K e^{-gamma t} sin(pi x / sigma(t)),  0 <= x <= sigma(t)
/// used for both species.
struct SupersolutionParams {
    double delta = 0.1;
    double gamma = 0.1;
    double K = 1.0;
    double s0 = 1.0;
};

struct BarrierValue {
    double sigma;
    double w;
};

/// Exact evaluation; throws PreconditionError unless 0 <= x <= sigma(t).
BarrierValue eval_barrier(const SupersolutionParams& p, double t, double x);

struct SupersolutionGrid {
    int nt = 400;          // time samples on [0, t_check] (plus the t -> infinity limit)
    int nx = 400;          // interior x samples on (0, sigma(t))
    double t_check = 50.0;
};

/// Smallest value of each inequality's left-minus-right side over the
/// sample grid. Nonnegative everywhere means the candidate passes.
struct WorstMargins {
    double pde_u = 0.0;    // w_t - w_xx - w(1 - w)
    double pde_v = 0.0;    // w_t - D w_xx - r w(1 - w)
    double initial = 0.0;  // min(w(0,x) - u0(x), w(0,x) - v0(x))
    double front = 0.0;    // sigma' + mu (1 + rho) w_x(t, sigma)
};

struct SupersolutionReport {
    bool pass = false;
    WorstMargins margins;
    SupersolutionGrid grid;
};

/// Checks the four supersolution inequalities pointwise with closed-form
/// derivatives. This is a sampled numerical certificate, not a proof.
/// Failure is reported, never thrown.
SupersolutionReport verify_supersolution(const SupersolutionParams& p, double mu,
                                         const ModelParams& params, const InitialData& init,
                                         const SupersolutionGrid& grid = {});

/// Largest mu passing the front inequality on the sampled times.
double max_front_mu(const SupersolutionParams& p, const ModelParams& params,
                    const SupersolutionGrid& grid = {});

struct Mu0SearchSpec {
    std::vector<double> deltas;     // empty: default logarithmic lattice
    std::vector<double> gammas;
    std::vector<double> k_factors;  // multiples of max(sup u0, sup v0)
    SupersolutionGrid grid;
};

struct Mu0Result {
    double mu0 = 0.0;
    SupersolutionParams witness;
    SupersolutionReport report;
    /// s0 (1 + delta): bound on the limiting front for any mu <= mu0.
    double front_bound = 0.0;
    double lambda = 0.0;
    int tuples_tried = 0;
};

/// Grid search over (delta, gamma, K) for the largest certified mu0 with
/// s_infinity <= s0 (1 + delta) whenever mu <= mu0. DFB only; requires
/// s0 < lambda. Throws NoResultError("no witness found") if nothing passes.
Mu0Result search_mu0(const ModelParams& params, ProblemKind kind, const InitialData& init,
                     const Mu0SearchSpec& spec = {});

}  // namespace fblv
