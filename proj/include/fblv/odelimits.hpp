#pragma once

#include <vector>

#include "fblv/core.hpp"

namespace fblv {

/// Spatially homogeneous competition dynamics
///   u' = u (1 - u - k v),  v' = r v (1 - v - h u).
struct OdeState {
    double t = 0.0;
    double u = 0.0;
    double v = 0.0;
};

struct OdeOptions {
    double dt = 1e-3;
    /// Keep every `sample_stride`-th step in the trajectory (plus the last).
    int sample_stride = 100;
};

/// Classic RK4 with fixed step. Requires u0, v0 > 0; throws NumericError on
/// non-finite states.
std::vector<OdeState> integrate_ode(const ModelParams& params, double u0, double v0, double t_max,
                                    const OdeOptions& options = {});

/// Upper bounds for u and lower bounds for v from the competition iteration
///   u_bar_{j+1} = 1 - k v_low_j,  v_low_{j+1} = 1 - h u_bar_{j+1},
/// seeded with u_bar_1 = 1, v_low_1 = 1 - h.
struct IterationSeq {
    std::vector<double> u_bar;  // index j-1 holds u_bar_j
    std::vector<double> v_low;
    double sigma = 0.0;         // h k
    bool stopped_early = false; // some k v_low_j >= 1 ended the iteration
};

/// Requires 0 < h < 1 <= k. Stops at the first j with k v_low_j >= 1.
/// Throws NumericError if the recurrence drifts from the closed form
/// v_low_j = (1 - h)(1 + sigma + ... + sigma^{j-1}) by more than 1e-12.
IterationSeq iterate_bounds(double h, double k, int J);

/// (1 - h)(1 + sigma + ... + sigma^{j-1}) summed term by term.
double closed_form_v_low(double h, double k, int j);

}  // namespace fblv
