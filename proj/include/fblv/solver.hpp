#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fblv/core.hpp"

namespace fblv {

/// Discretization of the front-fixed coordinate xi = x / s(t) in [0, 1].
struct GridSpec {
    int n_cells = 400;
    double dt = 2.5e-4;
    double t_max = 100.0;
    int snapshot_stride = 4000;

    bool operator==(const GridSpec&) const = default;
};

void validate(const GridSpec& grid);

/// Number of steps needed to reach t_max; the last one may be partial.
std::int64_t step_count(const GridSpec& grid);

/// Solution at one time level. U and V live on xi_i = i / n_cells, so the
/// physical node positions are x_i = s * xi_i.
struct SimState {
    double t = 0.0;
    double s = 0.0;
    double s_prime = 0.0;
    std::vector<double> U;
    std::vector<double> V;
    std::int64_t step = 0;

    int n_cells() const { return static_cast<int>(U.size()) - 1; }
};

struct SeriesSample {
    double t;
    double s;
    double s_prime;
    double sup_u;
    double sup_v;
};

struct Snapshot {
    double t;
    double s;
    std::vector<double> U;
    std::vector<double> V;
};

struct RunFailure {
    std::int64_t step;
    double t;
    std::string message;
};

/// Monitored quantities checked against the a priori bounds. They are
/// reported, never enforced.
struct RunDiagnostics {
    double bound_M = 1.0;
    /// max over the run of max(sup U, sup V) / M
    double max_profile_ratio = 0.0;
    /// max over the run of s' / (mu M (1 + rho))
    double max_speed_ratio = 0.0;
    /// steps after t = 0 with s' == 0 while U or V was not identically zero
    std::int64_t zero_speed_steps = 0;
};

struct RunRecord {
    ModelParams params;
    ProblemKind kind = ProblemKind::NFB;
    GridSpec grid;
    std::vector<SeriesSample> series;
    std::vector<Snapshot> snapshots;
    RunDiagnostics diagnostics;
    std::optional<RunFailure> failure;
    bool stopped_early = false;

    bool failed() const { return failure.has_value(); }
    /// Last stored profile; simulate always stores the final state.
    const Snapshot& final_snapshot() const;
};

/// Solver-level parameter check. Looser than validate(ModelParams): k, h,
/// mu, rho may be zero so reduced and fixed-domain problems can be run.
void validate_for_solver(const ModelParams& params);

/// (u_x, v_x) at the front by the one-sided 3-point difference using the
/// pinned zero at xi = 1, scaled by 1/s.
std::pair<double, double> boundary_flux(const SimState& state);

/// Stefan rule s' = -mu (u_x + rho v_x).
double front_speed(double flux_u, double flux_v, const ModelParams& params);

/// Initial state sampled from `init` on the grid. Only nonnegativity and
/// the boundary zeros are required here; interior positivity is a config
/// level check (see validate(InitialData, ProblemKind)).
SimState initial_state(const ModelParams& params, ProblemKind kind, const InitialData& init,
                       int n_cells);

/// One step of the transformed system. The front speed comes from the
/// current profiles, s advances by forward Euler, then both species are
/// advanced with implicit diffusion and upwind advection (one tridiagonal
/// solve each) and explicit reaction, using the new s.
///
/// Throws NumericError on non-finite values ("blow-up"), undershoots
/// below -1e-12 ("positivity violation") or s' < 0 ("front retreat").
SimState transformed_step(const SimState& state, const ModelParams& params, ProblemKind kind,
                          double dt);

struct SimulateOptions {
    /// Stop as soon as s exceeds this length (the spreading certificate).
    std::optional<double> stop_above;
};

/// A resumable run: the current state plus the record accumulated so far.
class Simulation {
public:
    Simulation(const ModelParams& params, ProblemKind kind, const InitialData& init,
               const GridSpec& grid, SimulateOptions options = {});
    /// Resume from a saved state and record prefix.
    Simulation(RunRecord prefix, SimState state, SimulateOptions options = {});

    /// Advance until grid.t_max, an early stop, or a failure. A failure is
    /// stored in the record, not thrown.
    void run();
    /// Advance until t >= t_stop (clamped to t_max).
    void run_until(double t_stop);

    const SimState& state() const { return state_; }
    const RunRecord& record() const { return record_; }
    RunRecord take_record();
    bool finished() const;

private:
    void observe();
    void store_snapshot();

    RunRecord record_;
    SimState state_;
    SimulateOptions options_;
    std::int64_t total_steps_ = 0;
    std::vector<double> work_;
};

/// Run from t = 0 to grid.t_max (or the early stop).
RunRecord simulate(const ModelParams& params, ProblemKind kind, const InitialData& init,
                   const GridSpec& grid, SimulateOptions options = {});

}  // namespace fblv
