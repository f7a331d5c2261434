#include "fblv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "fblv/error.hpp"
#include "fblv/tridiagonal.hpp"

namespace fblv {
namespace {

constexpr double kUndershootTolerance = 1e-12;
constexpr double kExtinctionLevel = 1e-250;

struct SpeciesCoeffs {
    double diffusivity;
    double rate;
    double competition;
};

// Scratch for the in-place step: tridiagonal bands, rhs and Thomas scratch.
struct Workspace {
    std::vector<double> lower, diag, upper, rhs, scratch, u_old;

    void resize(std::size_t n)
    {
        for (auto* v : {&lower, &diag, &upper, &rhs, &scratch, &u_old}) v->resize(n);
    }
};

void advance_species(std::vector<double>& Y, std::span<const double> other, const SpeciesCoeffs& c,
                     ProblemKind kind, double s_new, double s_prime, double dt, Workspace& ws)
{
    const std::size_t n = Y.size() - 1;
    const double dxi = 1.0 / static_cast<double>(n);
    const double beta = dt * c.diffusivity / (s_new * s_new * dxi * dxi);
    const double drift = dt * s_prime / s_new;  // times i gives dt * xi_i * (s'/s) / dxi

    const std::size_t first = kind == ProblemKind::NFB ? 0 : 1;
    const std::size_t m = n - first;  // unknowns first..n-1
    ws.resize(n + 1);

    for (std::size_t i = first; i < n; ++i) {
        const std::size_t row = i - first;
        const double adv = drift * static_cast<double>(i);
        const double reaction = c.rate * Y[i] * (1.0 - Y[i] - c.competition * other[i]);
        ws.rhs[row] = Y[i] + dt * reaction;
        if (i == 0) {
            // Ghost mirror Y_{-1} = Y_1 for the no-flux condition.
            ws.lower[row] = 0.0;
            ws.diag[row] = 1.0 + 2.0 * beta;
            ws.upper[row] = -2.0 * beta;
        } else {
            ws.lower[row] = -beta;
            ws.diag[row] = 1.0 + 2.0 * beta + adv;
            ws.upper[row] = -(beta + adv);
        }
    }
    solve_tridiagonal(std::span(ws.lower).first(m), std::span(ws.diag).first(m),
                      std::span(ws.upper).first(m), std::span(ws.rhs).first(m),
                      std::span(ws.scratch).first(m));
    for (std::size_t i = first; i < n; ++i) Y[i] = ws.rhs[i - first];
    if (first == 1) Y[0] = 0.0;
    Y[n] = 0.0;
}

void check_profile(std::vector<double>& Y, const char* name, std::int64_t step)
{
    for (std::size_t i = 0; i < Y.size(); ++i) {
        const double y = Y[i];
        if (!std::isfinite(y)) {
            throw NumericError("blow-up: non-finite " + std::string(name) + " at node " +
                               std::to_string(i) + ", step " + std::to_string(step));
        }
        if (y < 0.0) {
            if (y < -kUndershootTolerance) {
                throw NumericError("positivity violation: " + std::string(name) + "=" +
                                   std::to_string(y) + " at node " + std::to_string(i) +
                                   ", step " + std::to_string(step));
            }
            Y[i] = 0.0;
        }
    }
    // A species this small is extinct. Zeroing the whole profile at once
    // keeps subnormals (and their slow arithmetic) out of later steps
    // without distorting the shape near the front.
    if (*std::max_element(Y.begin(), Y.end()) < kExtinctionLevel) std::fill(Y.begin(), Y.end(), 0.0);
}

double checked_front_speed(const SimState& state, const ModelParams& params)
{
    const auto [fu, fv] = boundary_flux(state);
    const double sp = front_speed(fu, fv, params);
    if (!std::isfinite(sp)) {
        throw NumericError("blow-up: non-finite front speed at step " + std::to_string(state.step));
    }
    if (sp < 0.0) {
        throw NumericError("front retreat: s' = " + std::to_string(sp) + " at step " +
                           std::to_string(state.step));
    }
    return sp;
}

void step_in_place(SimState& st, const ModelParams& p, ProblemKind kind, double dt, Workspace& ws)
{
    const double sp = checked_front_speed(st, p);
    const double s_new = st.s + dt * sp;

    // U is advanced first; V's reaction must still see the old U.
    ws.u_old = st.U;
    advance_species(st.U, st.V, {1.0, 1.0, p.k}, kind, s_new, sp, dt, ws);
    advance_species(st.V, ws.u_old, {p.D, p.r, p.h}, kind, s_new, sp, dt, ws);

    st.s = s_new;
    st.t += dt;
    st.step += 1;
    check_profile(st.U, "U", st.step);
    check_profile(st.V, "V", st.step);
    st.s_prime = checked_front_speed(st, p);
}

double sup(const std::vector<double>& y)
{
    return y.empty() ? 0.0 : *std::max_element(y.begin(), y.end());
}

}  // namespace

void validate(const GridSpec& g)
{
    if (g.n_cells < 16) throw PreconditionError("grid.n_cells must be >= 16");
    if (!(g.dt > 0.0) || !std::isfinite(g.dt)) throw PreconditionError("grid.dt must be > 0");
    if (!(g.t_max >= 0.0) || !std::isfinite(g.t_max)) {
        throw PreconditionError("grid.t_max must be >= 0");
    }
    if (g.snapshot_stride < 1) throw PreconditionError("grid.snapshot_stride must be >= 1");
}

std::int64_t step_count(const GridSpec& g)
{
    const double ratio = g.t_max / g.dt;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) {
        return static_cast<std::int64_t>(nearest);
    }
    return static_cast<std::int64_t>(std::ceil(ratio));
}

const Snapshot& RunRecord::final_snapshot() const
{
    if (snapshots.empty()) throw PreconditionError("run record has no snapshots");
    return snapshots.back();
}

void validate_for_solver(const ModelParams& p)
{
    const std::pair<const char*, double> nonneg[] = {{"k", p.k}, {"h", p.h}, {"mu", p.mu}, {"rho", p.rho}};
    for (const auto& [name, value] : nonneg) {
        if (!std::isfinite(value) || value < 0.0) {
            throw PreconditionError(std::string("parameter ") + name + " must be finite and >= 0");
        }
    }
    const std::pair<const char*, double> pos[] = {{"r", p.r}, {"D", p.D}, {"s0", p.s0}};
    for (const auto& [name, value] : pos) {
        if (!std::isfinite(value) || value <= 0.0) {
            throw PreconditionError(std::string("parameter ") + name + " must be finite and > 0");
        }
    }
}

std::pair<double, double> boundary_flux(const SimState& st)
{
    const int n = st.n_cells();
    if (n < 3) throw PreconditionError("boundary_flux needs at least 3 cells");
    const double dxi = 1.0 / n;
    const auto un = static_cast<std::size_t>(n);
    const double scale = 1.0 / (2.0 * dxi * st.s);
    return {(st.U[un - 2] - 4.0 * st.U[un - 1]) * scale, (st.V[un - 2] - 4.0 * st.V[un - 1]) * scale};
}

double front_speed(double flux_u, double flux_v, const ModelParams& p)
{
    return 0.0 - p.mu * (flux_u + p.rho * flux_v);  // +0 rather than -0 for empty profiles
}

SimState initial_state(const ModelParams& params, ProblemKind kind, const InitialData& init,
                       int n_cells)
{
    validate_for_solver(params);
    if (n_cells < 16) throw PreconditionError("grid.n_cells must be >= 16");
    if (std::abs(init.s0() - params.s0) > 1e-12 * params.s0) {
        throw PreconditionError("initial data is defined on [0, " + std::to_string(init.s0()) +
                                "] but s0 = " + std::to_string(params.s0));
    }
    if (params.s0 < 10.0 / n_cells) {
        throw PreconditionError("s0 must be at least 10 grid spacings (s0 >= 10 / n_cells)");
    }
    auto profiles = init.sample(n_cells, kind);
    SimState st;
    st.t = 0.0;
    st.s = params.s0;
    st.U = std::move(profiles.u);
    st.V = std::move(profiles.v);
    st.s_prime = checked_front_speed(st, params);
    return st;
}

SimState transformed_step(const SimState& state, const ModelParams& params, ProblemKind kind,
                          double dt)
{
    validate_for_solver(params);
    if (!(dt > 0.0)) throw PreconditionError("dt must be > 0");
    if (state.U.size() != state.V.size() || state.n_cells() < 3 || !(state.s > 0.0)) {
        throw PreconditionError("invalid simulation state");
    }
    SimState next = state;
    Workspace ws;
    step_in_place(next, params, kind, dt, ws);
    return next;
}

Simulation::Simulation(const ModelParams& params, ProblemKind kind, const InitialData& init,
                       const GridSpec& grid, SimulateOptions options)
    : options_(options)
{
    validate(grid);
    record_.params = params;
    record_.kind = kind;
    record_.grid = grid;
    record_.diagnostics.bound_M = a_priori_bound(init);
    total_steps_ = step_count(grid);
    state_ = initial_state(params, kind, init, grid.n_cells);
    observe();
    store_snapshot();
}

Simulation::Simulation(RunRecord prefix, SimState state, SimulateOptions options)
    : record_(std::move(prefix)), state_(std::move(state)), options_(options)
{
    validate(record_.grid);
    validate_for_solver(record_.params);
    total_steps_ = step_count(record_.grid);
    // The final snapshot of a finished prefix is re-emitted when the run ends.
    if (!record_.snapshots.empty() && record_.snapshots.back().t == state_.t &&
        state_.step % record_.grid.snapshot_stride != 0) {
        record_.snapshots.pop_back();
    }
    record_.stopped_early = false;
}

bool Simulation::finished() const
{
    return record_.failed() || record_.stopped_early || state_.step >= total_steps_;
}

void Simulation::run() { run_until(record_.grid.t_max); }

void Simulation::run_until(double t_stop)
{
    Workspace ws;
    const GridSpec& g = record_.grid;
    while (!finished() && state_.t < t_stop) {
        if (options_.stop_above && state_.s > *options_.stop_above) {
            record_.stopped_early = true;
            break;
        }
        const std::int64_t next = state_.step + 1;
        const double t_next = next == total_steps_ ? g.t_max : static_cast<double>(next) * g.dt;
        try {
            step_in_place(state_, record_.params, record_.kind, t_next - state_.t, ws);
        } catch (const NumericError& e) {
            record_.failure = RunFailure{state_.step, state_.t, e.what()};
            break;
        }
        state_.t = t_next;
        observe();
        if (state_.step % g.snapshot_stride == 0) store_snapshot();
    }
    if (options_.stop_above && state_.s > *options_.stop_above) record_.stopped_early = true;
    if (finished() && (record_.snapshots.empty() || record_.snapshots.back().t != state_.t)) {
        store_snapshot();
    }
}

RunRecord Simulation::take_record() { return std::move(record_); }

void Simulation::observe()
{
    const double su = sup(state_.U);
    const double sv = sup(state_.V);
    record_.series.push_back({state_.t, state_.s, state_.s_prime, su, sv});

    auto& d = record_.diagnostics;
    d.max_profile_ratio = std::max(d.max_profile_ratio, std::max(su, sv) / d.bound_M);
    const auto& p = record_.params;
    if (p.mu > 0.0) {
        d.max_speed_ratio =
            std::max(d.max_speed_ratio, state_.s_prime / (p.mu * d.bound_M * (1.0 + p.rho)));
    }
    if (state_.step > 0 && state_.s_prime == 0.0 && p.mu > 0.0 && (su > 0.0 || sv > 0.0)) {
        ++d.zero_speed_steps;
    }
}

void Simulation::store_snapshot()
{
    record_.snapshots.push_back({state_.t, state_.s, state_.U, state_.V});
}

RunRecord simulate(const ModelParams& params, ProblemKind kind, const InitialData& init,
                   const GridSpec& grid, SimulateOptions options)
{
    Simulation sim(params, kind, init, grid, options);
    sim.run();
    return sim.take_record();
}

}  // namespace fblv
