#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fblv {

/// Left boundary condition at x = 0: no-flux (NFB) or hostile/Dirichlet (DFB).
enum class ProblemKind { NFB, DFB };

std::string_view to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view text);

/// The seven constants of the competition system with a free boundary.
///
///   u_t = u_xx + u(1 - u - k v)
///   v_t = D v_xx + r v(1 - v - h u)
///   s'  = -mu (u_x + rho v_x) at x = s(t)
struct ModelParams {
    double k = 0.5;
    double h = 0.5;
    double r = 1.0;
    double D = 1.0;
    double mu = 1.0;
    double rho = 1.0;
    double s0 = 2.0;

    bool operator==(const ModelParams&) const = default;
};

/// Throws PreconditionError unless all seven constants are finite and > 0.
void validate(const ModelParams& params);

enum class Regime { WeakCompetition, UWins, VWins, Uncovered };

std::string_view to_string(Regime regime);

enum class InitPreset { CosineBump, SineBump, Table };

std::string_view to_string(InitPreset preset);
InitPreset parse_init_preset(std::string_view text);

/// Profiles of both species sampled on a common set of nodes.
struct ProfilePair {
    std::vector<double> u;
    std::vector<double> v;
};

/// Initial data on [0, s0]. Presets are evaluated analytically; tables are
/// linearly interpolated.
class InitialData {
public:
    /// a cos(pi x / (2 s0)): zero slope at 0, zero at s0.
    static InitialData cosine_bump(double s0, double amplitude = 0.5);
    /// a sin(pi x / s0): zero at both ends.
    static InitialData sine_bump(double s0, double amplitude = 0.5);
    /// Tabulated (x, u, v) with x strictly increasing from 0 to s0.
    static InitialData table(std::vector<double> x, std::vector<double> u,
                             std::vector<double> v);
    /// The compatible preset for a problem kind.
    static InitialData preset_for(ProblemKind kind, double s0, double amplitude = 0.5);

    InitPreset preset() const { return preset_; }
    double s0() const { return s0_; }
    double amplitude() const { return amplitude_; }
    const std::vector<double>& table_x() const { return x_; }

    /// Values at physical position x in [0, s0].
    std::pair<double, double> at(double x) const;

    /// Values at x_i = s0 * i / n_cells, i = 0..n_cells. Endpoint values
    /// required by the boundary conditions are pinned exactly.
    ProfilePair sample(int n_cells, ProblemKind kind) const;

    double sup_u() const;
    double sup_v() const;

private:
    InitPreset preset_ = InitPreset::CosineBump;
    double s0_ = 1.0;
    double amplitude_ = 0.5;
    std::vector<double> x_, u_, v_;
};

/// Throws PreconditionError unless the data are compatible with `kind`:
/// nonnegative, zero at s0, positive inside, and zero slope (NFB) or zero
/// value (DFB) at the origin.
void validate(const InitialData& init, ProblemKind kind);

/// Threshold length: (pi/2) min{1, sqrt(D/r)} for NFB, twice that for DFB.
/// A run whose front exceeds it spreads.
double lambda_threshold(const ModelParams& params, ProblemKind kind);

Regime classify_regime(const ModelParams& params);

/// Long-time limit (u, v) on compact sets when spreading. Throws
/// PreconditionError for the Uncovered regime.
std::pair<double, double> coexistence_limit(const ModelParams& params);

/// M = max{1, sup u0, sup v0}; a monitored ceiling for u, v and s'/mu.
double a_priori_bound(const InitialData& init);

}  // namespace fblv
