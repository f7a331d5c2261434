#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fblv/barriers.hpp"
#include "fblv/classifier.hpp"
#include "fblv/core.hpp"
#include "fblv/odelimits.hpp"
#include "fblv/solver.hpp"
#include "fblv/steady.hpp"

namespace fblv {

struct InitConfig {
    std::string preset = "auto";  // auto | cosine | sine | table
    double amplitude = 0.5;
    std::string table;            // CSV path when preset == "table"
};

struct OutputConfig {
    std::string dir = "out";
    int series_stride = 1;
    bool plots = true;
};

struct ThresholdConfig {
    double mu_lo = 1e-3;
    double mu_hi = 1e2;
    double rel_tol = 0.05;
    int max_retries = 3;
};

struct SteadyConfig {
    double L = 0.0;  // 0: derived from the parameters
    int m = 0;
    /// Also simulate the configured DFB run and check the sandwich.
    bool compare_run = false;
    double window_lo = 0.0;
    double window_hi = 5.0;
    double slack = 0.02;
};

struct OdeConfig {
    double u0 = 0.1;
    double v0 = 0.1;
    double t_max = 100.0;
    double dt = 1e-3;
    int sample_stride = 100;
    int iterations = 60;
};

struct BarrierConfig {
    int nt = 400;
    int nx = 400;
    double t_check = 50.0;
    std::vector<double> deltas;
    std::vector<double> gammas;
    std::vector<double> k_factors;
};

struct SweepConfig {
    std::vector<double> mu = {0.01, 0.1, 1.0, 10.0};
    std::vector<double> s0 = {0.5, 1.0, 2.0};
};

/// One JSON document with groups problem / params / init / grid / classify /
/// output plus per-command groups. Fully deterministic: there is no seed.
struct RunConfig {
    ProblemKind kind = ProblemKind::NFB;
    ModelParams params;
    InitConfig init;
    GridSpec grid;
    ClassifyTolerances classify;
    bool stop_on_certificate = false;
    OutputConfig output;
    ThresholdConfig threshold;
    SteadyConfig steady;
    OdeConfig ode;
    BarrierConfig barrier;
    SweepConfig sweep;
};

nlohmann::ordered_json to_json(const RunConfig& config);
/// Missing keys take defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::ordered_json& j);

/// Environment variable prefix; a key group.key maps to
/// FBLV_<GROUP>__<KEY> in upper case, e.g. FBLV_GRID__T_MAX.
inline constexpr const char* kEnvPrefix = "FBLV_";
std::string env_name(const std::string& group, const std::string& key);

/// Overrides from the environment. `getenv` is injectable for tests.
using EnvLookup = std::optional<std::string> (*)(const std::string&);
nlohmann::ordered_json apply_env_overrides(nlohmann::ordered_json j, EnvLookup lookup);
std::optional<std::string> process_env(const std::string& name);

/// Reads the file (if given), merges it over defaults, applies environment
/// overrides and validates. Throws PreconditionError on any problem.
RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      EnvLookup lookup = process_env);

/// Preconditions of every downstream module that can be checked before
/// compute starts (parameters, grid, initial data, s0 >= 10 dxi ...).
void validate(const RunConfig& config);

/// Initial data selected by the config ("auto" picks the preset matching
/// the problem kind).
InitialData make_initial_data(const RunConfig& config);

/// Hash of everything that determines a trajectory: excludes the output
/// group and grid.t_max, so a run can be extended from a checkpoint.
std::string trajectory_hash(const RunConfig& config);
/// Hash of everything except the output group.
std::string config_hash(const RunConfig& config);

}  // namespace fblv
