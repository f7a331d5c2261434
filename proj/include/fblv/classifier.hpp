#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fblv/core.hpp"
#include "fblv/solver.hpp"

namespace fblv {

enum class Verdict { SpreadingCertified, VanishingHeuristic, Undetermined };

std::string_view to_string(Verdict verdict);
Verdict parse_verdict(std::string_view text);

struct Evidence {
    double final_s = 0.0;
    double final_sup_u = 0.0;
    double final_sup_v = 0.0;
    double final_s_prime = 0.0;
};

struct Classification {
    Verdict verdict = Verdict::Undetermined;
    std::optional<double> certificate_time;
    Evidence evidence;
};

struct ClassifyTolerances {
    double tol_vanish = 1e-3;
    /// Stall tolerance as a fraction of lambda: tol_stall = tol_stall_rel * lam.
    double tol_stall_rel = 1e-4;
};

/// Spreading is certified the first time s exceeds `lam` (a bounded front
/// can never pass it). Vanishing is a heuristic: at the end of the run s is
/// below `lam`, both populations are below tol_vanish, and s grew by less
/// than tol_stall over the final 20% of the run.
Classification classify_run(const RunRecord& record, double lam, double tol_vanish,
                            double tol_stall);
Classification classify_run(const RunRecord& record, double lam, const ClassifyTolerances& tol = {});

struct BracketEntry {
    double mu;
    Verdict verdict;
};

struct ThresholdBracket {
    double mu_lo = 0.0;
    double mu_hi = 0.0;
    std::vector<BracketEntry> history;

    double width() const { return mu_hi - mu_lo; }
};

struct ThresholdOptions {
    double rel_tol = 0.05;
    /// Extra attempts with doubled t_max for an Undetermined probe.
    int max_retries = 3;
    ClassifyTolerances tolerances;
    /// Stop after this many new probes (for interruption); the partial
    /// bracket is returned with `complete == false`.
    std::optional<int> max_probes;
    /// Called after every probe with the bracket so far (checkpointing).
    std::function<void(const ThresholdBracket&)> on_probe;
};

struct ThresholdResult {
    ThresholdBracket bracket;
    bool complete = false;
};

/// Probe a single mu: simulate with early stop on the spreading
/// certificate, retrying Undetermined outcomes with doubled t_max.
Verdict probe_mu(const ModelParams& params, ProblemKind kind, const InitialData& init,
                 const GridSpec& grid, const ClassifyTolerances& tol, int max_retries);

/// Bisection for the critical expansion coefficient. Midpoints are
/// geometric. Precondition: s0 < lambda (else "no threshold exists").
/// Throws NoResultError("no bracket") if the initial endpoints are not
/// (vanishing, spreading), NoResultError("non-monotone") if the history
/// ever shows spreading below a vanishing mu, and NumericError if a probe
/// stays Undetermined after all retries or the solver fails.
///
/// `resume`, when given, continues a previous partial bracket.
ThresholdResult find_mu_star(const ModelParams& params_without_mu, ProblemKind kind,
                             const InitialData& init, const GridSpec& grid, double mu_lo,
                             double mu_hi, const ThresholdOptions& options = {},
                             const std::optional<ThresholdBracket>& resume = std::nullopt);

/// Throws NoResultError("non-monotone") if some spreading entry has a
/// smaller mu than some vanishing entry.
void check_monotone(const std::vector<BracketEntry>& history);

struct SweepRow {
    std::string key;
    ModelParams params;
    std::optional<Classification> classification;
    std::string error;  // nonempty when the run could not be classified
};

struct SweepOptions {
    int jobs = 1;
    ClassifyTolerances tolerances;
    bool stop_on_certificate = true;
};

/// Run every plan entry and classify it. Rows come back in plan order;
/// a failing entry records its error and the sweep continues.
std::vector<SweepRow> sweep(const std::vector<ModelParams>& plan, ProblemKind kind,
                            const InitialData& init, const GridSpec& grid,
                            const SweepOptions& options = {});

/// Stable row key for a parameter set.
std::string sweep_key(std::size_t index, const ModelParams& params);

}  // namespace fblv
