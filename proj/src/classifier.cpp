#include "fblv/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "fblv/error.hpp"

namespace fblv {
namespace {

InitialData init_for(const InitialData& init, double s0)
{
    if (init.preset() == InitPreset::Table) {
        if (std::abs(init.s0() - s0) > 1e-12 * s0) {
            throw PreconditionError("tabulated initial data cannot be rescaled to s0 = " +
                                    std::to_string(s0));
        }
        return init;
    }
    return init.preset() == InitPreset::CosineBump ? InitialData::cosine_bump(s0, init.amplitude())
                                                   : InitialData::sine_bump(s0, init.amplitude());
}

}  // namespace

std::string_view to_string(Verdict verdict)
{
    switch (verdict) {
    case Verdict::SpreadingCertified: return "SpreadingCertified";
    case Verdict::VanishingHeuristic: return "VanishingHeuristic";
    case Verdict::Undetermined: return "Undetermined";
    }
    return "?";
}

Verdict parse_verdict(std::string_view text)
{
    if (text == "SpreadingCertified") return Verdict::SpreadingCertified;
    if (text == "VanishingHeuristic") return Verdict::VanishingHeuristic;
    if (text == "Undetermined") return Verdict::Undetermined;
    throw PreconditionError("unknown verdict '" + std::string(text) + "'");
}

Classification classify_run(const RunRecord& record, double lam, double tol_vanish,
                            double tol_stall)
{
    if (!(lam > 0.0) || !std::isfinite(lam)) throw PreconditionError("lambda must be positive");
    if (!(tol_vanish > 0.0) || !(tol_stall >= 0.0)) {
        throw PreconditionError("classification tolerances must be positive");
    }
    if (record.series.empty()) throw PreconditionError("cannot classify an empty run record");

    Classification out;
    const auto& last = record.series.back();
    out.evidence = {last.s, last.sup_u, last.sup_v, last.s_prime};

    for (const auto& sample : record.series) {
        if (sample.s > lam) {
            out.verdict = Verdict::SpreadingCertified;
            out.certificate_time = sample.t;
            return out;
        }
    }
    if (record.failed()) return out;

    const double t_end = last.t;
    const double t_window = 0.8 * t_end;
    const auto window_start = std::lower_bound(
        record.series.begin(), record.series.end(), t_window,
        [](const SeriesSample& smp, double t) { return smp.t < t; });
    const double growth = last.s - window_start->s;

    if (t_end > 0.0 && last.s < lam && last.sup_u < tol_vanish && last.sup_v < tol_vanish &&
        growth < tol_stall) {
        out.verdict = Verdict::VanishingHeuristic;
        out.certificate_time = t_end;
    }
    return out;
}

Classification classify_run(const RunRecord& record, double lam, const ClassifyTolerances& tol)
{
    return classify_run(record, lam, tol.tol_vanish, tol.tol_stall_rel * lam);
}

Verdict probe_mu(const ModelParams& params, ProblemKind kind, const InitialData& init,
                 const GridSpec& grid, const ClassifyTolerances& tol, int max_retries)
{
    const double lam = lambda_threshold(params, kind);
    GridSpec g = grid;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        const RunRecord rec = simulate(params, kind, init, g, {.stop_above = lam});
        if (rec.failed()) {
            throw NumericError("probe at mu=" + std::to_string(params.mu) +
                               " failed: " + rec.failure->message);
        }
        const Verdict v = classify_run(rec, lam, tol).verdict;
        if (v != Verdict::Undetermined) return v;
        g.t_max *= 2.0;
    }
    return Verdict::Undetermined;
}

void check_monotone(const std::vector<BracketEntry>& history)
{
    double max_vanishing = -INFINITY;
    double min_spreading = INFINITY;
    for (const auto& e : history) {
        if (e.verdict == Verdict::VanishingHeuristic) max_vanishing = std::max(max_vanishing, e.mu);
        if (e.verdict == Verdict::SpreadingCertified) min_spreading = std::min(min_spreading, e.mu);
    }
    if (min_spreading < max_vanishing) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "non-monotone: spreading at mu=%.6g but vanishing at mu=%.6g",
                      min_spreading, max_vanishing);
        throw NoResultError(buf);
    }
}

ThresholdResult find_mu_star(const ModelParams& base, ProblemKind kind, const InitialData& init,
                             const GridSpec& grid, double mu_lo, double mu_hi,
                             const ThresholdOptions& options,
                             const std::optional<ThresholdBracket>& resume)
{
    const double lam = lambda_threshold(base, kind);
    if (base.s0 >= lam) {
        throw NoResultError("no threshold exists: s0 >= lambda, every mu spreads");
    }
    if (!(options.rel_tol > 0.0)) throw PreconditionError("rel_tol must be positive");

    auto probe = [&](double mu) {
        ModelParams p = base;
        p.mu = mu;
        const Verdict v = probe_mu(p, kind, init, grid, options.tolerances, options.max_retries);
        if (v == Verdict::Undetermined) {
            throw NoResultError("undetermined probe at mu=" + std::to_string(mu) +
                                " after t_max escalation");
        }
        return v;
    };

    ThresholdResult result;
    ThresholdBracket& b = result.bracket;
    if (resume) {
        b = *resume;
    } else {
        if (!(mu_lo > 0.0) || !(mu_hi > mu_lo)) {
            throw PreconditionError("bracket needs 0 < mu_lo < mu_hi");
        }
        const Verdict v_lo = probe(mu_lo);
        const Verdict v_hi = probe(mu_hi);
        b.history = {{mu_lo, v_lo}, {mu_hi, v_hi}};
        if (v_lo != Verdict::VanishingHeuristic || v_hi != Verdict::SpreadingCertified) {
            throw NoResultError("no bracket: mu_lo gives " + std::string(to_string(v_lo)) +
                                ", mu_hi gives " + std::string(to_string(v_hi)));
        }
        b.mu_lo = mu_lo;
        b.mu_hi = mu_hi;
        if (options.on_probe) options.on_probe(b);
    }

    int probes = 0;
    while (b.width() / b.mu_hi > options.rel_tol) {
        if (options.max_probes && probes >= *options.max_probes) return result;
        const double mid = std::sqrt(b.mu_lo * b.mu_hi);
        const Verdict v = probe(mid);
        ++probes;
        b.history.push_back({mid, v});
        check_monotone(b.history);
        (v == Verdict::SpreadingCertified ? b.mu_hi : b.mu_lo) = mid;
        if (options.on_probe) options.on_probe(b);
    }
    result.complete = true;
    return result;
}

std::string sweep_key(std::size_t index, const ModelParams& p)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%04zu:mu=%.6g:s0=%.6g:k=%.6g:h=%.6g", index, p.mu, p.s0, p.k, p.h);
    return buf;
}

std::vector<SweepRow> sweep(const std::vector<ModelParams>& plan, ProblemKind kind,
                            const InitialData& init, const GridSpec& grid,
                            const SweepOptions& options)
{
    if (plan.empty()) throw PreconditionError("sweep plan is empty");
    std::vector<SweepRow> rows(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
        rows[i].key = sweep_key(i, plan[i]);
        rows[i].params = plan[i];
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < plan.size(); i = next++) {
            SweepRow& row = rows[i];
            try {
                validate(row.params);
                const double lam = lambda_threshold(row.params, kind);
                const InitialData row_init = init_for(init, row.params.s0);
                validate(row_init, kind);
                SimulateOptions so;
                if (options.stop_on_certificate) so.stop_above = lam;
                const RunRecord rec = simulate(row.params, kind, row_init, grid, so);
                row.classification = classify_run(rec, lam, options.tolerances);
                if (rec.failed()) row.error = rec.failure->message;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };

    const int jobs = std::clamp(options.jobs, 1, static_cast<int>(plan.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    return rows;
}

}  // namespace fblv
