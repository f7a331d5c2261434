#include "fblv/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fblv/error.hpp"

namespace fblv {

std::string_view to_string(ProblemKind kind)
{
    return kind == ProblemKind::NFB ? "NFB" : "DFB";
}

ProblemKind parse_problem_kind(std::string_view text)
{
    if (text == "NFB" || text == "nfb") return ProblemKind::NFB;
    if (text == "DFB" || text == "dfb") return ProblemKind::DFB;
    throw PreconditionError("unknown problem kind '" + std::string(text) + "'");
}

void validate(const ModelParams& p)
{
    const std::pair<const char*, double> fields[] = {
        {"k", p.k}, {"h", p.h}, {"r", p.r}, {"D", p.D}, {"mu", p.mu}, {"rho", p.rho}, {"s0", p.s0}};
    for (const auto& [name, value] : fields) {
        if (!std::isfinite(value) || value <= 0.0) {
            throw PreconditionError(std::string("parameter ") + name +
                                    " must be finite and positive, got " + std::to_string(value));
        }
    }
}

std::string_view to_string(Regime regime)
{
    switch (regime) {
    case Regime::WeakCompetition: return "WeakCompetition";
    case Regime::UWins: return "UWins";
    case Regime::VWins: return "VWins";
    case Regime::Uncovered: return "Uncovered";
    }
    return "?";
}

std::string_view to_string(InitPreset preset)
{
    switch (preset) {
    case InitPreset::CosineBump: return "cosine";
    case InitPreset::SineBump: return "sine";
    case InitPreset::Table: return "table";
    }
    return "?";
}

InitPreset parse_init_preset(std::string_view text)
{
    if (text == "cosine") return InitPreset::CosineBump;
    if (text == "sine") return InitPreset::SineBump;
    if (text == "table") return InitPreset::Table;
    throw PreconditionError("unknown initial-data preset '" + std::string(text) + "'");
}

InitialData InitialData::cosine_bump(double s0, double amplitude)
{
    if (!(s0 > 0.0) || !(amplitude > 0.0)) {
        throw PreconditionError("cosine preset needs s0 > 0 and amplitude > 0");
    }
    InitialData d;
    d.preset_ = InitPreset::CosineBump;
    d.s0_ = s0;
    d.amplitude_ = amplitude;
    return d;
}

InitialData InitialData::sine_bump(double s0, double amplitude)
{
    if (!(s0 > 0.0) || !(amplitude > 0.0)) {
        throw PreconditionError("sine preset needs s0 > 0 and amplitude > 0");
    }
    InitialData d;
    d.preset_ = InitPreset::SineBump;
    d.s0_ = s0;
    d.amplitude_ = amplitude;
    return d;
}

InitialData InitialData::table(std::vector<double> x, std::vector<double> u,
                               std::vector<double> v)
{
    if (x.size() < 3 || u.size() != x.size() || v.size() != x.size()) {
        throw PreconditionError("initial-data table needs >= 3 rows of equal length");
    }
    if (x.front() != 0.0) throw PreconditionError("initial-data table must start at x = 0");
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            throw PreconditionError("initial-data table x must be strictly increasing");
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(u[i]) || !std::isfinite(v[i]) || u[i] < 0.0 || v[i] < 0.0) {
            throw PreconditionError("initial-data table values must be finite and nonnegative");
        }
    }
    InitialData d;
    d.preset_ = InitPreset::Table;
    d.s0_ = x.back();
    d.amplitude_ = 0.0;
    d.x_ = std::move(x);
    d.u_ = std::move(u);
    d.v_ = std::move(v);
    return d;
}

InitialData InitialData::preset_for(ProblemKind kind, double s0, double amplitude)
{
    return kind == ProblemKind::NFB ? cosine_bump(s0, amplitude) : sine_bump(s0, amplitude);
}

std::pair<double, double> InitialData::at(double x) const
{
    using std::numbers::pi;
    switch (preset_) {
    case InitPreset::CosineBump: {
        const double val = amplitude_ * std::cos(pi * x / (2.0 * s0_));
        return {val, val};
    }
    case InitPreset::SineBump: {
        const double val = amplitude_ * std::sin(pi * x / s0_);
        return {val, val};
    }
    case InitPreset::Table: break;
    }
    if (x <= x_.front()) return {u_.front(), v_.front()};
    if (x >= x_.back()) return {u_.back(), v_.back()};
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const auto j = static_cast<std::size_t>(it - x_.begin());
    const double w = (x - x_[j - 1]) / (x_[j] - x_[j - 1]);
    return {u_[j - 1] + w * (u_[j] - u_[j - 1]), v_[j - 1] + w * (v_[j] - v_[j - 1])};
}

ProfilePair InitialData::sample(int n_cells, ProblemKind kind) const
{
    const auto n = static_cast<std::size_t>(n_cells);
    ProfilePair out{std::vector<double>(n + 1), std::vector<double>(n + 1)};
    for (std::size_t i = 0; i <= n; ++i) {
        const auto [u, v] = at(s0_ * static_cast<double>(i) / static_cast<double>(n));
        out.u[i] = std::max(u, 0.0);
        out.v[i] = std::max(v, 0.0);
    }
    out.u[n] = out.v[n] = 0.0;
    if (kind == ProblemKind::DFB) out.u[0] = out.v[0] = 0.0;
    return out;
}

double InitialData::sup_u() const
{
    if (preset_ != InitPreset::Table) return amplitude_;
    return *std::max_element(u_.begin(), u_.end());
}

double InitialData::sup_v() const
{
    if (preset_ != InitPreset::Table) return amplitude_;
    return *std::max_element(v_.begin(), v_.end());
}

void validate(const InitialData& init, ProblemKind kind)
{
    if (init.preset() == InitPreset::CosineBump && kind != ProblemKind::NFB) {
        throw PreconditionError("cosine preset has nonzero value at x = 0; it is only compatible with NFB");
    }
    if (init.preset() == InitPreset::SineBump && kind != ProblemKind::DFB) {
        throw PreconditionError("sine preset has nonzero slope at x = 0; it is only compatible with DFB");
    }
    if (init.preset() != InitPreset::Table) return;

    const auto& x = init.table_x();
    const auto n = x.size();
    const auto [u_end, v_end] = init.at(x.back());
    if (u_end != 0.0 || v_end != 0.0) {
        throw PreconditionError("initial data must vanish at x = s0");
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto [u, v] = init.at(x[i]);
        if (!(u > 0.0) || !(v > 0.0)) {
            throw PreconditionError("initial data must be positive inside (0, s0)");
        }
    }
    const auto [u0, v0] = init.at(0.0);
    if (kind == ProblemKind::DFB) {
        if (u0 != 0.0 || v0 != 0.0) throw PreconditionError("DFB initial data must vanish at x = 0");
    } else {
        // First-difference slope at the origin must be small against the
        // typical slope sup/s0 of the profile.
        const auto [u1, v1] = init.at(x[1]);
        const double typical = std::max(init.sup_u(), init.sup_v()) / x.back();
        const double tol = 0.05 * typical * x[1];
        if (n < 3 || std::abs(u1 - u0) > tol || std::abs(v1 - v0) > tol) {
            throw PreconditionError("NFB initial data must have zero slope at x = 0");
        }
    }
}

double lambda_threshold(const ModelParams& p, ProblemKind kind)
{
    const double base = std::numbers::pi * std::min(1.0, std::sqrt(p.D / p.r));
    return kind == ProblemKind::NFB ? 0.5 * base : base;
}

Regime classify_regime(const ModelParams& p)
{
    if (p.h < 1.0 && p.k < 1.0) return Regime::WeakCompetition;
    if (p.k < 1.0 && p.h >= 1.0) return Regime::UWins;
    if (p.h < 1.0 && p.k >= 1.0) return Regime::VWins;
    return Regime::Uncovered;
}

std::pair<double, double> coexistence_limit(const ModelParams& p)
{
    switch (classify_regime(p)) {
    case Regime::WeakCompetition: {
        const double det = 1.0 - p.h * p.k;
        return {(1.0 - p.k) / det, (1.0 - p.h) / det};
    }
    case Regime::UWins: return {1.0, 0.0};
    case Regime::VWins: return {0.0, 1.0};
    case Regime::Uncovered: break;
    }
    throw PreconditionError("no proven limit for h >= 1 and k >= 1");
}

double a_priori_bound(const InitialData& init)
{
    return std::max({1.0, init.sup_u(), init.sup_v()});
}

}  // namespace fblv
