#include "fblv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "fblv/config.hpp"
#include "fblv/error.hpp"
#include "fblv/io.hpp"
#include "fblv/plot.hpp"

namespace fblv::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Flags {
    std::string config;
    std::string out;
    int jobs = 1;
    std::string resume;
    int max_probes = -1;
    bool checkpoint = false;
};

struct Context {
    RunConfig config;
    Flags flags;
    fs::path out_dir;
    std::ostream& out;
    std::ostream& err;
};

// Plots never need more than a couple of thousand vertices.
plot::Series thin(std::string label, const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = std::min(x.size(), y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    plot::Series s{std::move(label), {}, {}};
    for (std::size_t i = 0; i < n; i += stride) {
        s.x.push_back(x[i]);
        s.y.push_back(y[i]);
    }
    if (n > 0 && (n - 1) % stride != 0) {
        s.x.push_back(x[n - 1]);
        s.y.push_back(y[n - 1]);
    }
    return s;
}

void write_plot(const Context& ctx, const std::string& name, const plot::Figure& fig)
{
    if (ctx.config.output.plots) io::write_text(ctx.out_dir / name, plot::to_svg(fig));
}

void plot_run(const Context& ctx, const RunRecord& rec, double lam)
{
    std::vector<double> t, s;
    for (const auto& sm : rec.series) {
        t.push_back(sm.t);
        s.push_back(sm.s);
    }
    plot::Figure front{"front position", "t", "s(t)", {thin("s", t, s)}, lam, "Lambda"};
    write_plot(ctx, "front.svg", front);

    if (rec.snapshots.empty()) return;
    const Snapshot& last = rec.final_snapshot();
    std::vector<double> x(last.U.size());
    const double n = static_cast<double>(last.U.size()) - 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = last.s * (static_cast<double>(i) / n);
    plot::Figure prof{"final profiles", "x", "density", {thin("u", x, last.U), thin("v", x, last.V)}, {}, {}};
    write_plot(ctx, "profiles.svg", prof);
}

SimulateOptions simulate_options(const RunConfig& c, bool stop_on_certificate)
{
    SimulateOptions o;
    if (stop_on_certificate) o.stop_above = lambda_threshold(c.params, c.kind);
    return o;
}

int finish_run(Context& ctx, const RunRecord& rec, const std::optional<SimState>& state)
{
    const RunConfig& c = ctx.config;
    const double lam = lambda_threshold(c.params, c.kind);
    io::write_run(ctx.out_dir, rec, c.output.series_stride);
    const Classification cls = classify_run(rec, lam, c.classify);
    json cj = io::to_json(cls);
    cj["lambda"] = lam;
    cj["regime"] = std::string(to_string(classify_regime(c.params)));
    io::write_text(ctx.out_dir / "classification.json", cj.dump(2) + "\n");
    plot_run(ctx, rec, lam);
    if (ctx.flags.checkpoint && state && !rec.failed()) {
        const io::Checkpoint ck{trajectory_hash(c), *state, rec};
        io::write_text(ctx.out_dir / "checkpoint.json", io::to_json(ck).dump() + "\n");
    }
    ctx.out << "verdict " << to_string(cls.verdict) << ", final s " << cls.evidence.final_s << ", lambda " << lam
            << "\n";
    if (rec.failed()) {
        ctx.err << "solver error at step " << rec.failure->step << " (t = " << rec.failure->t
                << "): " << rec.failure->message << "\n";
        return kNumericFailure;
    }
    return kOk;
}

int cmd_simulate(Context& ctx, bool classify_only)
{
    const RunConfig& c = ctx.config;
    const bool stop = classify_only || c.stop_on_certificate;
    std::optional<Simulation> sim;
    if (!ctx.flags.resume.empty()) {
        const json j = json::parse(io::read_text(ctx.flags.resume), nullptr, false);
        if (j.is_discarded()) throw PreconditionError("checkpoint " + ctx.flags.resume + " is not valid JSON");
        io::Checkpoint ck = io::checkpoint_from_json(j);
        if (ck.config_hash != trajectory_hash(c)) {
            throw PreconditionError("checkpoint was written for a different configuration");
        }
        if (c.grid.t_max < ck.state.t) throw PreconditionError("checkpoint is already past grid.t_max");
        ck.record.grid.t_max = c.grid.t_max;
        sim.emplace(std::move(ck.record), std::move(ck.state), simulate_options(c, stop));
    } else {
        sim.emplace(c.params, c.kind, make_initial_data(c), c.grid, simulate_options(c, stop));
    }
    sim->run();
    const SimState state = sim->state();
    return finish_run(ctx, sim->take_record(), state);
}

int cmd_threshold(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const std::string hash = config_hash(c);
    std::optional<ThresholdBracket> resume;
    if (!ctx.flags.resume.empty()) {
        const json j = json::parse(io::read_text(ctx.flags.resume), nullptr, false);
        if (j.is_discarded()) throw PreconditionError("checkpoint " + ctx.flags.resume + " is not valid JSON");
        io::ThresholdCheckpoint ck = io::threshold_checkpoint_from_json(j);
        if (ck.config_hash != hash) throw PreconditionError("checkpoint was written for a different configuration");
        resume = std::move(ck.bracket);
    }

    fs::create_directories(ctx.out_dir);
    const fs::path ck_path = ctx.out_dir / "threshold_checkpoint.json";
    ThresholdOptions opt;
    opt.rel_tol = c.threshold.rel_tol;
    opt.max_retries = c.threshold.max_retries;
    opt.tolerances = c.classify;
    if (ctx.flags.max_probes >= 0) opt.max_probes = ctx.flags.max_probes;
    opt.on_probe = [&](const ThresholdBracket& b) {
        io::write_text(ck_path, io::to_json(io::ThresholdCheckpoint{hash, b}).dump(2) + "\n");
        ctx.out << "bracket [" << b.mu_lo << ", " << b.mu_hi << "] after " << b.history.size() << " probes\n";
    };

    const ThresholdResult res = find_mu_star(c.params, c.kind, make_initial_data(c), c.grid, c.threshold.mu_lo,
                                             c.threshold.mu_hi, opt, resume);
    json j = io::to_json(res.bracket);
    j["complete"] = res.complete;
    j["lambda"] = lambda_threshold(c.params, c.kind);
    io::write_text(ctx.out_dir / "bracket.json", j.dump(2) + "\n");
    if (!res.complete) ctx.out << "interrupted; resume with --resume " << ck_path.string() << "\n";
    return kOk;
}

int cmd_steady(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const HalfLineGrid grid =
        c.steady.L > 0.0 ? HalfLineGrid{c.steady.L, c.steady.m} : default_halfline_grid(c.params);
    const SteadyProfiles b = build_barriers(c.params, grid);
    fs::create_directories(ctx.out_dir);
    io::write_text(ctx.out_dir / "barriers.csv", io::barriers_csv(b));
    const json bj{{"L", grid.L}, {"m", grid.m}, {"cap_excess_u", b.cap_excess_u}, {"cap_excess_v", b.cap_excess_v}};
    io::write_text(ctx.out_dir / "barriers.json", bj.dump(2) + "\n");

    const double x_show = std::min(grid.L, std::max(10.0, c.steady.window_hi));
    std::vector<double> x;
    const std::vector<double> nodes = grid.nodes();
    std::size_t shown = 0;
    while (shown < nodes.size() && nodes[shown] <= x_show) ++shown;
    auto head = [&](const std::vector<double>& y) { return std::vector<double>(y.begin(), y.begin() + shown); };
    x = head(nodes);
    plot::Figure fig{"steady barriers", "x", "density",
                     {thin("u_bar", x, head(b.u_bar)), thin("v_bar", x, head(b.v_bar)),
                      thin("u_low", x, head(b.u_low)), thin("v_low", x, head(b.v_low))},
                     {}, {}};
    write_plot(ctx, "barriers.svg", fig);

    if (!c.steady.compare_run) {
        ctx.out << "barriers written on [0, " << grid.L << "] with " << grid.m << " cells\n";
        return kOk;
    }
    if (c.kind != ProblemKind::DFB) throw PreconditionError("steady.compare_run needs problem.kind = DFB");
    const RunRecord rec = simulate(c.params, c.kind, make_initial_data(c), c.grid);
    if (rec.failed()) {
        io::write_run(ctx.out_dir, rec, c.output.series_stride);
        throw NumericError(rec.failure->message);
    }
    const SandwichReport rep =
        check_sandwich(rec, b, {c.steady.window_lo, c.steady.window_hi}, c.steady.slack);
    io::write_run(ctx.out_dir, rec, c.output.series_stride);
    io::write_text(ctx.out_dir / "sandwich.json", io::to_json(rep).dump(2) + "\n");

    const Snapshot& last = rec.final_snapshot();
    std::vector<double> xs, us, vs, ub, ul, vb, vl;
    const double n = static_cast<double>(last.U.size()) - 1.0;
    for (std::size_t i = 0; i < last.U.size(); ++i) {
        const double xi = last.s * (static_cast<double>(i) / n);
        if (xi > x_show) break;
        xs.push_back(xi);
        us.push_back(last.U[i]);
        vs.push_back(last.V[i]);
        ub.push_back(interpolate(grid, b.u_bar, xi));
        ul.push_back(interpolate(grid, b.u_low, xi));
        vb.push_back(interpolate(grid, b.v_bar, xi));
        vl.push_back(interpolate(grid, b.v_low, xi));
    }
    plot::Figure sw{"final profiles between barriers", "x", "density",
                    {thin("u", xs, us), thin("u_bar", xs, ub), thin("u_low", xs, ul), thin("v", xs, vs),
                     thin("v_bar", xs, vb), thin("v_low", xs, vl)},
                    {}, {}};
    write_plot(ctx, "sandwich.svg", sw);
    ctx.out << "sandwich " << (rep.pass ? "pass" : "FAIL") << " on [" << c.steady.window_lo << ", "
            << c.steady.window_hi << "] with slack " << rep.slack << "\n";
    return kOk;
}

int cmd_ode(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const auto traj = integrate_ode(c.params, c.ode.u0, c.ode.v0, c.ode.t_max, {c.ode.dt, c.ode.sample_stride});
    fs::create_directories(ctx.out_dir);
    io::write_text(ctx.out_dir / "trajectory.csv", io::trajectory_csv(traj));
    std::vector<double> t, u, v;
    for (const auto& st : traj) {
        t.push_back(st.t);
        u.push_back(st.u);
        v.push_back(st.v);
    }
    write_plot(ctx, "trajectory.svg", {"homogeneous dynamics", "t", "density", {thin("u", t, u), thin("v", t, v)}, {}, {}});

    const auto& last = traj.back();
    ctx.out << "final (u, v) = (" << last.u << ", " << last.v << ") at t = " << last.t << "\n";
    const Regime regime = classify_regime(c.params);
    if (regime != Regime::Uncovered) {
        const auto [lu, lv] = coexistence_limit(c.params);
        ctx.out << "regime " << to_string(regime) << ", limit (" << lu << ", " << lv << ")\n";
    }
    if (c.params.h < 1.0 && c.params.k >= 1.0) {
        const IterationSeq seq = iterate_bounds(c.params.h, c.params.k, c.ode.iterations);
        io::write_text(ctx.out_dir / "iteration.csv", io::iteration_csv(seq));
    }
    return kOk;
}

int cmd_barrier(Context& ctx)
{
    const RunConfig& c = ctx.config;
    Mu0SearchSpec spec{c.barrier.deltas, c.barrier.gammas, c.barrier.k_factors,
                       {c.barrier.nt, c.barrier.nx, c.barrier.t_check}};
    const Mu0Result res = search_mu0(c.params, c.kind, make_initial_data(c), spec);
    fs::create_directories(ctx.out_dir);
    io::write_text(ctx.out_dir / "certificate.json", io::certificate_json(res).dump(2) + "\n");
    ctx.out << "mu0 = " << res.mu0 << " (delta " << res.witness.delta << ", gamma " << res.witness.gamma << ", K "
            << res.witness.K << "); front bound " << res.front_bound << " vs lambda " << res.lambda << "\n";
    return kOk;
}

int cmd_sweep(Context& ctx)
{
    const RunConfig& c = ctx.config;
    std::vector<ModelParams> plan;
    for (double s0 : c.sweep.s0) {
        for (double mu : c.sweep.mu) {
            ModelParams p = c.params;
            p.mu = mu;
            p.s0 = s0;
            plan.push_back(p);
        }
    }
    SweepOptions opt{ctx.flags.jobs, c.classify, true};
    const auto rows = sweep(plan, c.kind, make_initial_data(c), c.grid, opt);
    fs::create_directories(ctx.out_dir);
    io::write_text(ctx.out_dir / "sweep.csv", io::sweep_csv(rows));
    const auto failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
    ctx.out << rows.size() << " rows, " << failed << " with errors\n";
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Free-boundary competition laboratory", "fblv"};
    app.set_version_flag("--version", std::string(FBLV_VERSION));
    app.require_subcommand(1, 1);

    Flags flags;
    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "run the solver and write series, profiles and classification"},
        {"classify", "run until the spreading certificate or t_max and classify"},
        {"threshold", "bracket the critical expansion coefficient by bisection"},
        {"steady", "solve the half-line barrier problems (optionally check a DFB run)"},
        {"ode", "integrate the spatially homogeneous system"},
        {"barrier", "search for a vanishing supersolution certificate (DFB)"},
        {"sweep", "classify a mu x s0 grid of runs"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output directory (overrides output.dir)");
        sub->add_option("--jobs", flags.jobs, "concurrent runs for sweep")->check(CLI::PositiveNumber);
        sub->add_option("--resume", flags.resume, "checkpoint to continue from")->check(CLI::ExistingFile);
        sub->add_option("--max-probes", flags.max_probes, "threshold: stop after this many bisection probes")
            ->check(CLI::NonNegativeNumber);
        sub->add_flag("--checkpoint", flags.checkpoint, "simulate: write checkpoint.json at the end");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        out << FBLV_VERSION << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
    const std::string name = app.get_subcommands().front()->get_name();

    try {
        std::optional<fs::path> path;
        if (!flags.config.empty()) path = flags.config;
        RunConfig config = load_config(path);
        Context ctx{config, flags, flags.out.empty() ? fs::path(config.output.dir) : fs::path(flags.out), out, err};
        if (name == "simulate") return cmd_simulate(ctx, false);
        if (name == "classify") return cmd_simulate(ctx, true);
        if (name == "threshold") return cmd_threshold(ctx);
        if (name == "steady") return cmd_steady(ctx);
        if (name == "ode") return cmd_ode(ctx);
        if (name == "barrier") return cmd_barrier(ctx);
        return cmd_sweep(ctx);
    } catch (const PreconditionError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NoResultError& e) {
        err << "no result: " << e.what() << "\n";
        return kNoResult;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kNumericFailure;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumericFailure;
    }
}

}  // namespace fblv::cli
