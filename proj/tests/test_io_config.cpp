#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "fblv/config.hpp"
#include "fblv/error.hpp"
#include "fblv/io.hpp"

using namespace fblv;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("fblv_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunRecord short_run()
{
    ModelParams p;
    p.s0 = 1.0;
    return simulate(p, ProblemKind::NFB, InitialData::cosine_bump(1.0), {50, 1e-3, 0.5, 100});
}

std::map<std::string, std::string>& fake_env()
{
    static std::map<std::string, std::string> env;
    return env;
}

std::optional<std::string> fake_lookup(const std::string& name)
{
    const auto it = fake_env().find(name);
    if (it == fake_env().end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> no_env(const std::string&) { return std::nullopt; }

}  // namespace

TEST_CASE("double formatting round-trips")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::ldexp(mant(rng), expo(rng));
        CHECK(std::stod(io::format_double(x)) == x);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(0.0) == "0");
    CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("run record files")
{
    const RunRecord rec = short_run();
    const std::string csv = io::series_csv(rec);
    CHECK(csv.rfind("t,s,s_prime,sup_u,sup_v\n", 0) == 0);
    const auto back = io::parse_series_csv(csv);
    REQUIRE(back.size() == rec.series.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].t == rec.series[i].t);
        CHECK(back[i].s == rec.series[i].s);
        CHECK(back[i].s_prime == rec.series[i].s_prime);
        CHECK(back[i].sup_u == rec.series[i].sup_u);
        CHECK(back[i].sup_v == rec.series[i].sup_v);
    }
    const auto thin = io::parse_series_csv(io::series_csv(rec, 7));
    CHECK(thin.size() < back.size());
    CHECK(thin.back().t == back.back().t);
    CHECK(thin[1].t == back[7].t);

    const std::string prof = io::profile_csv(rec.final_snapshot());
    CHECK(prof.rfind("x,u,v\n", 0) == 0);
    CHECK(std::count(prof.begin(), prof.end(), '\n') == 52);

    const fs::path dir = scratch("run");
    io::write_run(dir, rec);
    CHECK(fs::exists(dir / "series.csv"));
    CHECK(fs::exists(dir / ("profile_" + std::to_string(rec.snapshots.size() - 1) + ".csv")));
    const json meta = json::parse(io::read_text(dir / "metadata.json"));
    CHECK(meta["kind"] == "NFB");
    CHECK(meta["params"]["s0"] == 1.0);
    CHECK(meta["samples"] == rec.series.size());
    CHECK(io::read_text(dir / "series.csv") == csv);
    CHECK_THROWS(io::parse_series_csv("a,b\n1,2\n"));
    fs::remove_all(dir);
}

TEST_CASE("json round-trips")
{
    ModelParams p;
    p.k = 0.3;
    p.mu = 1e-3 / 3.0;
    const ModelParams q = io::params_from_json(io::to_json(p));
    CHECK(q.k == p.k);
    CHECK(q.mu == p.mu);
    CHECK(q.s0 == p.s0);
    const GridSpec g{123, 1e-4, 17.5, 9};
    const GridSpec g2 = io::grid_from_json(json::parse(io::to_json(g).dump()));
    CHECK(g2.n_cells == 123);
    CHECK(g2.dt == 1e-4);
    CHECK(g2.t_max == 17.5);
    CHECK(g2.snapshot_stride == 9);

    ThresholdBracket b;
    b.mu_lo = 0.1;
    b.mu_hi = 0.3;
    b.history = {{0.1, Verdict::VanishingHeuristic}, {0.3, Verdict::SpreadingCertified}};
    const ThresholdBracket b2 = io::bracket_from_json(json::parse(io::to_json(b).dump()));
    CHECK(b2.mu_lo == 0.1);
    CHECK(b2.mu_hi == 0.3);
    REQUIRE(b2.history.size() == 2);
    CHECK(b2.history[1].verdict == Verdict::SpreadingCertified);

    const io::ThresholdCheckpoint tc{"abc", b};
    const auto tc2 = io::threshold_checkpoint_from_json(json::parse(io::to_json(tc).dump()));
    CHECK(tc2.config_hash == "abc");
    CHECK(tc2.bracket.history.size() == 2);
}

TEST_CASE("checkpoint resumes to the same record")
{
    ModelParams p;
    p.s0 = 1.0;
    const auto init = InitialData::cosine_bump(1.0);
    const GridSpec g{50, 1e-3, 2.0, 100};
    const RunRecord straight = simulate(p, ProblemKind::NFB, init, g);

    Simulation first(p, ProblemKind::NFB, init, g);
    first.run_until(1.0);
    const io::Checkpoint ck{"h", first.state(), first.record()};
    const io::Checkpoint back = io::checkpoint_from_json(json::parse(io::to_json(ck).dump()));
    CHECK(back.config_hash == "h");
    CHECK(back.state.U == first.state().U);
    CHECK(back.state.step == first.state().step);

    Simulation second(back.record, back.state);
    second.run();
    CHECK(io::series_csv(second.record()) == io::series_csv(straight));
    CHECK(io::profile_csv(second.record().final_snapshot()) == io::profile_csv(straight.final_snapshot()));

    json broken = io::to_json(ck);
    broken["version"] = 99;
    CHECK_THROWS(io::checkpoint_from_json(broken));
}

TEST_CASE("other tables")
{
    const IterationSeq seq = iterate_bounds(0.5, 1.0, 3);
    CHECK(io::iteration_csv(seq) == "j,u_bar_j,v_low_j\n1,1,0.5\n2,0.5,0.75\n3,0.25,0.875\n");
    ModelParams p;
    CHECK(io::trajectory_csv(integrate_ode(p, 0.1, 0.2, 0.0)) == "t,u,v\n0,0.1,0.2\n");
    const std::string sw = io::sweep_csv({});
    CHECK(sw == "key,mu,k,h,r,D,rho,s0,verdict,cert_time,final_s,final_sup_u,final_sup_v\n");

    Mu0Result r;
    r.mu0 = 0.5;
    const json cert = io::certificate_json(r);
    for (const char* key : {"delta", "gamma", "K", "mu0", "worst_margins", "grid"}) CHECK(cert.contains(key));
    for (const char* key : {"pde_u", "pde_v", "initial", "front"}) CHECK(cert["worst_margins"].contains(key));
    CHECK(cert["grid"]["nt"] == 400);

    const fs::path dir = scratch("table");
    io::write_text(dir / "init.csv", "x,u,v\n0,1,0.5\n0.5,0.8,0.4\n1,0,0\n");
    const InitialData t = io::read_initial_table(dir / "init.csv");
    CHECK(t.sup_u() == 1.0);
    CHECK(t.at(0.25).first == doctest::Approx(0.9));
    io::write_text(dir / "bad.csv", "x,u\n0,1\n");
    CHECK_THROWS(io::read_initial_table(dir / "bad.csv"));
    fs::remove_all(dir);
}

TEST_CASE("configuration")
{
    const RunConfig defaults;
    const json dj = to_json(defaults);
    CHECK(to_json(config_from_json(dj)) == dj);
    CHECK(to_json(config_from_json(json::object())) == dj);

    SUBCASE("partial documents merge over defaults")
    {
        const RunConfig c = config_from_json(json::parse(R"({"problem":{"kind":"DFB"},"params":{"mu":0.25}})"));
        CHECK(c.kind == ProblemKind::DFB);
        CHECK(c.params.mu == 0.25);
        CHECK(c.params.k == defaults.params.k);
        CHECK(c.grid.n_cells == defaults.grid.n_cells);
    }
    SUBCASE("unknown keys are rejected")
    {
        CHECK_THROWS_AS(config_from_json(json::parse(R"({"params":{"mu":1,"nu":2}})")), PreconditionError);
        CHECK_THROWS_AS(config_from_json(json::parse(R"({"extra":{}})")), PreconditionError);
        CHECK_THROWS_AS(config_from_json(json::parse(R"({"params":{"mu":"fast"}})")), PreconditionError);
    }
    SUBCASE("environment overrides")
    {
        CHECK(env_name("grid", "t_max") == "FBLV_GRID__T_MAX");
        fake_env() = {{"FBLV_GRID__T_MAX", "12.5"},
                      {"FBLV_PROBLEM__KIND", "DFB"},
                      {"FBLV_SWEEP__MU", "[0.5, 2]"},
                      {"FBLV_OUTPUT__DIR", "123"}};
        const RunConfig c = config_from_json(apply_env_overrides(dj, fake_lookup));
        CHECK(c.grid.t_max == 12.5);
        CHECK(c.kind == ProblemKind::DFB);
        CHECK(c.sweep.mu == std::vector<double>{0.5, 2.0});
        CHECK(c.output.dir == "123");
        fake_env() = {{"FBLV_PARAMS__MU", "oops"}};
        CHECK_THROWS_AS(config_from_json(apply_env_overrides(dj, fake_lookup)), PreconditionError);
        fake_env().clear();
    }
    SUBCASE("loading a file")
    {
        const fs::path dir = scratch("cfg");
        io::write_text(dir / "c.json", R"({"params":{"s0":1.5},"grid":{"n_cells":200}})");
        fake_env() = {{"FBLV_PARAMS__MU", "0.7"}};
        const RunConfig c = load_config(dir / "c.json", fake_lookup);
        fake_env().clear();
        CHECK(c.params.s0 == 1.5);
        CHECK(c.params.mu == 0.7);
        CHECK(c.grid.n_cells == 200);
        CHECK(load_config(std::nullopt, no_env).params.s0 == defaults.params.s0);

        io::write_text(dir / "bad.json", "{not json");
        CHECK_THROWS_AS(load_config(dir / "bad.json", no_env), PreconditionError);
        CHECK_THROWS_AS(load_config(dir / "missing.json", no_env), PreconditionError);
        io::write_text(dir / "neg.json", R"({"params":{"D":-1}})");
        CHECK_THROWS_AS(load_config(dir / "neg.json", no_env), PreconditionError);
        fs::remove_all(dir);
    }
    SUBCASE("validation")
    {
        RunConfig c;
        CHECK_NOTHROW(validate(c));
        c.params.s0 = 0.02;  // below 10 cell widths at 400 cells
        CHECK_THROWS_AS(validate(c), PreconditionError);
        c = {};
        c.kind = ProblemKind::DFB;
        c.init.preset = "cosine";
        CHECK_THROWS_AS(validate(c), PreconditionError);
        c = {};
        c.threshold.mu_lo = 10.0;
        c.threshold.mu_hi = 1.0;
        CHECK_THROWS_AS(validate(c), PreconditionError);
    }
    SUBCASE("initial data selection")
    {
        RunConfig c;
        CHECK(make_initial_data(c).preset() == InitPreset::CosineBump);
        c.kind = ProblemKind::DFB;
        CHECK(make_initial_data(c).preset() == InitPreset::SineBump);
        c.init.amplitude = 0.8;
        CHECK(make_initial_data(c).sup_u() == doctest::Approx(0.8));
    }
    SUBCASE("hashes")
    {
        RunConfig a;
        RunConfig b = a;
        b.grid.t_max = 500.0;
        b.output.dir = "elsewhere";
        CHECK(trajectory_hash(a) == trajectory_hash(b));
        CHECK(config_hash(a) != config_hash(b));
        b = a;
        b.output.dir = "elsewhere";
        CHECK(config_hash(a) == config_hash(b));
        b.params.mu = 1.0 + 1e-12;
        CHECK(trajectory_hash(a) != trajectory_hash(b));
        CHECK(trajectory_hash(a).size() == 16);
    }
}
