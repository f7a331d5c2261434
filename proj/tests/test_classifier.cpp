#include <doctest.h>

#include <cmath>

#include "fblv/classifier.hpp"
#include "fblv/error.hpp"

using namespace fblv;

namespace {

const GridSpec kCoarse{100, 1e-3, 100.0, 100000};

ModelParams base(double s0, double mu)
{
    ModelParams p;
    p.s0 = s0;
    p.mu = mu;
    return p;
}

std::vector<double> logspace(double lo, double hi, int n)
{
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return out;
}

}  // namespace

TEST_CASE("spreading certificate at t = 0")
{
    const ModelParams p = base(2.0, 1.0);
    const RunRecord rec = simulate(p, ProblemKind::NFB, InitialData::cosine_bump(2.0), {400, 2.5e-4, 0.0, 1});
    const Classification c = classify_run(rec, lambda_threshold(p, ProblemKind::NFB));
    CHECK(c.verdict == Verdict::SpreadingCertified);
    REQUIRE(c.certificate_time);
    CHECK(*c.certificate_time == 0.0);
}

TEST_CASE("certificate time is the first crossing of lambda")
{
    const ModelParams p = base(1.0, 1.0);
    const double lam = lambda_threshold(p, ProblemKind::NFB);
    const RunRecord rec = simulate(p, ProblemKind::NFB, InitialData::cosine_bump(1.0), {100, 1e-3, 20.0, 1000});
    const Classification c = classify_run(rec, lam);
    REQUIRE(c.verdict == Verdict::SpreadingCertified);
    for (const auto& s : rec.series) {
        if (s.t < *c.certificate_time) CHECK(s.s <= lam);
        if (s.t == *c.certificate_time) CHECK(s.s > lam);
    }
}

TEST_CASE("vanishing example at two resolutions")
{
    const ModelParams p = base(0.5, 0.01);
    const double lam = lambda_threshold(p, ProblemKind::NFB);
    const auto init = InitialData::cosine_bump(0.5);
    for (const GridSpec& g : {GridSpec{400, 2.5e-4, 100.0, 4000}, GridSpec{800, 1.25e-4, 100.0, 8000}}) {
        const RunRecord rec = simulate(p, ProblemKind::NFB, init, g);
        REQUIRE(!rec.failed());
        const Classification c = classify_run(rec, lam);
        CHECK(c.verdict == Verdict::VanishingHeuristic);
        CHECK(c.evidence.final_sup_u < 1e-3);
        CHECK(c.evidence.final_sup_v < 1e-3);
        CHECK(c.evidence.final_s < lam);
    }
}

TEST_CASE("a truncated record is undetermined")
{
    const ModelParams p = base(1.0, 0.1);
    const RunRecord rec = simulate(p, ProblemKind::NFB, InitialData::cosine_bump(1.0), {100, 1e-3, 1.0, 1000});
    const Classification c = classify_run(rec, lambda_threshold(p, ProblemKind::NFB));
    CHECK(c.verdict == Verdict::Undetermined);
    CHECK(!c.certificate_time);
    CHECK_THROWS_AS(classify_run(rec, 0.0), PreconditionError);
}

TEST_CASE("monotone history check")
{
    using V = Verdict;
    CHECK_NOTHROW(check_monotone({{0.1, V::VanishingHeuristic}, {1.0, V::SpreadingCertified}, {0.5, V::SpreadingCertified}}));
    CHECK_THROWS_WITH_AS(check_monotone({{0.1, V::SpreadingCertified}, {1.0, V::VanishingHeuristic}}),
                         doctest::Contains("non-monotone"), NoResultError);
}

TEST_CASE("probe retries with a longer horizon")
{
    const ModelParams p = base(1.0, 0.01);
    GridSpec g = kCoarse;
    g.t_max = 2.0;
    const auto init = InitialData::cosine_bump(1.0);
    CHECK(probe_mu(p, ProblemKind::NFB, init, g, {}, 0) == Verdict::Undetermined);
    CHECK(probe_mu(p, ProblemKind::NFB, init, g, {}, 3) == Verdict::VanishingHeuristic);
}

TEST_CASE("threshold preconditions")
{
    const auto init2 = InitialData::cosine_bump(2.0);
    CHECK_THROWS_WITH_AS(find_mu_star(base(2.0, 1.0), ProblemKind::NFB, init2, kCoarse, 1e-3, 1e2),
                         doctest::Contains("no threshold exists"), NoResultError);
    const auto init1 = InitialData::cosine_bump(1.0);
    CHECK_THROWS_WITH_AS(find_mu_star(base(1.0, 1.0), ProblemKind::NFB, init1, kCoarse, 10.0, 20.0),
                         doctest::Contains("no bracket"), NoResultError);
}

TEST_CASE("bisection agrees with an exhaustive mu sweep")
{
    const ModelParams p = base(1.0, 1.0);
    const auto init = InitialData::cosine_bump(1.0);
    const ThresholdResult res = find_mu_star(p, ProblemKind::NFB, init, kCoarse, 1e-3, 1e2);
    REQUIRE(res.complete);
    const ThresholdBracket& b = res.bracket;
    CHECK(b.width() / b.mu_hi <= 0.05);
    CHECK_NOTHROW(check_monotone(b.history));
    for (const auto& e : b.history) CHECK(e.verdict != Verdict::Undetermined);

    std::vector<ModelParams> plan;
    for (double mu : logspace(1e-3, 1e2, 20)) plan.push_back(base(1.0, mu));
    const auto rows = sweep(plan, ProblemKind::NFB, init, kCoarse);
    int flips = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(rows[i].classification);
        const Verdict v = rows[i].classification->verdict;
        REQUIRE(v != Verdict::Undetermined);
        if (i > 0 && v != rows[i - 1].classification->verdict) ++flips;
        if (rows[i].params.mu <= b.mu_lo) CHECK(v == Verdict::VanishingHeuristic);
        if (rows[i].params.mu >= b.mu_hi) CHECK(v == Verdict::SpreadingCertified);
    }
    CHECK(flips == 1);

    // interrupted and resumed bisection ends in the same bracket
    {
        ThresholdOptions opt;
        opt.max_probes = 3;
        int calls = 0;
        opt.on_probe = [&](const ThresholdBracket&) { ++calls; };
        const ThresholdResult part = find_mu_star(p, ProblemKind::NFB, init, kCoarse, 1e-3, 1e2, opt);
        CHECK(!part.complete);
        CHECK(calls == 4);
        CHECK(part.bracket.history.size() == 5);
        const ThresholdResult rest = find_mu_star(p, ProblemKind::NFB, init, kCoarse, 1e-3, 1e2, {}, part.bracket);
        REQUIRE(rest.complete);
        CHECK(rest.bracket.mu_lo == b.mu_lo);
        CHECK(rest.bracket.mu_hi == b.mu_hi);
        CHECK(rest.bracket.history.size() == b.history.size());
    }
}

TEST_CASE("sweep")
{
    const auto init = InitialData::cosine_bump(1.0);
    GridSpec g = kCoarse;
    g.t_max = 30.0;

    SUBCASE("singleton plan equals classify_run")
    {
        const ModelParams p = base(1.0, 2.0);
        const auto rows = sweep({p}, ProblemKind::NFB, init, g);
        REQUIRE(rows.size() == 1);
        SimulateOptions opt;
        opt.stop_above = lambda_threshold(p, ProblemKind::NFB);
        const Classification c =
            classify_run(simulate(p, ProblemKind::NFB, init, g, opt), lambda_threshold(p, ProblemKind::NFB));
        REQUIRE(rows[0].classification);
        CHECK(rows[0].classification->verdict == c.verdict);
        CHECK(rows[0].classification->certificate_time == c.certificate_time);
        CHECK(rows[0].classification->evidence.final_s == c.evidence.final_s);
    }
    SUBCASE("an invalid row errors, the others complete, order is kept")
    {
        ModelParams bad = base(1.0, 1.0);
        bad.D = -1.0;
        const std::vector<ModelParams> plan{base(1.0, 2.0), bad, base(0.5, 0.01), base(2.0, 1.0)};
        const auto serial = sweep(plan, ProblemKind::NFB, init, g);
        SweepOptions opt;
        opt.jobs = 3;
        const auto parallel = sweep(plan, ProblemKind::NFB, init, g, opt);
        REQUIRE(serial.size() == 4);
        CHECK(!serial[1].error.empty());
        CHECK(!serial[1].classification);
        for (std::size_t i : {0u, 2u, 3u}) {
            CHECK(serial[i].error.empty());
            REQUIRE(serial[i].classification);
            CHECK(serial[i].key == sweep_key(i, plan[i]));
            CHECK(parallel[i].key == serial[i].key);
            CHECK(parallel[i].classification->evidence.final_s == serial[i].classification->evidence.final_s);
        }
        CHECK(serial[2].classification->verdict == Verdict::VanishingHeuristic);
        CHECK(serial[3].classification->verdict == Verdict::SpreadingCertified);
    }
    SUBCASE("one verdict transition across a decade around the flip")
    {
        std::vector<ModelParams> plan;
        for (double mu : logspace(0.1, 1.0, 8)) plan.push_back(base(1.0, mu));
        const auto rows = sweep(plan, ProblemKind::NFB, init, kCoarse);
        int flips = 0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].classification->verdict != rows[i - 1].classification->verdict) ++flips;
        }
        CHECK(flips == 1);
        for (const auto& r : rows) {
            if (r.classification->verdict == Verdict::VanishingHeuristic) {
                CHECK(r.classification->evidence.final_s <= 1.05 * lambda_threshold(r.params, ProblemKind::NFB));
            }
        }
    }
    CHECK_THROWS_AS(sweep({}, ProblemKind::NFB, init, g), PreconditionError);
}

TEST_CASE("verdict names round-trip")
{
    for (auto v : {Verdict::SpreadingCertified, Verdict::VanishingHeuristic, Verdict::Undetermined}) {
        CHECK(parse_verdict(to_string(v)) == v);
    }
}
