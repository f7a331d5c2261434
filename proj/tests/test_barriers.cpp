#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fblv/barriers.hpp"
#include "fblv/classifier.hpp"
#include "fblv/error.hpp"

using namespace fblv;
using std::numbers::pi;

namespace {

ModelParams dfb_base(double s0)
{
    ModelParams p;
    p.s0 = s0;
    return p;
}

// Front inequality ratio sigma'/(mu (1+rho) |w_x|) is s0 delta gamma sigma(t) /
// (2 pi (1+rho) K), smallest at t = 0.
double front_mu_closed(const SupersolutionParams& w, double rho)
{
    return w.s0 * w.s0 * w.delta * w.gamma * (1.0 + w.delta / 2.0) / (2.0 * pi * (1.0 + rho) * w.K);
}

}  // namespace

TEST_CASE("barrier evaluation")
{
    const SupersolutionParams w{0.1, 0.2, 1.5, 2.0};
    CHECK(eval_barrier(w, 0.0, 0.0).sigma == doctest::Approx(2.0 * 1.05).epsilon(1e-15));
    CHECK(eval_barrier(w, 0.0, 1.05).w == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(eval_barrier(w, 1e6, 0.0).sigma == doctest::Approx(2.2).epsilon(1e-15));
    CHECK(eval_barrier(w, 1e6, 1.0).w == 0.0);
    for (double t : {0.0, 0.3, 1.0, 7.0, 50.0}) {
        const double sig = eval_barrier(w, t, 0.0).sigma;
        CHECK(eval_barrier(w, t, 0.0).w == 0.0);
        CHECK(eval_barrier(w, t, sig).w == 0.0);
        CHECK(eval_barrier(w, t, 0.25 * sig).w ==
              doctest::Approx(1.5 * std::exp(-0.2 * t) * std::sqrt(0.5)).epsilon(1e-14));
        CHECK_THROWS_AS(eval_barrier(w, t, sig * 1.0001), PreconditionError);
    }
    CHECK_THROWS_AS(eval_barrier(w, 0.0, -0.1), PreconditionError);
}

TEST_CASE("supersolution verification")
{
    const ModelParams p = dfb_base(2.0);
    const auto init = InitialData::sine_bump(2.0);
    const SupersolutionParams w{0.1, 1.0, 1.0, 2.0};
    const double mu_max = max_front_mu(w, p);
    CHECK(mu_max == doctest::Approx(front_mu_closed(w, p.rho)).epsilon(1e-12));

    const auto ok = verify_supersolution(w, 0.5 * mu_max, p, init);
    CHECK(ok.pass);
    CHECK(ok.margins.pde_u >= 0.0);
    CHECK(ok.margins.pde_v >= 0.0);
    CHECK(ok.margins.initial >= 0.0);
    CHECK(ok.margins.front > 0.0);

    SUBCASE("zero amplitude cannot dominate positive data")
    {
        const auto r = verify_supersolution({0.1, 1.0, 0.0, 2.0}, 0.01, p, init);
        CHECK(!r.pass);
        CHECK(r.margins.initial < 0.0);
    }
    SUBCASE("large mu breaks the front inequality")
    {
        const auto r = verify_supersolution(w, 1e3, p, init);
        CHECK(!r.pass);
        CHECK(r.margins.front < 0.0);
        CHECK(r.margins.pde_u == ok.margins.pde_u);
    }
    SUBCASE("certification is monotone in mu")
    {
        for (double f : {0.999, 0.9, 0.5, 0.1, 1e-3}) {
            CHECK(verify_supersolution(w, f * mu_max, p, init).pass);
        }
        CHECK(!verify_supersolution(w, 1.01 * mu_max, p, init).pass);
    }
    SUBCASE("a wide bump fails the PDE inequality")
    {
        // sigma(inf) = 3.3 gives (pi / sigma)^2 < 1 + gamma
        const SupersolutionParams wide{0.1, 1.0, 1.0, 3.0};
        const auto r = verify_supersolution(wide, 1e-3, dfb_base(3.0), InitialData::sine_bump(3.0));
        CHECK(!r.pass);
        CHECK(r.margins.pde_u < 0.0);
    }
    CHECK_THROWS_AS(verify_supersolution(w, 0.1, p, init, {0, 10, 1.0}), PreconditionError);
}

TEST_CASE("mu0 search")
{
    const ModelParams p = dfb_base(2.0);
    const auto init = InitialData::sine_bump(2.0);
    const Mu0Result res = search_mu0(p, ProblemKind::DFB, init);
    REQUIRE(res.mu0 > 0.0);
    CHECK(res.tuples_tried == 13 * 13 * 8);
    CHECK(res.report.pass);
    CHECK(res.lambda == doctest::Approx(pi));
    CHECK(res.front_bound == doctest::Approx(2.0 * (1.0 + res.witness.delta)));
    CHECK(res.front_bound < res.lambda * 1.1);
    // regression anchor from the first run of the default lattice
    CHECK(res.mu0 == doctest::Approx(0.06366197717309614).epsilon(1e-12));
    CHECK(res.witness.delta == doctest::Approx(0.1));
    CHECK(res.witness.gamma == doctest::Approx(1.0));
    CHECK(res.witness.K == doctest::Approx(0.525));
    CHECK(res.mu0 == doctest::Approx(front_mu_closed(res.witness, p.rho)).epsilon(1e-8));

    SUBCASE("the witness survives a doubled sample grid")
    {
        const SupersolutionGrid fine{800, 800, 50.0};
        const auto r = verify_supersolution(res.witness, res.mu0, p, init, fine);
        CHECK(r.pass);
        CHECK(r.margins.pde_u >= 0.0);
        CHECK(r.margins.pde_v >= 0.0);
        CHECK(r.margins.initial >= 0.0);
        CHECK(r.margins.front >= 0.0);
    }
    SUBCASE("half of mu0 vanishes in simulation")
    {
        ModelParams q = p;
        q.mu = 0.5 * res.mu0;
        const RunRecord rec = simulate(q, ProblemKind::DFB, init, {100, 1e-3, 100.0, 1000});
        REQUIRE(!rec.failed());
        const Classification c = classify_run(rec, res.lambda);
        CHECK(c.verdict == Verdict::VanishingHeuristic);
        CHECK(c.evidence.final_s <= res.front_bound);
    }
    SUBCASE("a lattice without a witness")
    {
        Mu0SearchSpec spec;
        spec.deltas = {0.1};
        spec.gammas = {5.0};
        spec.k_factors = {1.0};
        CHECK_THROWS_WITH_AS(search_mu0(p, ProblemKind::DFB, init, spec), doctest::Contains("no witness found"),
                             NoResultError);
    }
    CHECK_THROWS_AS(search_mu0(p, ProblemKind::NFB, InitialData::cosine_bump(2.0)), PreconditionError);
    CHECK_THROWS_AS(search_mu0(dfb_base(3.5), ProblemKind::DFB, InitialData::sine_bump(3.5)), NoResultError);
}
