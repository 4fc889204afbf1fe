#include <doctest.h>

#include <cmath>

#include "cvoodg/suites.hpp"

using namespace cvoodg;
using namespace cvoodg::oracle;
using doctest::Approx;

TEST_CASE("pair classes parse") {
    for (auto c : {PairClass::phase_rotation, PairClass::displacement, PairClass::squeezing, PairClass::loss})
        CHECK(parse_pair_class(to_string(c)) == c);
    CHECK_THROWS_AS(parse_pair_class("cubic_phase"), std::invalid_argument);
    CHECK(matching_curves(PairClass::loss) == std::vector<ClassTag>{ClassTag::gaussian, ClassTag::symmetric});
}

TEST_CASE("worst-case pairs saturate the guarantee") {
    for (auto c : {PairClass::phase_rotation, PairClass::displacement, PairClass::squeezing, PairClass::loss})
        for (double e : {0.3, 0.1, 1e-3}) {
            const InDistributionGuarantee g{e, 1.0};
            const auto sat = worst_case_pair(c, g, PairMode::saturating);
            CHECK(in_distribution_distance(sat) == Approx(e).epsilon(1e-9));
            CHECK(sat.achieved_eps0 == Approx(e).epsilon(1e-9));
            const auto wit = worst_case_pair(c, g, PairMode::formula_witness);
            CHECK(wit.achieved_eps0 == Approx(std::sqrt(2.0 * e)).epsilon(1e-9));
            const auto half = scaled_pair(sat, 0.5, 0.3);
            CHECK(in_distribution_distance(half) <= e + 1e-12);
        }
}

TEST_CASE("Gaussian distances agree with Fock-basis evolution") {
    const InDistributionGuarantee g{0.1, 1.0};
    const auto pr = worst_case_pair(PairClass::phase_rotation, g);
    const auto dp = worst_case_pair(PairClass::displacement, g);
    for (double r : {0.3, 1.0, 2.0})
        for (double phi : {0.0, 0.8}) {
            const FockMatrix rho = FockMatrix::coherent(std::polar(r, phi), 60);
            CHECK(exact_coherent_distance(pr, r, phi) == Approx(phase_rotation_output_distance(rho, pr.gap)).epsilon(1e-9));
            CHECK(exact_coherent_distance(dp, r, phi) ==
                  Approx(displacement_output_distance(rho, cplx(0.5 * dp.gap, 0.0), 120)).epsilon(1e-8));
        }
}

TEST_CASE("dominance suite accepts sound curves and rejects a shrunken one") {
    const InDistributionGuarantee g{0.1, 1.0};
    const auto pair = worst_case_pair(PairClass::phase_rotation, g);
    const auto ok = dominance_suite(phase_rotation_bound(g), pair, default_r_grid(), default_phi_grid());
    CHECK(ok.status == "pass");
    CHECK(ok.max_slack < 0.0);
    const BoundCurve pr = phase_rotation_bound(g);
    const BoundCurve half(ClassTag::custom, g, [pr](double n) { return 0.5 * pr(n); }, true);
    // the witness pair meets the curve exactly, so any shrinkage shows
    const auto wit = worst_case_pair(PairClass::phase_rotation, g, PairMode::formula_witness);
    const auto bad = dominance_suite(half, wit, default_r_grid(), default_phi_grid());
    CHECK(bad.status == "fail");
    CHECK(bad.max_slack > kViolationTol);
    CHECK(bad.worst_point.count("r") == 1);
    CHECK(witness_gap(pr, wit, default_r_grid()) < 1e-10);
}

TEST_CASE("grids") {
    const auto r = default_r_grid();
    REQUIRE(r.size() == 60);
    CHECK(r.front() * r.front() == Approx(1e-3));
    CHECK(r.back() * r.back() == Approx(100.0));
    CHECK(default_phi_grid().size() == 8);
}

TEST_CASE("mu/nu quadrature is dominated and normalised") {
    const MuNu v = mu_nu_numeric(0, 0, 0.1);
    CHECK(v.mu_num == Approx(1.0).epsilon(1e-12));  // P_s of the vacuum is a probability density
    CHECK(v.nu_num == Approx(0.1).epsilon(1e-12));  // and its mean |alpha|^2 is s
    for (int m = 0; m <= 3; ++m)
        for (int n = 0; n <= m; ++n) CHECK(mu_nu_numeric(m, n, 0.2).dominated());
}

TEST_CASE("gamma quadrature tracks the closed form") {
    for (double s : {0.05, 0.3})
        for (auto [l1, l2] : std::vector<std::pair<OffDiagLabel, OffDiagLabel>>{
                 {{0, 0, 0}, {0, 0, 0}}, {{2, 1, 0.4}, {4, 3, 0.1}}, {{1, 3, 0.2}, {2, 4, -0.5}}, {{5, 5, 0}, {2, 2, 0}}})
            CHECK(gamma_quadrature(l1, l2, s) == Approx(gamma_overlap(l1, l2, s)).epsilon(1e-8));
}

TEST_CASE("delta_s on the vacuum is exact") {
    // ||  |0><0| - thermal(s) || = 2 s / (1 + s)
    for (double s : {0.005, 0.05}) {
        const DeltaS d = delta_s_exact(0, s, 40);
        CHECK(d.distance == Approx(2.0 * s / (1.0 + s)).epsilon(1e-9));
        CHECK(d.distance <= d.bound);
        CHECK_FALSE(d.tail_warning);
    }
}

TEST_CASE("SPAT Fock matrix") {
    const FockMatrix rho = spat_fock(1.0, 80);
    CHECK(rho.trace() == Approx(1.0).epsilon(1e-12));
    CHECK(rho.mean_photon_number() == Approx(3.0).epsilon(1e-9));
    CHECK(rho(0, 0).real() == 0.0);
}

TEST_CASE("concavity suite flags a convex curve") {
    auto make = [](const InDistributionGuarantee& g) {
        return BoundCurve(ClassTag::custom, g, [e = g.eps0](double n) { return e * n * n / 1e4; }, true);
    };
    SuiteGrids grids;
    const auto res = concavity_and_limit_suite(make, "convex", grids);
    REQUIRE(res.size() == 3);
    CHECK(res[0].status == "fail");
    CHECK(res[1].status == "pass");
}

TEST_CASE("rng is deterministic") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("suites") {
    CHECK_THROWS_AS(run_suite("nope", {}), std::invalid_argument);
    const auto rep = run_suite("delta-s", {});
    CHECK(rep.passed());
    CHECK(rep.suite == "delta-s");
}
