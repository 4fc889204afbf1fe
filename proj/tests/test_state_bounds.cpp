#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cvoodg/oracle.hpp"
#include "cvoodg/state_bounds.hpp"

using namespace cvoodg;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// P_s of the SPAT from its normally ordered characteristic function
// e^{-(q+s)x} (1 - (1+q)x), x = |beta|^2, with u = |alpha|^2.
double spat_p(double q, double s, double u) {
    const double Q = q + s;
    return std::exp(-u / Q) / (kPi * Q) * (1.0 - (1.0 + q) / Q + (1.0 + q) * u / (Q * Q));
}

struct Moments {
    double neg = 0, neg_u = 0, pos = 0, pos_u = 0;
};

Moments spat_moments(double q, double s) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double Q = q + s;
    const double u0 = std::max(0.0, Q * (1.0 + q - Q) / (1.0 + q));  // sign change
    const double hi = u0 + 80.0 * Q;
    auto w = [&](double u, int power, int sign) {
        const double p = sign * spat_p(q, s, u);
        return p > 0 ? kPi * p * (power ? u : 1.0) : 0.0;
    };
    Moments m;
    m.neg = GK::integrate([&](double u) { return w(u, 0, -1); }, 0.0, u0, 20, 1e-14);
    m.neg_u = GK::integrate([&](double u) { return w(u, 1, -1); }, 0.0, u0, 20, 1e-14);
    m.pos = GK::integrate([&](double u) { return w(u, 0, 1); }, u0, hi, 20, 1e-14);
    m.pos_u = GK::integrate([&](double u) { return w(u, 1, 1); }, u0, hi, 20, 1e-14);
    return m;
}

BoundCurve pr(double e) { return phase_rotation_bound({e, 1.0}); }

}  // namespace

TEST_CASE("SPAT negativity profile against its P-function") {
    for (double q : {0.5, 1.0, 2.0})
        for (double s : {0.0, 1e-6, 0.05, 0.2, 0.45}) {
            const NegativityProfile p = spat_profile(q, s);
            const Moments m = spat_moments(q, s);
            CHECK(p.negativity == Approx(m.neg).epsilon(1e-9));
            CHECK(p.nbar_minus * p.negativity == Approx(m.neg_u).epsilon(1e-9));
            CHECK(p.nbar_plus * (1.0 + p.negativity) == Approx(m.pos_u).epsilon(1e-9));
            CHECK(1.0 + p.negativity == Approx(m.pos).epsilon(1e-9));
            CHECK(p.nbar() == Approx(1.0 + 2.0 * q + s).epsilon(1e-12));
            CHECK_NOTHROW(p.validate());
        }
}

TEST_CASE("SPAT bound is continuous at s = 0") {
    for (double q : {0.5, 1.0, 2.0}) {
        const BoundCurve c = pr(0.01);
        const double a = spat_value(c, q, 1e-8).intermediates.at("curve_term");
        const double b = spat_value(c, q, 0.0).intermediates.at("curve_term");
        CHECK(std::abs(a - b) <= 1e-6 * b);
    }
}

TEST_CASE("negativity profile bookkeeping") {
    const auto p = NegativityProfile::from_parts(0.2, 3.0, 1.0);
    CHECK(p.mu_P == Approx(1.4));
    CHECK(p.nu_P == Approx(1.2 * 3.0 + 0.2));
    CHECK(p.nbar() == Approx(3.4));
    CHECK_THROWS_AS(NegativityProfile::from_parts(-0.1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(NegativityProfile::from_parts(1.0, 0.1, 5.0), std::invalid_argument);
    const BoundCurve c = pr(0.1);
    const auto zero = finite_negativity_bound(c, NegativityProfile::from_parts(0.0, 2.0, 0.0));
    CHECK(zero.value == Approx(c(2.0)));
    const auto r = finite_negativity_bound(c, p);
    CHECK(r.value <= r.intermediates.at("split_form") + 1e-15);
    CHECK(r.value <= r.intermediates.at("mu_nu_form") + 1e-15);
}

TEST_CASE("classical bound is the curve") {
    const BoundCurve c = pr(0.1);
    CHECK(classical_bound(c, 3.0).value == c(3.0));
    CHECK(extend(c, state::Classical{3.0}).value == c(3.0));
    CHECK(extend(c, state::Fock{0}).value == c(0.0));
    CHECK_THROWS_AS(classical_bound(c, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(classical_bound(step_bound({0.1, 1.0}), 1.0), std::invalid_argument);
}

TEST_CASE("Fock closed form agrees with the general Fock-matrix route") {
    const BoundCurve c = pr(1e-12);
    for (int m = 1; m <= 3; ++m) {
        const auto a = fock_bound(c, m);
        const auto b = known_fock_bound(c, FockMatrix::fock(m, m + 2));
        CHECK(a.value < 2.0);
        CHECK(b.value == Approx(a.value).epsilon(1e-6));
        CHECK(fock_prefactor(m, 0.1) == Approx(std::exp(log_mu_element(m, m, 0.1))).epsilon(1e-13));
    }
}

TEST_CASE("mu and nu from a Fock matrix") {
    const FockMatrix rho = FockMatrix::coherent(cplx(0.8, 0.0), 12);
    const double s = 0.1;
    const double mu = mu_ub_from_fock(rho, s, 5);
    double ref = 0.0, nu_ref = 0.0;
    for (int m = 0; m < 5; ++m)
        for (int n = 0; n < 5; ++n) {
            const double w = std::abs(rho(m, n)) * std::exp(log_mu_element(m, n, s));
            ref += w;
            nu_ref += w * s * (1 - s) * (2 + std::abs(m - n)) / (1 - 2 * s);
        }
    CHECK(mu == Approx(ref).epsilon(1e-13));
    CHECK(nu_ub_from_fock(rho, s, 5) == Approx(nu_ref).epsilon(1e-13));
    CHECK(log_mu_element(2, 5, s) == Approx(log_mu_element(5, 2, s)));
    CHECK_THROWS_AS(mu_ub_from_fock(rho, 0.6, 3), std::invalid_argument);
    CHECK_THROWS_AS(mu_ub_from_fock(rho, 0.1, 13), std::invalid_argument);
}

TEST_CASE("squeezed vacuum closed forms") {
    for (double lam : {0.3, 0.6}) {
        const FockMatrix rho = FockMatrix::squeezed_vacuum(lam, 120);
        for (int M : {1, 3, 5, 7, 9}) {
            double eta = 0.0;
            for (int k = 0; k < M; ++k) eta += rho(k, k).real();
            CHECK(squeezed_eta_exact(lam, M) == Approx(eta).epsilon(1e-12));
            if (M >= 3) CHECK(squeezed_eta_exact(lam, M) >= squeezed_eta_lower(lam, M));
            // the closed form dominates the exact element sum
            for (double s : {0.01, 0.1})
                CHECK(squeezed_mu_ub(lam, s, M) >= mu_ub_from_fock(rho, s, M) * (1.0 - 1e-12));
        }
    }
    CHECK_THROWS_AS(squeezed_eta_exact(0.3, 4), std::invalid_argument);
}

TEST_CASE("truncation penalty counts the coherences across the cut") {
    // Erasure-style 2 (1 - eta) alone is beaten by an actual channel pair here.
    const InDistributionGuarantee g{0.1, 1.0};
    const auto pair = oracle::worst_case_pair(oracle::PairClass::phase_rotation, g);
    const FockMatrix rho = FockMatrix::squeezed_vacuum(0.1, 40);
    const double d = oracle::phase_rotation_output_distance(rho, pair.gap);
    const double eta1 = squeezed_eta_exact(0.1, 1);
    CHECK(d > 2.0 * (1.0 - eta1));
    CHECK(d <= squeezed_vacuum_bound(pr(0.1), 0.1).value);
    CHECK(d <= known_fock_bound(pr(0.1), rho).value);
}

TEST_CASE("generic energy bound") {
    const BoundCurve c = pr(0.1);
    CHECK(generic_energy_bound(c, 0.0).value == c(0.0));
    const auto r = generic_energy_value(c, 1.0, 10, 1e3);
    CHECK(r.branch == "energy_only");
    CHECK(r.intermediates.count("compact_form") == 1);
    CHECK(r.params.M == 10);
    CHECK(generic_energy_value(c, 1.0, 10, 1.01).intermediates.at("guard") > 1.0);
    const auto t = generic_energy_bound(c, 1.0);
    CHECK(t.value == 2.0);
    CHECK(t.branch == "trivial");
}

TEST_CASE("reports recompute") {
    const BoundCurve c = pr(1e-6);
    for (const BoundReport& r : {fock_bound(c, 2), spat_bound(c, 1.0), squeezed_vacuum_bound(c, 0.4),
                                 generic_energy_bound(c, 0.5), known_fock_bound(c, FockMatrix::fock(2, 4))})
        CHECK(recompute_value(r) == r.value);
}

TEST_CASE("mu envelope is non-decreasing in mu") {
    const BoundCurve c = pr(0.1);
    double prev = 0.0;
    for (double mu = 1.0; mu < 50.0; mu += 0.25) {
        const double v = mu_monotone_envelope(mu, 3.0, c);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    CHECK_THROWS_AS(mu_monotone_envelope(0.5, 1.0, c), std::invalid_argument);
}
